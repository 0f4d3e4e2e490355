#include "axdse/library_gen.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <unordered_set>

#include "axdse/rng.hpp"

namespace axdse {

Netlist eliminate_dead_gates(const Netlist& nl) {
  std::vector<bool> live(nl.gates.size(), false);
  std::vector<std::int32_t> stack;
  for (std::int32_t out : nl.outputs)
    if (nl.is_gate_net(out)) stack.push_back(out);
  while (!stack.empty()) {
    const std::int32_t net = stack.back();
    stack.pop_back();
    const int g = nl.gate_of(net);
    if (live[static_cast<std::size_t>(g)]) continue;
    live[static_cast<std::size_t>(g)] = true;
    const Gate& gate = nl.gates[static_cast<std::size_t>(g)];
    for (int i = 0; i < arity(gate.type); ++i) {
      const std::int32_t f = gate.fanin[static_cast<std::size_t>(i)];
      if (nl.is_gate_net(f)) stack.push_back(f);
    }
  }

  Netlist out;
  out.name = nl.name;
  out.inputs = nl.inputs;
  std::vector<std::int32_t> remap(static_cast<std::size_t>(nl.net_count()), -1);
  for (std::int32_t net = 0; net < static_cast<std::int32_t>(2 + nl.inputs.size()); ++net)
    remap[static_cast<std::size_t>(net)] = net;
  for (std::size_t g = 0; g < nl.gates.size(); ++g) {
    if (!live[g]) continue;
    Gate gate = nl.gates[g];
    for (int i = 0; i < arity(gate.type); ++i)
      gate.fanin[static_cast<std::size_t>(i)] =
          remap[static_cast<std::size_t>(gate.fanin[static_cast<std::size_t>(i)])];
    remap[static_cast<std::size_t>(nl.gate_net(static_cast<int>(g)))] =
        out.gate_net(static_cast<int>(out.gates.size()));
    out.gates.push_back(std::move(gate));
  }
  for (std::int32_t o : nl.outputs)
    out.outputs.push_back(remap[static_cast<std::size_t>(o)]);
  return out;
}

Netlist simplify(const Netlist& nl) {
  Netlist out;
  out.name = nl.name;
  out.inputs = nl.inputs;
  std::vector<std::int32_t> remap(static_cast<std::size_t>(nl.net_count()), -1);
  for (std::int32_t net = 0; net < static_cast<std::int32_t>(2 + nl.inputs.size()); ++net)
    remap[static_cast<std::size_t>(net)] = net;

  auto alias = [&](std::int32_t from, std::int32_t to) {
    remap[static_cast<std::size_t>(from)] = to;
  };
  auto emit = [&](const std::string& name, GateType t, std::int32_t a,
                  std::int32_t b) {
    Gate g;
    g.name = name;
    g.type = t;
    g.fanin = {a, b};
    out.gates.push_back(std::move(g));
    return out.gate_net(static_cast<int>(out.gates.size()) - 1);
  };

  for (std::size_t gi = 0; gi < nl.gates.size(); ++gi) {
    const Gate& g = nl.gates[gi];
    const std::int32_t own = nl.gate_net(static_cast<int>(gi));
    const int n_in = arity(g.type);
    const std::int32_t a = n_in >= 1 ? remap[static_cast<std::size_t>(g.fanin[0])] : -1;
    const std::int32_t b = n_in >= 2 ? remap[static_cast<std::size_t>(g.fanin[1])] : -1;
    const bool ca = a == kConst0Net || a == kConst1Net;
    const bool cb = b == kConst0Net || b == kConst1Net;

    switch (g.type) {
      case GateType::CONST0:
      case GateType::CONST1:
        alias(own, g.type == GateType::CONST0 ? kConst0Net : kConst1Net);
        break;
      case GateType::BUF:
        alias(own, a);  // buffers are wires to the cost model downstream
        break;
      case GateType::NOT:
        if (ca)
          alias(own, a == kConst0Net ? kConst1Net : kConst0Net);
        else
          alias(own, emit(g.name, GateType::NOT, a, -1));
        break;
      default: {
        if (ca && cb) {
          // Fold through the two-input truth table.
          const bool va = a == kConst1Net, vb = b == kConst1Net;
          bool r = false;
          switch (g.type) {
            case GateType::AND: r = va && vb; break;
            case GateType::OR: r = va || vb; break;
            case GateType::XOR: r = va != vb; break;
            case GateType::NAND: r = !(va && vb); break;
            case GateType::NOR: r = !(va || vb); break;
            default: r = va == vb; break;
          }
          alias(own, r ? kConst1Net : kConst0Net);
          break;
        }
        if (ca || cb) {
          const bool cv = (ca ? a : b) == kConst1Net;
          const std::int32_t x = ca ? b : a;
          switch (g.type) {
            case GateType::AND:
              alias(own, cv ? x : kConst0Net);
              break;
            case GateType::OR:
              alias(own, cv ? kConst1Net : x);
              break;
            case GateType::XOR:
              alias(own, cv ? emit(g.name, GateType::NOT, x, -1) : x);
              break;
            case GateType::NAND:
              alias(own, cv ? emit(g.name, GateType::NOT, x, -1) : kConst1Net);
              break;
            case GateType::NOR:
              alias(own, cv ? kConst0Net : emit(g.name, GateType::NOT, x, -1));
              break;
            default:  // XNOR
              alias(own, cv ? x : emit(g.name, GateType::NOT, x, -1));
              break;
          }
          break;
        }
        if (a == b) {
          switch (g.type) {
            case GateType::AND:
            case GateType::OR:
              alias(own, a);
              break;
            case GateType::XOR:
              alias(own, kConst0Net);
              break;
            case GateType::XNOR:
              alias(own, kConst1Net);
              break;
            default:  // NAND/NOR of equal fan-ins
              alias(own, emit(g.name, GateType::NOT, a, -1));
              break;
          }
          break;
        }
        alias(own, emit(g.name, g.type, a, b));
      }
    }
  }

  for (std::int32_t o : nl.outputs)
    out.outputs.push_back(remap[static_cast<std::size_t>(o)]);
  return eliminate_dead_gates(out);
}

namespace {

// Rewires every reference to gate g's net so it reads `target` instead.
void bypass_gate(Netlist& nl, int g, std::int32_t target) {
  const std::int32_t net = nl.gate_net(g);
  for (Gate& gate : nl.gates) {
    for (int i = 0; i < arity(gate.type); ++i) {
      if (gate.fanin[static_cast<std::size_t>(i)] == net)
        gate.fanin[static_cast<std::size_t>(i)] = target;
    }
  }
  for (std::int32_t& out : nl.outputs) {
    if (out == net) out = target;
  }
}

// One mutation step; returns false when the drawn operator is inapplicable.
bool mutate_step(Netlist& nl, std::mt19937_64& rng) {
  const double p = draw_unit(rng);
  if (p < 0.4) {
    // Output truncation: tie the lowest still-live output LSB to CONST0.
    for (std::size_t j = 0; j < nl.outputs.size(); ++j) {
      if (nl.outputs[j] != kConst0Net) {
        nl.outputs[j] = kConst0Net;
        return true;
      }
    }
    return false;
  }
  if (p < 0.7) {
    // Gate-to-constant replacement. Half the time the replacement is applied
    // as a correlated batch: every first-level gate fed by one chosen primary
    // input is zeroed at once, the structure of classic operand truncation.
    // Independent single-gate sites leave the deep redundant paths of
    // arithmetic arrays intact, so they spread error but never delay.
    if (nl.gates.empty()) return false;
    if (rng() & 1) {
      const std::int32_t in_net =
          nl.input_net(static_cast<int>(draw_below(rng, nl.inputs.size())));
      bool any = false;
      for (Gate& g : nl.gates) {
        bool reads_input = false, all_primary = arity(g.type) > 0;
        for (int i = 0; i < arity(g.type); ++i) {
          const std::int32_t f = g.fanin[static_cast<std::size_t>(i)];
          reads_input |= f == in_net;
          all_primary &= !nl.is_gate_net(f);
        }
        if (reads_input && all_primary) {
          g.type = GateType::CONST0;
          g.fanin = {-1, -1};
          any = true;
        }
      }
      return any;
    }
    Gate& g = nl.gates[draw_below(rng, nl.gates.size())];
    g.type = (rng() & 1) ? GateType::CONST1 : GateType::CONST0;
    g.fanin = {-1, -1};
    return true;
  }
  if (p < 0.9) {
    // Gate-type substitution: XOR<->OR, AND->BUF of first fan-in.
    std::vector<std::size_t> eligible;
    for (std::size_t g = 0; g < nl.gates.size(); ++g) {
      const GateType t = nl.gates[g].type;
      if (t == GateType::XOR || t == GateType::OR || t == GateType::AND)
        eligible.push_back(g);
    }
    if (eligible.empty()) return false;
    Gate& g = nl.gates[eligible[draw_below(rng, eligible.size())]];
    switch (g.type) {
      case GateType::XOR:
        g.type = GateType::OR;
        break;
      case GateType::OR:
        g.type = GateType::XOR;
        break;
      default:
        g.type = GateType::BUF;
        g.fanin[1] = -1;
        break;
    }
    return true;
  }
  // Subtree pruning: bypass a random gate with one of its fan-ins; the
  // orphaned cone is dropped by the cleanup pass.
  if (nl.gates.empty()) return false;
  const std::size_t g = draw_below(rng, nl.gates.size());
  const int a = arity(nl.gates[g].type);
  if (a == 0) return false;
  const std::int32_t target =
      nl.gates[g].fanin[a == 1 ? 0 : draw_below(rng, 2)];
  bypass_gate(nl, static_cast<int>(g), target);
  return true;
}

bool any_live_output(const Netlist& nl) {
  for (std::int32_t out : nl.outputs) {
    if (out >= 2) return true;
  }
  return false;
}

}  // namespace

std::vector<Netlist> gen_library(const Netlist& base, std::size_t count,
                                 std::uint64_t seed) {
  if (count < 1) throw Error("library size must be at least 1");
  base.validate();

  std::vector<Netlist> lib;
  lib.reserve(count);
  lib.push_back(base);

  std::unordered_set<std::string> seen;
  seen.insert(canonical_text(simplify(base)));

  std::mt19937_64 rng(seed);
  std::size_t serial = 1;
  std::size_t rejects = 0;
  // Each variant stacks mutation steps on a fresh copy of the base. The step
  // count is drawn from a wide range so the library spans gentle single-edit
  // variants as well as heavily restructured ones whose logic depth and cost
  // differ substantially from the base.
  while (lib.size() < count) {
    if (rejects > 1000 + 200 * count)
      throw Error("mutation space of '" + base.name + "' exhausted after " +
                  std::to_string(lib.size()) + " distinct variants");
    Netlist v = base;
    const std::size_t steps = 1ull << draw_below(rng, 7);
    std::size_t applied = 0;
    for (std::size_t s = 0; s < steps; ++s) applied += mutate_step(v, rng);
    if (applied == 0) {
      ++rejects;
      continue;
    }
    v = simplify(v);
    if (!any_live_output(v)) {
      ++rejects;
      continue;
    }
    std::string key = canonical_text(v);
    if (!seen.insert(std::move(key)).second) {
      ++rejects;
      continue;
    }
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_v%04zu", serial++);
    v.name = base.name + suffix;
    v.validate();
    lib.push_back(std::move(v));
  }
  return lib;
}

}  // namespace axdse
