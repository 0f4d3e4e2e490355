#include "axdse/cost.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "csv_util.hpp"

namespace axdse {

namespace {

constexpr std::uint64_t kStripe[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};

}  // namespace

OracleConfig load_oracle_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open oracle config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed oracle config: " + std::string(e.what()));
  }
  OracleConfig cfg;
  auto read_table = [&](const char* key, std::array<double, kNumGateTypes>& table) {
    if (!j.contains(key)) return;
    for (const auto& [name, value] : j.at(key).items()) {
      table[static_cast<std::size_t>(gate_type_from_string(name))] =
          value.get<double>();
    }
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "t_lut")
      cfg.t_lut = value.get<double>();
    else if (key == "t_route")
      cfg.t_route = value.get<double>();
    else if (key == "p_static")
      cfg.p_static = value.get<double>();
    else if (key == "c_dyn")
      cfg.c_dyn = value.get<double>();
    else if (key != "area_table" && key != "delay_table")
      throw Error("unknown oracle config key '" + key + "'");
  }
  read_table("area_table", cfg.area);
  read_table("delay_table", cfg.delay);
  return cfg;
}

// --- switching activity -----------------------------------------------------

Activity activity(const Netlist& nl) {
  const std::size_t nets = static_cast<std::size_t>(nl.net_count());
  Activity act;
  act.prob.assign(nets, 0.0);
  act.prob[1] = 1.0;

  const int n = nl.num_inputs();
  if (n <= 20) {
    const std::uint64_t total = 1ull << n;
    std::vector<std::uint64_t> ones(nets, 0);
    BlockEvaluator ev(nl);
    for (std::uint64_t base = 0; base < total; base += 64) {
      ev.eval(base);
      const std::uint64_t remaining = total - base;
      const std::uint64_t mask = remaining >= 64 ? ~0ull : ((1ull << remaining) - 1);
      for (std::size_t net = 2; net < nets; ++net)
        ones[net] += static_cast<std::uint64_t>(
            std::popcount(ev.net_val(static_cast<std::int32_t>(net)) & mask));
    }
    for (std::size_t net = 2; net < nets; ++net)
      act.prob[net] = static_cast<double>(ones[net]) / static_cast<double>(total);
    act.prob[1] = 1.0;
  } else {
    for (int i = 0; i < n; ++i) act.prob[static_cast<std::size_t>(2 + i)] = 0.5;
    std::size_t idx = 2 + static_cast<std::size_t>(n);
    for (const Gate& g : nl.gates) {
      const double a = arity(g.type) >= 1
                           ? act.prob[static_cast<std::size_t>(g.fanin[0])]
                           : 0.0;
      const double b = arity(g.type) >= 2
                           ? act.prob[static_cast<std::size_t>(g.fanin[1])]
                           : 0.0;
      double p;
      switch (g.type) {
        case GateType::NOT:
          p = 1.0 - a;
          break;
        case GateType::BUF:
          p = a;
          break;
        case GateType::AND:
          p = a * b;
          break;
        case GateType::OR:
          p = a + b - a * b;
          break;
        case GateType::XOR:
          p = a * (1.0 - b) + b * (1.0 - a);
          break;
        case GateType::NAND:
          p = 1.0 - a * b;
          break;
        case GateType::NOR:
          p = 1.0 - (a + b - a * b);
          break;
        case GateType::XNOR:
          p = 1.0 - (a * (1.0 - b) + b * (1.0 - a));
          break;
        case GateType::CONST0:
          p = 0.0;
          break;
        default:
          p = 1.0;
          break;
      }
      act.prob[idx++] = p;
    }
  }

  act.toggle.resize(nets);
  for (std::size_t net = 0; net < nets; ++net)
    act.toggle[net] = 2.0 * act.prob[net] * (1.0 - act.prob[net]);
  return act;
}

// --- ASIC proxy -------------------------------------------------------------

AsicCost asic_cost(const Netlist& nl, const OracleConfig& cfg, const Activity* act) {
  AsicCost cost;
  std::vector<double> depth(static_cast<std::size_t>(nl.net_count()), 0.0);
  Activity local;
  if (!act) {
    local = activity(nl);
    act = &local;
  }
  std::size_t idx = 2 + nl.inputs.size();
  for (const Gate& g : nl.gates) {
    const auto t = static_cast<std::size_t>(g.type);
    cost.area_units += cfg.area[t];
    cost.power_units += cfg.area[t] * act->toggle[idx];
    double d = 0.0;
    for (int i = 0; i < arity(g.type); ++i)
      d = std::max(d, depth[static_cast<std::size_t>(g.fanin[static_cast<std::size_t>(i)])]);
    depth[idx] = d + cfg.delay[t];
    ++idx;
  }
  for (std::int32_t out : nl.outputs)
    cost.delay_units = std::max(cost.delay_units, depth[static_cast<std::size_t>(out)]);
  return cost;
}

// --- LUT mapping ------------------------------------------------------------

namespace {

// Nets of constant-type gates behave as constants for mapping purposes.
std::int32_t resolve_const(const Netlist& nl, std::int32_t net) {
  if (nl.is_gate_net(net)) {
    const GateType t = nl.gates[static_cast<std::size_t>(nl.gate_of(net))].type;
    if (t == GateType::CONST0) return kConst0Net;
    if (t == GateType::CONST1) return kConst1Net;
  }
  return net;
}

struct ConeBuilder {
  const Netlist& nl;
  int k;
  std::set<std::int32_t> leaves;          // ordered: ascending net index
  std::vector<std::int32_t> cone_gates;   // net indices, any order
  std::unordered_set<std::int32_t> in_cone;
  std::unordered_set<std::int32_t> considered;

  ConeBuilder(const Netlist& n, int kk) : nl(n), k(kk) {}

  std::vector<std::int32_t> gate_fanins(std::int32_t net) const {
    const Gate& g = nl.gates[static_cast<std::size_t>(nl.gate_of(net))];
    std::vector<std::int32_t> fs;
    for (int i = 0; i < arity(g.type); ++i) {
      const std::int32_t f =
          resolve_const(nl, g.fanin[static_cast<std::size_t>(i)]);
      if (f >= 2) fs.push_back(f);
    }
    return fs;
  }

  // Attempts to absorb leaf `net` (a gate) into the cone.
  bool try_absorb(std::int32_t net, std::vector<std::int32_t>* exposed) {
    const auto fs = gate_fanins(net);
    std::set<std::int32_t> tentative = leaves;
    tentative.erase(net);
    for (std::int32_t f : fs) tentative.insert(f);
    if (static_cast<int>(tentative.size()) > k) return false;
    leaves.swap(tentative);
    cone_gates.push_back(net);
    in_cone.insert(net);
    if (exposed) {
      for (std::int32_t f : fs)
        if (nl.is_gate_net(f) && leaves.count(f)) exposed->push_back(f);
    }
    return true;
  }

  void grow(std::int32_t root) {
    cone_gates.push_back(root);
    in_cone.insert(root);
    for (std::int32_t f : gate_fanins(root)) leaves.insert(f);

    // Breadth-first toward the inputs; within a level, ascending gate id.
    std::vector<std::int32_t> level;
    for (std::int32_t f : leaves)
      if (nl.is_gate_net(f)) level.push_back(f);
    std::sort(level.begin(), level.end());
    while (!level.empty()) {
      std::vector<std::int32_t> next;
      for (std::int32_t net : level) {
        if (!leaves.count(net) || considered.count(net)) continue;
        considered.insert(net);
        try_absorb(net, &next);
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      level.swap(next);
    }
    // Fixpoint sweeps: absorbing can shrink the leaf set, making previously
    // infeasible leaves admissible; keep the cone maximal.
    bool progress = true;
    while (progress) {
      progress = false;
      std::vector<std::int32_t> gate_leaves;
      for (std::int32_t f : leaves)
        if (nl.is_gate_net(f)) gate_leaves.push_back(f);
      for (std::int32_t net : gate_leaves) {
        if (!leaves.count(net)) continue;
        if (try_absorb(net, nullptr)) progress = true;
      }
    }
  }

  std::uint64_t truth_table(std::int32_t root,
                            const std::vector<std::int32_t>& fanins) const {
    // Bit-parallel cone simulation over the 2^f assignments using the truth
    // table striping of the fan-in variables.
    std::unordered_map<std::int32_t, std::uint64_t> val;
    for (std::size_t i = 0; i < fanins.size(); ++i) val[fanins[i]] = kStripe[i];
    std::vector<std::int32_t> order = cone_gates;
    std::sort(order.begin(), order.end());
    for (std::int32_t net : order) {
      const Gate& g = nl.gates[static_cast<std::size_t>(nl.gate_of(net))];
      auto input = [&](int i) -> std::uint64_t {
        const std::int32_t f =
            resolve_const(nl, g.fanin[static_cast<std::size_t>(i)]);
        if (f == kConst0Net) return 0;
        if (f == kConst1Net) return ~0ull;
        return val.at(f);
      };
      std::uint64_t v;
      switch (g.type) {
        case GateType::CONST0:
          v = 0;
          break;
        case GateType::CONST1:
          v = ~0ull;
          break;
        case GateType::NOT:
          v = ~input(0);
          break;
        case GateType::BUF:
          v = input(0);
          break;
        case GateType::AND:
          v = input(0) & input(1);
          break;
        case GateType::OR:
          v = input(0) | input(1);
          break;
        case GateType::XOR:
          v = input(0) ^ input(1);
          break;
        case GateType::NAND:
          v = ~(input(0) & input(1));
          break;
        case GateType::NOR:
          v = ~(input(0) | input(1));
          break;
        default:
          v = ~(input(0) ^ input(1));
          break;
      }
      val[net] = v;
    }
    const std::size_t bits = static_cast<std::size_t>(1) << fanins.size();
    const std::uint64_t mask = bits >= 64 ? ~0ull : ((1ull << bits) - 1);
    return val.at(root) & mask;
  }
};

}  // namespace

LutNetwork lut_map(const Netlist& nl, int k) {
  if (k < 2 || k > 6)
    throw Error("LUT size " + std::to_string(k) + " out of range [2,6]");
  LutNetwork ln;
  ln.k = k;

  std::vector<std::int32_t> worklist;
  std::unordered_set<std::int32_t> queued;
  for (std::int32_t out : nl.outputs) {
    const std::int32_t r = resolve_const(nl, out);
    ln.outputs.push_back(r);
    if (nl.is_gate_net(r) && queued.insert(r).second) worklist.push_back(r);
  }

  for (std::size_t w = 0; w < worklist.size(); ++w) {
    const std::int32_t root = worklist[w];
    ConeBuilder cone(nl, k);
    cone.grow(root);
    Lut lut;
    lut.out_net = root;
    lut.fanins.assign(cone.leaves.begin(), cone.leaves.end());
    lut.truth = cone.truth_table(root, lut.fanins);
    for (std::int32_t f : lut.fanins) {
      if (nl.is_gate_net(f) && queued.insert(f).second) worklist.push_back(f);
    }
    ln.luts.push_back(std::move(lut));
  }

  // LUT levels; fan-ins always have smaller net indices than their root.
  std::unordered_map<std::int32_t, int> level;
  std::vector<const Lut*> order;
  order.reserve(ln.luts.size());
  for (const Lut& l : ln.luts) order.push_back(&l);
  std::sort(order.begin(), order.end(),
            [](const Lut* a, const Lut* b) { return a->out_net < b->out_net; });
  for (const Lut* l : order) {
    int d = 0;
    for (std::int32_t f : l->fanins) {
      if (auto it = level.find(f); it != level.end()) d = std::max(d, it->second);
    }
    level[l->out_net] = d + 1;
    ln.depth = std::max(ln.depth, d + 1);
  }
  return ln;
}

bool check_equivalence(const LutNetwork& ln, const Netlist& source) {
  const int n = source.num_inputs();
  if (n > 24) throw Error("input space too large for exhaustive equivalence");
  const std::uint64_t total = 1ull << n;

  std::vector<const Lut*> order;
  order.reserve(ln.luts.size());
  for (const Lut& l : ln.luts) order.push_back(&l);
  std::sort(order.begin(), order.end(),
            [](const Lut* a, const Lut* b) { return a->out_net < b->out_net; });

  std::vector<std::uint64_t> vals(static_cast<std::size_t>(source.net_count()), 0);
  BlockEvaluator ev(source);
  for (std::uint64_t base = 0; base < total; base += 64) {
    ev.eval(base);
    vals[0] = 0;
    vals[1] = ~0ull;
    for (int i = 0; i < n; ++i)
      vals[static_cast<std::size_t>(2 + i)] = ev.net_val(source.input_net(i));
    for (const Lut* l : order) {
      std::uint64_t out = 0;
      for (int lane = 0; lane < 64; ++lane) {
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < l->fanins.size(); ++i)
          idx |= ((vals[static_cast<std::size_t>(l->fanins[i])] >> lane) & 1ull) << i;
        out |= ((l->truth >> idx) & 1ull) << lane;
      }
      vals[static_cast<std::size_t>(l->out_net)] = out;
    }
    const std::uint64_t remaining = total - base;
    const std::uint64_t mask = remaining >= 64 ? ~0ull : ((1ull << remaining) - 1);
    for (std::size_t j = 0; j < ln.outputs.size(); ++j) {
      const std::uint64_t mapped = vals[static_cast<std::size_t>(ln.outputs[j])];
      const std::uint64_t ref = ev.net_val(source.outputs[j]);
      if ((mapped ^ ref) & mask) return false;
    }
  }
  return true;
}

FpgaCost fpga_cost(const LutNetwork& ln, const Activity& act,
                   const OracleConfig& cfg) {
  FpgaCost cost;
  cost.luts = static_cast<int>(ln.luts.size());
  cost.latency_ns = ln.luts.empty() ? 0.0 : ln.depth * (cfg.t_lut + cfg.t_route);
  double toggle_sum = 0.0;
  for (const Lut& l : ln.luts) {
    if (static_cast<std::size_t>(l.out_net) >= act.toggle.size())
      throw Error("missing activity entry for mapped net");
    toggle_sum += act.toggle[static_cast<std::size_t>(l.out_net)];
  }
  cost.power_mw = cfg.p_static + cfg.c_dyn * toggle_sum;
  return cost;
}

// --- measurement ------------------------------------------------------------

namespace {

Measurement measure_impl(const Netlist& nl, ErrorReport error, int k,
                         const OracleConfig& cfg) {
  Measurement m;
  m.circuit_id = nl.name;
  m.error = error;
  const Activity act = activity(nl);
  m.asic = asic_cost(nl, cfg, &act);
  m.fpga = fpga_cost(lut_map(nl, k), act, cfg);
  return m;
}

}  // namespace

Measurement measure(const Netlist& nl, const Netlist& exact_ref, int k,
                    const OracleConfig& cfg) {
  return measure_impl(nl, error_metrics(nl, exact_ref), k, cfg);
}

Measurement measure(const Netlist& nl, const ExactOutputs& exact_ref, int k,
                    const OracleConfig& cfg) {
  return measure_impl(nl, error_metrics(nl, exact_ref), k, cfg);
}

// --- measurement CSV --------------------------------------------------------

namespace {

constexpr const char* kCsvHeader =
    "circuit_id,med_raw,med_norm_pct,worst_case,error_rate,asic_area,"
    "asic_delay,asic_power,fpga_luts,fpga_latency_ns,fpga_power_mw";

}  // namespace

std::vector<Measurement> load_measurements(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open measurements file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("empty measurements file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = detail::split_csv_line(line);
  const auto expected = detail::split_csv_line(kCsvHeader);
  std::vector<std::size_t> col(expected.size());
  for (std::size_t e = 0; e < expected.size(); ++e) {
    const auto it = std::find(header.begin(), header.end(), expected[e]);
    if (it == header.end())
      throw Error("missing column '" + expected[e] + "' in " + path.string());
    col[e] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<Measurement> rows;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw Error("wrong cell count on line " + std::to_string(line_no) +
                  " of " + path.string());
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    Measurement m;
    m.circuit_id = cells[col[0]];
    if (!ids.insert(m.circuit_id).second)
      throw Error("duplicate id '" + m.circuit_id + "' in " + path.string());
    m.error.med_raw = detail::parse_double(cells[col[1]], ctx);
    m.error.med_norm_pct = detail::parse_double(cells[col[2]], ctx);
    m.error.worst_case = detail::parse_double(cells[col[3]], ctx);
    m.error.error_rate = detail::parse_double(cells[col[4]], ctx);
    m.asic.area_units = detail::parse_double(cells[col[5]], ctx);
    m.asic.delay_units = detail::parse_double(cells[col[6]], ctx);
    m.asic.power_units = detail::parse_double(cells[col[7]], ctx);
    m.fpga.luts = static_cast<int>(detail::parse_double(cells[col[8]], ctx));
    m.fpga.latency_ns = detail::parse_double(cells[col[9]], ctx);
    m.fpga.power_mw = detail::parse_double(cells[col[10]], ctx);
    rows.push_back(std::move(m));
  }
  return rows;
}

void save_measurements(std::span<const Measurement> rows,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << kCsvHeader << '\n';
  for (const Measurement& m : rows) {
    out << m.circuit_id << ',' << detail::format_double(m.error.med_raw) << ','
        << detail::format_double(m.error.med_norm_pct) << ','
        << detail::format_double(m.error.worst_case) << ','
        << detail::format_double(m.error.error_rate) << ','
        << detail::format_double(m.asic.area_units) << ','
        << detail::format_double(m.asic.delay_units) << ','
        << detail::format_double(m.asic.power_units) << ',' << m.fpga.luts
        << ',' << detail::format_double(m.fpga.latency_ns) << ','
        << detail::format_double(m.fpga.power_mw) << '\n';
  }
}

}  // namespace axdse
