#include "axdse/netlist.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace axdse {

namespace {

constexpr const char* kTypeNames[kNumGateTypes] = {
    "NOT", "BUF", "AND", "OR", "XOR", "NAND", "NOR", "XNOR", "CONST0", "CONST1"};

constexpr std::uint64_t kStripe[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};

bool is_ident(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
          c == '-'))
      return false;
  }
  return true;
}

struct Token {
  std::string text;
  int line = 0;
  int col = 0;
};

std::vector<std::vector<Token>> tokenize(std::string_view text) {
  std::vector<std::vector<Token>> lines;
  int line_no = 1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] == '#') break;
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
             line[i] != '#')
        ++i;
      toks.push_back({std::string(line.substr(start, i - start)), line_no,
                      static_cast<int>(start + 1)});
    }
    if (!toks.empty()) lines.push_back(std::move(toks));
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
    ++line_no;
  }
  return lines;
}

}  // namespace

int arity(GateType t) {
  switch (t) {
    case GateType::NOT:
    case GateType::BUF:
      return 1;
    case GateType::CONST0:
    case GateType::CONST1:
      return 0;
    default:
      return 2;
  }
}

const char* to_string(GateType t) { return kTypeNames[static_cast<int>(t)]; }

GateType gate_type_from_string(std::string_view s) {
  for (int i = 0; i < kNumGateTypes; ++i) {
    if (s == kTypeNames[i]) return static_cast<GateType>(i);
  }
  throw Error("unknown gate type '" + std::string(s) + "'");
}

std::string Netlist::net_name(std::int32_t net) const {
  if (net == kConst0Net) return "CONST0";
  if (net == kConst1Net) return "CONST1";
  if (is_input_net(net)) return inputs[static_cast<std::size_t>(net - 2)];
  return gates[static_cast<std::size_t>(gate_of(net))].name;
}

void Netlist::validate() const {
  if (inputs.empty()) throw Error("netlist '" + name + "' has no inputs");
  if (outputs.empty()) throw Error("netlist '" + name + "' has no outputs");
  if (inputs.size() > 64) throw Error("netlist '" + name + "' exceeds 64 inputs");
  if (outputs.size() > 64) throw Error("netlist '" + name + "' exceeds 64 outputs");
  std::unordered_set<std::string> seen;
  for (const auto& in : inputs) {
    if (in == "CONST0" || in == "CONST1")
      throw Error("input identifier '" + in + "' is reserved");
    if (!seen.insert(in).second) throw Error("duplicate identifier '" + in + "'");
  }
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const Gate& gate = gates[g];
    if (gate.name == "CONST0" || gate.name == "CONST1")
      throw Error("gate identifier '" + gate.name + "' is reserved");
    if (!seen.insert(gate.name).second)
      throw Error("duplicate identifier '" + gate.name + "'");
    const int a = arity(gate.type);
    const std::int32_t own = gate_net(static_cast<int>(g));
    for (int i = 0; i < a; ++i) {
      const std::int32_t f = gate.fanin[static_cast<std::size_t>(i)];
      if (f < 0 || f >= own)
        throw Error("gate '" + gate.name + "' has a fan-in that is not a declared input, constant, or earlier gate");
    }
  }
  for (std::int32_t out : outputs) {
    if (out < 0 || out >= net_count())
      throw Error("output binding out of range in netlist '" + name + "'");
  }
}

Netlist parse_netlist(std::string_view text) {
  const auto lines = tokenize(text);

  Netlist nl;
  std::vector<Token> input_toks;
  std::vector<Token> output_toks;
  struct RawGate {
    Token name;
    GateType type;
    std::vector<Token> fanins;
  };
  std::vector<RawGate> raw_gates;
  bool saw_inputs = false, saw_outputs = false, saw_name = false;

  for (const auto& toks : lines) {
    const Token& head = toks[0];
    if (head.text == "name") {
      if (saw_name) throw ParseError("duplicate name statement", head.line, head.col);
      if (toks.size() != 2)
        throw ParseError("name expects one identifier", head.line, head.col);
      nl.name = toks[1].text;
      saw_name = true;
    } else if (head.text == "inputs") {
      if (saw_inputs)
        throw ParseError("duplicate inputs statement", head.line, head.col);
      if (toks.size() < 2)
        throw ParseError("inputs expects at least one identifier", head.line, head.col);
      input_toks.assign(toks.begin() + 1, toks.end());
      saw_inputs = true;
    } else if (head.text == "outputs") {
      if (saw_outputs)
        throw ParseError("duplicate outputs statement", head.line, head.col);
      if (toks.size() < 2)
        throw ParseError("outputs expects at least one identifier", head.line, head.col);
      output_toks.assign(toks.begin() + 1, toks.end());
      saw_outputs = true;
    } else if (head.text == "gate") {
      if (toks.size() < 3)
        throw ParseError("gate expects an identifier and a type", head.line, head.col);
      RawGate g;
      g.name = toks[1];
      try {
        g.type = gate_type_from_string(toks[2].text);
      } catch (const Error&) {
        throw ParseError("unknown gate type '" + toks[2].text + "'", toks[2].line,
                         toks[2].col);
      }
      g.fanins.assign(toks.begin() + 3, toks.end());
      const int want = arity(g.type);
      if (static_cast<int>(g.fanins.size()) != want)
        throw ParseError("gate '" + g.name.text + "' of type " +
                             to_string(g.type) + " expects " +
                             std::to_string(want) + " fan-in(s), got " +
                             std::to_string(g.fanins.size()),
                         g.name.line, g.name.col);
      raw_gates.push_back(std::move(g));
    } else {
      throw ParseError("unknown statement '" + head.text + "'", head.line, head.col);
    }
  }

  if (!saw_inputs) throw ParseError("missing inputs statement", 1, 1);
  if (!saw_outputs) throw ParseError("missing outputs statement", 1, 1);

  // Name tables. Gate indices here are declaration order; topological order
  // is established below.
  std::unordered_map<std::string, std::int32_t> input_net;
  for (const Token& t : input_toks) {
    if (!is_ident(t.text))
      throw ParseError("invalid identifier '" + t.text + "'", t.line, t.col);
    if (t.text == "CONST0" || t.text == "CONST1")
      throw ParseError("identifier '" + t.text + "' is reserved", t.line, t.col);
    const auto idx = static_cast<std::int32_t>(2 + nl.inputs.size());
    if (!input_net.emplace(t.text, idx).second)
      throw ParseError("duplicate input '" + t.text + "'", t.line, t.col);
    nl.inputs.push_back(t.text);
  }
  std::unordered_map<std::string, int> gate_index;
  for (std::size_t g = 0; g < raw_gates.size(); ++g) {
    const Token& t = raw_gates[g].name;
    if (!is_ident(t.text))
      throw ParseError("invalid identifier '" + t.text + "'", t.line, t.col);
    if (t.text == "CONST0" || t.text == "CONST1")
      throw ParseError("identifier '" + t.text + "' is reserved", t.line, t.col);
    if (input_net.count(t.text) || gate_index.count(t.text))
      throw ParseError("duplicate identifier '" + t.text + "'", t.line, t.col);
    gate_index.emplace(t.text, static_cast<int>(g));
  }

  // Resolver used for fan-ins and outputs. Gate references are encoded as
  // ~declaration_index until the topological order is known.
  auto resolve = [&](const Token& t) -> std::int64_t {
    if (t.text == "CONST0") return kConst0Net;
    if (t.text == "CONST1") return kConst1Net;
    if (auto it = input_net.find(t.text); it != input_net.end()) return it->second;
    if (auto it = gate_index.find(t.text); it != gate_index.end())
      return ~static_cast<std::int64_t>(it->second);
    throw ParseError("undefined net '" + t.text + "'", t.line, t.col);
  };

  std::vector<std::array<std::int64_t, 2>> raw_fanin(raw_gates.size(), {-1, -1});
  for (std::size_t g = 0; g < raw_gates.size(); ++g) {
    for (std::size_t i = 0; i < raw_gates[g].fanins.size(); ++i) {
      raw_fanin[g][i] = resolve(raw_gates[g].fanins[i]);
    }
  }

  // Depth-first topological sort over declaration-order gates.
  std::vector<int> order;
  order.reserve(raw_gates.size());
  std::vector<std::uint8_t> state(raw_gates.size(), 0);  // 0=new 1=open 2=done
  std::vector<int> stack;
  for (std::size_t root = 0; root < raw_gates.size(); ++root) {
    if (state[root] != 0) continue;
    stack.push_back(static_cast<int>(root));
    while (!stack.empty()) {
      const int g = stack.back();
      if (state[static_cast<std::size_t>(g)] == 2) {
        stack.pop_back();
        continue;
      }
      if (state[static_cast<std::size_t>(g)] == 0) {
        state[static_cast<std::size_t>(g)] = 1;
        bool blocked = false;
        const int want = arity(raw_gates[static_cast<std::size_t>(g)].type);
        for (int i = 0; i < want; ++i) {
          const std::int64_t f = raw_fanin[static_cast<std::size_t>(g)][static_cast<std::size_t>(i)];
          if (f < 0) {  // gate reference
            const int dep = static_cast<int>(~f);
            if (state[static_cast<std::size_t>(dep)] == 1)
              throw Error("cycle detected involving gate '" +
                          raw_gates[static_cast<std::size_t>(dep)].name.text + "'");
            if (state[static_cast<std::size_t>(dep)] == 0) {
              stack.push_back(dep);
              blocked = true;
            }
          }
        }
        if (blocked) continue;
      }
      state[static_cast<std::size_t>(g)] = 2;
      order.push_back(g);
      stack.pop_back();
    }
  }

  std::vector<std::int32_t> topo_net(raw_gates.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    topo_net[static_cast<std::size_t>(order[pos])] =
        static_cast<std::int32_t>(2 + nl.inputs.size() + pos);
  }
  auto final_net = [&](std::int64_t f) -> std::int32_t {
    return f >= 0 ? static_cast<std::int32_t>(f)
                  : topo_net[static_cast<std::size_t>(~f)];
  };

  nl.gates.reserve(raw_gates.size());
  for (int g : order) {
    const RawGate& rg = raw_gates[static_cast<std::size_t>(g)];
    Gate gate;
    gate.name = rg.name.text;
    gate.type = rg.type;
    for (std::size_t i = 0; i < rg.fanins.size(); ++i)
      gate.fanin[i] = final_net(raw_fanin[static_cast<std::size_t>(g)][i]);
    nl.gates.push_back(std::move(gate));
  }
  for (const Token& t : output_toks) nl.outputs.push_back(final_net(resolve(t)));

  nl.validate();
  return nl;
}

std::string to_text(const Netlist& nl) {
  std::ostringstream os;
  if (!nl.name.empty()) os << "name " << nl.name << "\n";
  os << canonical_text(nl);
  return os.str();
}

std::string canonical_text(const Netlist& nl) {
  std::ostringstream os;
  os << "inputs";
  for (const auto& in : nl.inputs) os << ' ' << in;
  os << "\noutputs";
  for (std::int32_t out : nl.outputs) os << ' ' << nl.net_name(out);
  os << '\n';
  for (const Gate& g : nl.gates) {
    os << "gate " << g.name << ' ' << to_string(g.type);
    for (int i = 0; i < arity(g.type); ++i)
      os << ' ' << nl.net_name(g.fanin[static_cast<std::size_t>(i)]);
    os << '\n';
  }
  return os.str();
}

// --- simulation -------------------------------------------------------------

BlockEvaluator::BlockEvaluator(const Netlist& nl)
    : nl_(&nl), vals_(static_cast<std::size_t>(nl.net_count()), 0) {
  vals_[0] = 0;
  vals_[1] = ~0ull;
}

void BlockEvaluator::eval_gates() {
  std::size_t idx = 2 + nl_->inputs.size();
  for (const Gate& g : nl_->gates) {
    std::uint64_t v;
    switch (g.type) {
      case GateType::CONST0:
        v = 0;
        break;
      case GateType::CONST1:
        v = ~0ull;
        break;
      case GateType::NOT:
        v = ~vals_[static_cast<std::size_t>(g.fanin[0])];
        break;
      case GateType::BUF:
        v = vals_[static_cast<std::size_t>(g.fanin[0])];
        break;
      default: {
        const std::uint64_t a = vals_[static_cast<std::size_t>(g.fanin[0])];
        const std::uint64_t b = vals_[static_cast<std::size_t>(g.fanin[1])];
        switch (g.type) {
          case GateType::AND:
            v = a & b;
            break;
          case GateType::OR:
            v = a | b;
            break;
          case GateType::XOR:
            v = a ^ b;
            break;
          case GateType::NAND:
            v = ~(a & b);
            break;
          case GateType::NOR:
            v = ~(a | b);
            break;
          default:
            v = ~(a ^ b);
            break;
        }
      }
    }
    vals_[idx++] = v;
  }
}

void BlockEvaluator::eval(std::uint64_t word_base) {
  const int n = nl_->num_inputs();
  if ((word_base & 63) == 0) {
    for (int i = 0; i < n; ++i) {
      vals_[static_cast<std::size_t>(2 + i)] =
          i < 6 ? kStripe[i] : (((word_base >> i) & 1) ? ~0ull : 0ull);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      std::uint64_t lane = 0;
      for (int l = 0; l < 64; ++l)
        lane |= (((word_base + static_cast<std::uint64_t>(l)) >> i) & 1ull)
                << l;
      vals_[static_cast<std::size_t>(2 + i)] = lane;
    }
  }
  eval_gates();
}

void BlockEvaluator::eval_gather(std::span<const std::uint64_t> words) {
  const int n = nl_->num_inputs();
  for (int i = 0; i < n; ++i) {
    std::uint64_t lane = 0;
    for (std::size_t l = 0; l < words.size() && l < 64; ++l)
      lane |= ((words[l] >> i) & 1ull) << l;
    vals_[static_cast<std::size_t>(2 + i)] = lane;
  }
  eval_gates();
}

void BlockEvaluator::output_words(std::span<std::uint64_t> out) const {
  const auto& outs = nl_->outputs;
  for (std::size_t l = 0; l < out.size(); ++l) {
    std::uint64_t w = 0;
    for (std::size_t j = 0; j < outs.size(); ++j)
      w |= ((vals_[static_cast<std::size_t>(outs[j])] >> l) & 1ull) << j;
    out[l] = w;
  }
}

std::uint64_t simulate(const Netlist& nl, std::uint64_t input_word) {
  const int n = nl.num_inputs();
  if (n < 64 && input_word >= (1ull << n))
    throw Error("input word " + std::to_string(input_word) +
                " out of range for " + std::to_string(n) + " inputs");
  // Scalar path: net values are 0 or all-ones, reusing the lane gate kernel.
  BlockEvaluator ev(nl);
  const std::uint64_t words[1] = {input_word};
  ev.eval_gather(std::span<const std::uint64_t>(words, 1));
  std::uint64_t out = 0;
  for (std::size_t j = 0; j < nl.outputs.size(); ++j)
    out |= (ev.net_val(nl.outputs[j]) & 1ull) << j;
  return out;
}

bool check_equivalence(const Netlist& a, const Netlist& b) {
  if (a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs())
    throw Error("width mismatch between '" + a.name + "' and '" + b.name + "'");
  const int n = a.num_inputs();
  if (n > 24) throw Error("input space too large for exhaustive equivalence");
  const std::uint64_t total = 1ull << n;
  BlockEvaluator ea(a), eb(b);
  for (std::uint64_t base = 0; base < total; base += 64) {
    ea.eval(base);
    eb.eval(base);
    const std::uint64_t remaining = total - base;
    const std::uint64_t mask =
        remaining >= 64 ? ~0ull : ((1ull << remaining) - 1);
    for (int j = 0; j < a.num_outputs(); ++j) {
      if ((ea.output_lane(j) ^ eb.output_lane(j)) & mask) return false;
    }
  }
  return true;
}

// --- reference generators ---------------------------------------------------

namespace {

class Builder {
public:
  explicit Builder(Netlist& nl) : nl_(&nl) {}

  std::int32_t add(std::string name, GateType t, std::int32_t a = -1,
                   std::int32_t b = -1) {
    Gate g;
    g.name = std::move(name);
    g.type = t;
    g.fanin = {a, b};
    nl_->gates.push_back(std::move(g));
    return nl_->gate_net(static_cast<int>(nl_->gates.size()) - 1);
  }

private:
  Netlist* nl_;
};

void check_bits(int bits) {
  if (bits < 2 || bits > 16)
    throw Error("bit-width " + std::to_string(bits) + " out of range [2,16]");
}

}  // namespace

Netlist build_exact_adder(int bits) {
  check_bits(bits);
  Netlist nl;
  nl.name = "add" + std::to_string(bits);
  for (int i = 0; i < bits; ++i) nl.inputs.push_back("a" + std::to_string(i));
  for (int i = 0; i < bits; ++i) nl.inputs.push_back("b" + std::to_string(i));
  Builder bld(nl);
  std::int32_t carry = -1;
  for (int i = 0; i < bits; ++i) {
    const std::int32_t a = nl.input_net(i);
    const std::int32_t b = nl.input_net(bits + i);
    const std::string s = std::to_string(i);
    if (i == 0) {
      nl.outputs.push_back(bld.add("s0", GateType::XOR, a, b));
      carry = bld.add("c0", GateType::AND, a, b);
    } else {
      const std::int32_t x = bld.add("x" + s, GateType::XOR, a, b);
      nl.outputs.push_back(bld.add("s" + s, GateType::XOR, x, carry));
      const std::int32_t g = bld.add("g" + s, GateType::AND, a, b);
      const std::int32_t p = bld.add("p" + s, GateType::AND, x, carry);
      carry = bld.add("c" + s, GateType::OR, g, p);
    }
  }
  nl.outputs.push_back(carry);
  nl.validate();
  return nl;
}

Netlist build_exact_multiplier(int bits) {
  check_bits(bits);
  Netlist nl;
  nl.name = "mul" + std::to_string(bits);
  for (int i = 0; i < bits; ++i) nl.inputs.push_back("a" + std::to_string(i));
  for (int i = 0; i < bits; ++i) nl.inputs.push_back("b" + std::to_string(i));
  Builder bld(nl);

  auto pp = [&](int i, int j) {
    return bld.add("pp" + std::to_string(i) + "_" + std::to_string(j),
                   GateType::AND, nl.input_net(i), nl.input_net(bits + j));
  };

  // Row 0 seeds the running sum; each later row is added with a ripple chain.
  std::vector<std::int32_t> sum;
  for (int i = 0; i < bits; ++i) sum.push_back(pp(i, 0));
  int cell = 0;
  for (int j = 1; j < bits; ++j) {
    std::int32_t carry = -1;
    for (int k = 0; k < bits; ++k) {
      const std::size_t pos = static_cast<std::size_t>(j + k);
      const std::int32_t addend = pp(k, j);
      const std::int32_t cur = pos < sum.size() ? sum[pos] : -1;
      const std::string s = std::to_string(cell++);
      std::int32_t x = -1, cout = -1;
      if (cur >= 0 && carry >= 0) {
        x = bld.add("fx" + s, GateType::XOR, cur, addend);
        const std::int32_t sm = bld.add("fs" + s, GateType::XOR, x, carry);
        const std::int32_t g = bld.add("fg" + s, GateType::AND, cur, addend);
        const std::int32_t p = bld.add("fp" + s, GateType::AND, x, carry);
        cout = bld.add("fc" + s, GateType::OR, g, p);
        if (pos < sum.size())
          sum[pos] = sm;
        else
          sum.push_back(sm);
      } else {
        const std::int32_t other = cur >= 0 ? cur : carry;
        if (other >= 0) {
          const std::int32_t sm = bld.add("hs" + s, GateType::XOR, other, addend);
          cout = bld.add("hc" + s, GateType::AND, other, addend);
          if (pos < sum.size())
            sum[pos] = sm;
          else
            sum.push_back(sm);
        } else {
          if (pos < sum.size())
            sum[pos] = addend;
          else
            sum.push_back(addend);
          cout = -1;
        }
      }
      carry = cout;
      (void)x;
    }
    if (carry >= 0) sum.push_back(carry);
  }
  sum.resize(static_cast<std::size_t>(2 * bits), kConst0Net);
  nl.outputs = sum;
  nl.validate();
  return nl;
}

// --- library manifest -------------------------------------------------------

std::vector<Netlist> load_library(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error("cannot open manifest " + manifest.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed manifest " + manifest.string() + ": " + e.what());
  }
  if (!j.is_array()) throw Error("manifest must be a JSON array");
  std::vector<Netlist> lib;
  std::unordered_set<std::string> ids;
  for (const auto& entry : j) {
    if (!entry.is_object() || !entry.contains("id"))
      throw Error("manifest entry missing id");
    const std::string id = entry.at("id").get<std::string>();
    if (!ids.insert(id).second) throw Error("duplicate circuit id '" + id + "'");
    std::string text;
    if (entry.contains("netlist")) {
      text = entry.at("netlist").get<std::string>();
    } else if (entry.contains("path")) {
      const auto path =
          manifest.parent_path() / entry.at("path").get<std::string>();
      std::ifstream nf(path);
      if (!nf) throw Error("cannot open netlist file " + path.string());
      std::ostringstream os;
      os << nf.rdbuf();
      text = os.str();
    } else {
      throw Error("manifest entry '" + id + "' has neither path nor netlist");
    }
    Netlist nl = parse_netlist(text);
    nl.name = id;
    lib.push_back(std::move(nl));
  }
  return lib;
}

void save_library(std::span<const Netlist> lib, const std::filesystem::path& dir,
                  const std::string& manifest_name) {
  std::filesystem::create_directories(dir);
  nlohmann::json j = nlohmann::json::array();
  for (const Netlist& nl : lib) {
    const std::string file = nl.name + ".nl";
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / file).string());
    out << to_text(nl);
    j.push_back({{"id", nl.name}, {"path", file}});
  }
  std::ofstream mout(dir / manifest_name, std::ios::binary);
  if (!mout) throw Error("cannot write manifest in " + dir.string());
  mout << j.dump(2) << '\n';
}

}  // namespace axdse
