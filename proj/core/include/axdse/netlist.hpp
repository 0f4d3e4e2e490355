#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "axdse/error.hpp"

namespace axdse {

enum class GateType : std::uint8_t {
  NOT,
  BUF,
  AND,
  OR,
  XOR,
  NAND,
  NOR,
  XNOR,
  CONST0,
  CONST1
};

inline constexpr int kNumGateTypes = 10;

int arity(GateType t);
const char* to_string(GateType t);
GateType gate_type_from_string(std::string_view s);  // throws Error

struct Gate {
  std::string name;
  GateType type = GateType::BUF;
  // Net indices; only the first arity(type) entries are meaningful.
  std::array<std::int32_t, 2> fanin{-1, -1};
};

// Reserved net indices for the constant nets.
inline constexpr std::int32_t kConst0Net = 0;
inline constexpr std::int32_t kConst1Net = 1;

// Gate-level combinational circuit. Net indexing: 0 = CONST0, 1 = CONST1,
// 2 .. 2+n_in-1 = primary inputs (LSB first), 2+n_in+g = output of gates[g].
// Gates are kept in topological order: every fan-in index is smaller than the
// gate's own net index. Values of this type are immutable in spirit; all
// operations on them are pure.
struct Netlist {
  std::string name;
  std::vector<std::string> inputs;    // names, LSB first
  std::vector<std::int32_t> outputs;  // net indices, LSB first
  std::vector<Gate> gates;

  int num_inputs() const { return static_cast<int>(inputs.size()); }
  int num_outputs() const { return static_cast<int>(outputs.size()); }
  int num_gates() const { return static_cast<int>(gates.size()); }
  std::int32_t net_count() const {
    return static_cast<std::int32_t>(2 + inputs.size() + gates.size());
  }
  std::int32_t input_net(int i) const { return static_cast<std::int32_t>(2 + i); }
  std::int32_t gate_net(int g) const {
    return static_cast<std::int32_t>(2 + inputs.size() + g);
  }
  bool is_const_net(std::int32_t net) const { return net < 2; }
  bool is_input_net(std::int32_t net) const {
    return net >= 2 && net < static_cast<std::int32_t>(2 + inputs.size());
  }
  bool is_gate_net(std::int32_t net) const {
    return net >= static_cast<std::int32_t>(2 + inputs.size());
  }
  int gate_of(std::int32_t net) const {
    return static_cast<int>(net - 2 - inputs.size());
  }

  std::string net_name(std::int32_t net) const;

  // Checks every structural invariant (arity, topological fan-ins, unique
  // identifiers, non-empty interface, word-sized buses). Throws Error.
  void validate() const;
};

// --- text format ------------------------------------------------------------
//
// One statement per line, '#' starts a comment:
//   name <identifier>
//   inputs <id>+
//   outputs <id|CONST0|CONST1>+
//   gate <id> <GATETYPE> <fanin>{0,2}
// Statements may appear in any order; gates are topologically sorted during
// validation.

Netlist parse_netlist(std::string_view text);
std::string to_text(const Netlist& nl);

// Canonical serialization without the name line; used for structural
// comparison of variants.
std::string canonical_text(const Netlist& nl);

// --- simulation -------------------------------------------------------------

// Single-word simulation. Bit i of input_word drives input net i; bit j of
// the result is output binding j. Throws Error if input_word is out of range.
std::uint64_t simulate(const Netlist& nl, std::uint64_t input_word);

// Evaluates 64 input words at once, one bit lane per word.
class BlockEvaluator {
public:
  explicit BlockEvaluator(const Netlist& nl);

  // Lanes hold words word_base .. word_base+63. Lanes past 2^n wrap harmlessly;
  // callers mask when counting.
  void eval(std::uint64_t word_base);

  // Lanes hold the 64 caller-provided words (arbitrary, not consecutive).
  void eval_gather(std::span<const std::uint64_t> words);

  std::uint64_t net_val(std::int32_t net) const { return vals_[static_cast<std::size_t>(net)]; }
  std::uint64_t output_lane(int j) const {
    return vals_[static_cast<std::size_t>(nl_->outputs[static_cast<std::size_t>(j)])];
  }

  // Transposes lanes back into numeric output words; out.size() <= 64.
  void output_words(std::span<std::uint64_t> out) const;

  const Netlist& netlist() const { return *nl_; }

private:
  void eval_gates();

  const Netlist* nl_;
  std::vector<std::uint64_t> vals_;
};

// --- reference generators ---------------------------------------------------

// Ripple-carry adder: inputs a0..a(n-1), b0..b(n-1); outputs s0..s(n-1), carry.
Netlist build_exact_adder(int bits);
// Array multiplier: inputs a0..a(n-1), b0..b(n-1); outputs p0..p(2n-1).
Netlist build_exact_multiplier(int bits);

// Exhaustive functional equivalence; requires matching widths and at most 24
// input bits.
bool check_equivalence(const Netlist& a, const Netlist& b);

// --- library manifest -------------------------------------------------------
//
// JSON array of {"id": ..., "path": ...} or {"id": ..., "netlist": <inline>}.
// Paths are resolved relative to the manifest file. Entry ids override the
// parsed netlist names; the first entry is the exact reference by convention.

std::vector<Netlist> load_library(const std::filesystem::path& manifest);
void save_library(std::span<const Netlist> lib, const std::filesystem::path& dir,
                  const std::string& manifest_name = "manifest.json");

}  // namespace axdse
