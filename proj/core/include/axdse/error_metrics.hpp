#pragma once

#include <cstdint>
#include <vector>

#include "axdse/netlist.hpp"

namespace axdse {

struct ErrorReport {
  double med_raw = 0.0;       // mean absolute error, output units
  double med_norm_pct = 0.0;  // med_raw / (2^m - 1) * 100
  double worst_case = 0.0;    // max absolute error
  double error_rate = 0.0;    // fraction of inputs with nonzero error
};

// Exhaustive output table of a reference circuit, for repeated error sweeps
// against the same reference. Requires <= 24 input bits and <= 32 output bits.
class ExactOutputs {
public:
  explicit ExactOutputs(const Netlist& exact);

  const Netlist& netlist() const { return *nl_; }
  std::uint32_t word(std::uint64_t input) const { return words_[input]; }
  std::uint64_t size() const { return words_.size(); }

private:
  const Netlist* nl_;
  std::vector<std::uint32_t> words_;
};

// Exhaustive mean-error-distance sweep; both circuits must have identical
// input and output widths and at most 24 input bits.
ErrorReport error_metrics(const Netlist& approx, const Netlist& exact);
ErrorReport error_metrics(const Netlist& approx, const ExactOutputs& exact);

// Seeded Monte-Carlo estimate for circuits beyond the exhaustive cap.
ErrorReport sampled_error_metrics(const Netlist& approx, const Netlist& exact,
                                  std::size_t samples, std::uint64_t seed);

}  // namespace axdse
