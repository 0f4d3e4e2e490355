#include "axdse/error_metrics.hpp"

#include <array>
#include <cmath>
#include <random>

#include "axdse/rng.hpp"

namespace axdse {

namespace {

void check_widths(const Netlist& a, const Netlist& b) {
  if (a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs())
    throw Error("width mismatch between '" + a.name + "' and '" + b.name + "'");
}

struct Accumulator {
  std::uint64_t abs_sum = 0;
  std::uint64_t worst = 0;
  std::uint64_t nonzero = 0;
  std::uint64_t count = 0;

  void add(std::uint64_t approx_word, std::uint64_t exact_word) {
    const std::uint64_t d =
        approx_word > exact_word ? approx_word - exact_word : exact_word - approx_word;
    abs_sum += d;
    worst = std::max(worst, d);
    nonzero += d != 0;
    ++count;
  }

  ErrorReport report(int output_bits) const {
    ErrorReport r;
    const double n = static_cast<double>(count);
    r.med_raw = static_cast<double>(abs_sum) / n;
    const double max_out = std::ldexp(1.0, output_bits) - 1.0;
    r.med_norm_pct = r.med_raw / max_out * 100.0;
    r.worst_case = static_cast<double>(worst);
    r.error_rate = static_cast<double>(nonzero) / n;
    return r;
  }
};

}  // namespace

ExactOutputs::ExactOutputs(const Netlist& exact) : nl_(&exact) {
  const int n = exact.num_inputs();
  if (n > 24) throw Error("input space too large for exhaustive sweep");
  if (exact.num_outputs() > 32)
    throw Error("reference output width exceeds 32 bits");
  const std::uint64_t total = 1ull << n;
  words_.resize(total);
  BlockEvaluator ev(exact);
  std::array<std::uint64_t, 64> block;
  for (std::uint64_t base = 0; base < total; base += 64) {
    ev.eval(base);
    const std::size_t lanes = static_cast<std::size_t>(std::min<std::uint64_t>(64, total - base));
    ev.output_words(std::span<std::uint64_t>(block.data(), lanes));
    for (std::size_t l = 0; l < lanes; ++l)
      words_[base + l] = static_cast<std::uint32_t>(block[l]);
  }
}

ErrorReport error_metrics(const Netlist& approx, const Netlist& exact) {
  check_widths(approx, exact);
  const int n = approx.num_inputs();
  if (n > 24) throw Error("input space too large for exhaustive sweep");
  const std::uint64_t total = 1ull << n;
  BlockEvaluator ea(approx), ee(exact);
  std::array<std::uint64_t, 64> wa, we;
  Accumulator acc;
  for (std::uint64_t base = 0; base < total; base += 64) {
    ea.eval(base);
    ee.eval(base);
    const std::size_t lanes = static_cast<std::size_t>(std::min<std::uint64_t>(64, total - base));
    ea.output_words(std::span<std::uint64_t>(wa.data(), lanes));
    ee.output_words(std::span<std::uint64_t>(we.data(), lanes));
    for (std::size_t l = 0; l < lanes; ++l) acc.add(wa[l], we[l]);
  }
  return acc.report(approx.num_outputs());
}

ErrorReport error_metrics(const Netlist& approx, const ExactOutputs& exact) {
  check_widths(approx, exact.netlist());
  const std::uint64_t total = exact.size();
  BlockEvaluator ea(approx);
  std::array<std::uint64_t, 64> wa;
  Accumulator acc;
  for (std::uint64_t base = 0; base < total; base += 64) {
    ea.eval(base);
    const std::size_t lanes = static_cast<std::size_t>(std::min<std::uint64_t>(64, total - base));
    ea.output_words(std::span<std::uint64_t>(wa.data(), lanes));
    for (std::size_t l = 0; l < lanes; ++l) acc.add(wa[l], exact.word(base + l));
  }
  return acc.report(approx.num_outputs());
}

ErrorReport sampled_error_metrics(const Netlist& approx, const Netlist& exact,
                                  std::size_t samples, std::uint64_t seed) {
  check_widths(approx, exact);
  if (samples == 0) throw Error("sample count must be positive");
  const int n = approx.num_inputs();
  const std::uint64_t mask = n >= 64 ? ~0ull : ((1ull << n) - 1);
  std::mt19937_64 rng(seed);
  BlockEvaluator ea(approx), ee(exact);
  std::array<std::uint64_t, 64> in, wa, we;
  Accumulator acc;
  std::size_t done = 0;
  while (done < samples) {
    const std::size_t lanes = std::min<std::size_t>(64, samples - done);
    for (std::size_t l = 0; l < lanes; ++l) in[l] = rng() & mask;
    ea.eval_gather(std::span<const std::uint64_t>(in.data(), lanes));
    ee.eval_gather(std::span<const std::uint64_t>(in.data(), lanes));
    ea.output_words(std::span<std::uint64_t>(wa.data(), lanes));
    ee.output_words(std::span<std::uint64_t>(we.data(), lanes));
    for (std::size_t l = 0; l < lanes; ++l) acc.add(wa[l], we[l]);
    done += lanes;
  }
  return acc.report(approx.num_outputs());
}

}  // namespace axdse
