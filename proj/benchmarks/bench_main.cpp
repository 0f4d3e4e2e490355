#include <benchmark/benchmark.h>

#include <random>

#include "axdse/cost.hpp"
#include "axdse/error_metrics.hpp"
#include "axdse/library_gen.hpp"
#include "axdse/models.hpp"
#include "axdse/pareto.hpp"
#include "axdse/rng.hpp"

using namespace axdse;

namespace {

const Netlist& mul8() {
  static const Netlist nl = build_exact_multiplier(8);
  return nl;
}

void BM_ExhaustiveSweep8x8(benchmark::State& state) {
  BlockEvaluator ev(mul8());
  for (auto _ : state) {
    std::uint64_t acc = 0;
    for (std::uint64_t base = 0; base < (1ull << 16); base += 64) {
      ev.eval(base);
      acc ^= ev.output_lane(0);
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_ExhaustiveSweep8x8);

void BM_ErrorMetrics8x8(benchmark::State& state) {
  Netlist trunc = mul8();
  trunc.outputs[0] = kConst0Net;
  for (auto _ : state) benchmark::DoNotOptimize(error_metrics(trunc, mul8()));
}
BENCHMARK(BM_ErrorMetrics8x8);

void BM_LutMap8x8(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lut_map(mul8(), 6));
}
BENCHMARK(BM_LutMap8x8);

void BM_Measure8x8(benchmark::State& state) {
  const ExactOutputs exact(mul8());
  for (auto _ : state) benchmark::DoNotOptimize(measure(mul8(), exact, 6));
}
BENCHMARK(BM_Measure8x8);

void BM_ParetoFront(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<Point> pts;
  for (int i = 0; i < state.range(0); ++i)
    pts.push_back({"p" + std::to_string(i), {draw_unit(rng), draw_unit(rng)}});
  for (auto _ : state) benchmark::DoNotOptimize(pareto_front(pts));
}
BENCHMARK(BM_ParetoFront)->Arg(1000)->Arg(4000);

void BM_Fidelity(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::map<std::string, double> est, mes;
  for (int i = 0; i < state.range(0); ++i) {
    est["c" + std::to_string(i)] = draw_unit(rng);
    mes["c" + std::to_string(i)] = draw_unit(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(fidelity(est, mes));
}
BENCHMARK(BM_Fidelity)->Arg(64)->Arg(400);

void BM_ForestFit(benchmark::State& state) {
  std::mt19937_64 rng(3);
  Dataset ds;
  ds.target_name = "fpga_luts";
  for (int i = 0; i < 200; ++i) {
    DataRow row;
    row.id = "r" + std::to_string(i);
    row.x.resize(kNumFeatures);
    for (auto& v : row.x) v = draw_unit(rng);
    row.y = 3.0 * row.x[0] + row.x[5];
    ds.rows.push_back(std::move(row));
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(fit(ModelKind::RANDOM_FOREST, ds, {{"seed", 1.0}}));
}
BENCHMARK(BM_ForestFit);

}  // namespace

BENCHMARK_MAIN();
