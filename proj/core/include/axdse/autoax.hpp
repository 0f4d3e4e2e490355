#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "axdse/accel.hpp"
#include "axdse/explore.hpp"
#include "axdse/models.hpp"
#include "axdse/pareto.hpp"

namespace axdse {

// Uniform i.i.d. per-node palette choices; duplicates allowed.
std::vector<Configuration> sample_random(std::size_t n,
                                         const AcceleratorTemplate& tmpl,
                                         const ComponentPalette& palette,
                                         std::uint64_t seed);

// Per-configuration feature vector: per node, the chosen component's
// (med_norm_pct, luts, power_mw, latency_ns).
std::vector<double> config_features(const Configuration& cfg,
                                    const AcceleratorTemplate& tmpl,
                                    const ComponentPalette& palette);

struct Estimators {
  TrainedModel ssim_model;
  std::map<CostTarget, TrainedModel> cost_models;
};

// Fits one surrogate per target (SSIM plus every cost field) on exactly
// evaluated sample configurations. Default model family: random forest.
Estimators fit_estimators(std::span<const EvaluatedConfig> evaluated,
                          const AcceleratorTemplate& tmpl,
                          const ComponentPalette& palette,
                          ModelKind kind = ModelKind::RANDOM_FOREST,
                          const Hyper& hyper = {});

// Estimated objectives under minimization: (1 - est_ssim, est_cost).
std::array<double, 2> estimated_objectives(const Estimators& est,
                                           CostTarget target,
                                           const Configuration& cfg,
                                           const AcceleratorTemplate& tmpl,
                                           const ComponentPalette& palette);

// Archive-based stochastic hill climbing over the estimated objectives,
// seeded with one random configuration plus the all-exact configuration.
// The returned archive is mutually non-dominated under the estimates.
std::vector<Configuration> hill_climb(const Estimators& est, CostTarget target,
                                      const AcceleratorTemplate& tmpl,
                                      const ComponentPalette& palette,
                                      std::size_t budget, std::uint64_t seed);

// Baseline: `budget` uniform random configurations, estimated, reduced to
// their non-dominated subset.
std::vector<Configuration> random_search(const Estimators& est, CostTarget target,
                                         const AcceleratorTemplate& tmpl,
                                         const ComponentPalette& palette,
                                         std::size_t budget, std::uint64_t seed);

struct FinalizeResult {
  std::vector<EvaluatedConfig> evaluated;  // archive order
  std::map<CostTarget, Front> fronts;      // (1 - ssim, exact cost), ids are
                                           // configuration strings
};

// Exactly evaluates every archive member; estimated values never appear in
// the returned fronts.
FinalizeResult finalize(std::span<const Configuration> archive,
                        const AcceleratorTemplate& tmpl,
                        const ComponentPalette& palette,
                        std::span<const Image> images);
FinalizeResult finalize(std::span<const Configuration> archive,
                        const FilterContext& ctx);

// CSV rows: config,ssim,fpga_luts,fpga_latency_ns,fpga_power_mw for each
// front member.
void save_autoax_front_csv(const FinalizeResult& result, CostTarget target,
                           const std::filesystem::path& path);

}  // namespace axdse
