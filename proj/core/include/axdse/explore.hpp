#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "axdse/cost.hpp"
#include "axdse/models.hpp"
#include "axdse/netlist.hpp"
#include "axdse/pareto.hpp"

namespace axdse {

// FPGA parameters the surrogates estimate.
enum class CostTarget { luts, latency_ns, power_mw };

const char* to_string(CostTarget t);  // "fpga_luts" etc.
CostTarget cost_target_from_string(const std::string& s);
double cost_field(const FpgaCost& c, CostTarget t);

struct ExplorationConfig {
  double sample_fraction = 0.10;
  double train_fraction = 0.80;
  int front_count = 3;  // m
  int top_k = 3;
  std::vector<CostTarget> targets = {CostTarget::luts, CostTarget::latency_ns,
                                     CostTarget::power_mw};
  // ErrorReport field paired with each cost objective:
  // med_raw | med_norm_pct | worst_case | error_rate.
  std::string error_objective = "med_norm_pct";
  int lut_k = 6;
  std::uint64_t seed = 1;
  // Test hook: substitute ground-truth values for model predictions.
  bool perfect_predictor = false;
  // Peel in (error, all targets) space instead of per-target 2-D space.
  bool joint_peel = false;
  std::size_t ground_truth_cap = 50000;

  void validate() const;
};

ExplorationConfig load_exploration_config(const std::filesystem::path& path);
void save_exploration_config(const ExplorationConfig& cfg,
                             const std::filesystem::path& path);

struct ModelScore {
  ModelKind kind = ModelKind::RIDGE;
  double fidelity = 0.0;
};

struct ExplorationReport {
  ExplorationConfig config;
  std::size_t library_size = 0;
  std::vector<std::string> subset_ids;  // sampling order
  // target name -> every fitted kind with its validation fidelity, ranked.
  std::map<std::string, std::vector<ModelScore>> model_fidelity;
  // target name -> model name -> per-front-level candidate ids.
  std::map<std::string, std::map<std::string, std::vector<std::vector<std::string>>>>
      candidates;
  // target name -> model name -> circuit id -> predicted value (measured
  // circuits only; the estimated-vs-measured scatter data).
  std::map<std::string, std::map<std::string, std::map<std::string, double>>>
      predictions;
  std::size_t union_size = 0;          // |subset ∪ candidates|
  std::size_t oracle_invocations = 0;  // == union_size
  double reduction_factor = 0.0;       // library_size / invocations
  std::map<std::string, Front> final_fronts;  // measured values only
  std::vector<Measurement> measured;          // sorted by id
  // Present only when ground truth was computed.
  std::map<std::string, Front> true_fronts;
  std::map<std::string, double> coverage;
};

// Runs the full pipeline: sample, measure, featurize, fit+rank per target,
// predict, peel, re-measure the candidate union, and report verified fronts.
// Deterministic per (library, config).
ExplorationReport run_exploration(std::span<const Netlist> library,
                                  const Netlist& exact_ref,
                                  const ExplorationConfig& config);

struct GroundTruth {
  std::map<std::string, Front> fronts;  // target name -> true front
  std::vector<Measurement> measurements;
};

// Measures every circuit (bounded by config.ground_truth_cap).
GroundTruth ground_truth(std::span<const Netlist> library, const Netlist& exact_ref,
                         const ExplorationConfig& config);

// Fills report.true_fronts and report.coverage.
void attach_ground_truth(ExplorationReport& report, const GroundTruth& gt);

// Writes report.json, per-target front CSVs, measurements.csv and
// estimated-vs-measured scatter CSVs. Idempotent byte-for-byte.
void export_report(const ExplorationReport& report,
                   const std::filesystem::path& directory);

std::string report_to_json(const ExplorationReport& report);

}  // namespace axdse
