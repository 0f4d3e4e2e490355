#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "axdse/features.hpp"

namespace axdse {

// The in-scope rows of the model zoo. Out-of-scope families (gradient
// boosting, AdaBoost, Gaussian process, symbolic regression, Lasso, LARS,
// SGD, MLP) are rejected at parse time with a targeted diagnostic.
enum class ModelKind {
  OLS_ASIC_POWER,    // 1-D regression on the asic_power feature
  OLS_ASIC_LATENCY,  // 1-D regression on the asic_delay feature
  OLS_ASIC_AREA,     // 1-D regression on the asic_area feature
  PLS,
  RANDOM_FOREST,
  KERNEL_RIDGE,
  BAYESIAN_RIDGE,
  RIDGE,
  KNN,
  DECISION_TREE,
};

inline constexpr int kNumModelKinds = 10;

const char* to_string(ModelKind k);
const char* ml_code(ModelKind k);  // "ML1".."ML18" table row
// Accepts canonical names and ML codes.
ModelKind model_kind_from_string(const std::string& s);
std::vector<ModelKind> all_model_kinds();

using Hyper = std::map<std::string, double>;

struct LinearParams {
  std::vector<double> weights;  // on standardized features
  double intercept = 0.0;
};

struct KernelRidgeParams {
  std::size_t n = 0, d = 0;
  std::vector<double> x;  // n*d standardized training matrix, row-major
  std::vector<double> alpha;
  double bandwidth = 1.0;
  double intercept = 0.0;
};

struct KnnParams {
  std::size_t n = 0, d = 0;
  std::vector<double> x;  // standardized training matrix, row-major
  std::vector<double> y;
  int k = 5;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct TreeParams {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct ForestParams {
  std::vector<TreeParams> trees;
};

using ModelParams =
    std::variant<LinearParams, KernelRidgeParams, KnnParams, TreeParams, ForestParams>;

struct TrainedModel {
  ModelKind kind = ModelKind::RIDGE;
  Hyper hyper;                        // resolved (defaults filled in)
  std::vector<double> mean, stddev;   // training standardization statistics
  ModelParams params;
  std::optional<double> fidelity;     // validation fidelity once ranked
};

// Fits `kind` on standardized features. Unknown hyperparameter keys or
// invalid values raise Error.
TrainedModel fit(ModelKind kind, const Dataset& train, const Hyper& hyper = {});

double predict(const TrainedModel& model, std::span<const double> features);

// Fits every kind, scores validation fidelity, returns the top_k models in
// descending fidelity (ties broken by enum order). Kinds that fail to fit are
// skipped with a diagnostic; throws only if every kind fails. `scores`, when
// given, receives (kind, fidelity) for every kind that fitted.
std::vector<TrainedModel> rank_models(
    std::span<const ModelKind> kinds, const Dataset& train, const Dataset& valid,
    std::size_t top_k, const Hyper& base_hyper = {},
    std::vector<std::pair<ModelKind, double>>* scores = nullptr,
    std::vector<std::string>* diagnostics = nullptr);

// JSON persistence: {kind, hyper, standardization, parameters, fidelity}.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace axdse
