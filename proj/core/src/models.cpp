#include "axdse/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <Eigen/Dense>
#include <json.hpp>

#include "axdse/pareto.hpp"
#include "axdse/rng.hpp"

namespace axdse {

namespace {

struct KindInfo {
  ModelKind kind;
  const char* name;
  const char* code;
};

constexpr KindInfo kKinds[kNumModelKinds] = {
    {ModelKind::OLS_ASIC_POWER, "ols_asic_power", "ML1"},
    {ModelKind::OLS_ASIC_LATENCY, "ols_asic_latency", "ML2"},
    {ModelKind::OLS_ASIC_AREA, "ols_asic_area", "ML3"},
    {ModelKind::PLS, "pls", "ML4"},
    {ModelKind::RANDOM_FOREST, "random_forest", "ML5"},
    {ModelKind::KERNEL_RIDGE, "kernel_ridge", "ML10"},
    {ModelKind::BAYESIAN_RIDGE, "bayesian_ridge", "ML11"},
    {ModelKind::RIDGE, "ridge", "ML14"},
    {ModelKind::KNN, "knn", "ML16"},
    {ModelKind::DECISION_TREE, "decision_tree", "ML18"},
};

const std::map<std::string, std::string>& out_of_scope_codes() {
  static const std::map<std::string, std::string> table = {
      {"ML6", "gradient boosting"},   {"ML7", "AdaBoost"},
      {"ML8", "Gaussian process"},    {"ML9", "symbolic regression"},
      {"ML12", "Lasso"},              {"ML13", "least angle regression"},
      {"ML15", "stochastic gradient descent"}, {"ML17", "multi-layer perceptron"},
  };
  return table;
}

}  // namespace

const char* to_string(ModelKind k) {
  return kKinds[static_cast<int>(k)].name;
}

const char* ml_code(ModelKind k) { return kKinds[static_cast<int>(k)].code; }

ModelKind model_kind_from_string(const std::string& s) {
  for (const KindInfo& info : kKinds) {
    if (s == info.name || s == info.code) return info.kind;
  }
  if (const auto it = out_of_scope_codes().find(s); it != out_of_scope_codes().end())
    throw Error("model " + s + " (" + it->second +
                ") is not part of this toolkit; supported kinds are ML1-ML5, "
                "ML10, ML11, ML14, ML16, ML18");
  throw Error("unknown model kind '" + s + "'");
}

std::vector<ModelKind> all_model_kinds() {
  std::vector<ModelKind> kinds;
  for (const KindInfo& info : kKinds) kinds.push_back(info.kind);
  return kinds;
}

// --- hyperparameters ----------------------------------------------------------

namespace {

Hyper default_hyper(ModelKind kind, std::size_t dim) {
  switch (kind) {
    case ModelKind::RIDGE:
    case ModelKind::KERNEL_RIDGE:
      return {{"penalty", 1.0}};
    case ModelKind::BAYESIAN_RIDGE:
      return {{"max_iter", 300.0}, {"tol", 1e-6}};
    case ModelKind::PLS:
      return {{"n_components", static_cast<double>(std::min<std::size_t>(4, dim))}};
    case ModelKind::KNN:
      return {{"k", 5.0}};
    case ModelKind::DECISION_TREE:
      return {{"max_depth", 8.0}, {"min_leaf", 3.0}};
    case ModelKind::RANDOM_FOREST:
      return {{"n_trees", 50.0},
              {"max_depth", 8.0},
              {"min_leaf", 3.0},
              {"feature_subsample",
               std::ceil(std::sqrt(static_cast<double>(dim)))},
              {"bootstrap", 1.0},
              {"seed", 0.0}};
    default:
      return {};
  }
}

Hyper resolve_hyper(ModelKind kind, std::size_t dim, const Hyper& user) {
  Hyper h = default_hyper(kind, dim);
  for (const auto& [key, value] : user) {
    if (key == "seed") {  // accepted everywhere; only stochastic fits use it
      h[key] = value;
      continue;
    }
    const auto it = h.find(key);
    if (it == h.end())
      throw Error("invalid hyperparameter '" + key + "' for model " +
                  to_string(kind));
    it->second = value;
  }
  return h;
}

// A hyper map shared across kinds keeps only the keys each kind understands.
Hyper filter_hyper(ModelKind kind, std::size_t dim, const Hyper& shared) {
  const Hyper defaults = default_hyper(kind, dim);
  Hyper h;
  for (const auto& [key, value] : shared) {
    if (key == "seed" || defaults.count(key)) h[key] = value;
  }
  return h;
}

double hyper_at(const Hyper& h, const std::string& key, double fallback = 0.0) {
  const auto it = h.find(key);
  return it == h.end() ? fallback : it->second;
}

// --- standardization ----------------------------------------------------------

struct Standardized {
  Eigen::MatrixXd x;   // n x d
  Eigen::VectorXd yc;  // centered target
  double y_mean = 0.0;
  std::vector<double> mean, stddev;
};

Standardized standardize(const Dataset& train) {
  const std::size_t n = train.rows.size();
  const std::size_t d = train.dim();
  Standardized s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 1.0);
  Eigen::MatrixXd raw(n, d);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) raw(i, j) = train.rows[i].x[j];
    y(i) = train.rows[i].y;
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double mu = raw.col(j).mean();
    const double var = (raw.col(j).array() - mu).square().mean();
    s.mean[j] = mu;
    s.stddev[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  s.x.resize(n, d);
  for (std::size_t j = 0; j < d; ++j)
    s.x.col(j) = (raw.col(j).array() - s.mean[j]) / s.stddev[j];
  s.y_mean = y.mean();
  s.yc = y.array() - s.y_mean;
  return s;
}

Eigen::VectorXd apply_standardization(const TrainedModel& m,
                                      std::span<const double> x) {
  if (x.size() != m.mean.size())
    throw Error("feature vector width mismatch: got " + std::to_string(x.size()) +
                ", expected " + std::to_string(m.mean.size()));
  Eigen::VectorXd z(static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j)
    z(static_cast<Eigen::Index>(j)) = (x[j] - m.mean[j]) / m.stddev[j];
  return z;
}

// --- linear family -------------------------------------------------------------

LinearParams fit_ols_single(const Standardized& s, std::size_t feature) {
  LinearParams p;
  p.weights.assign(static_cast<std::size_t>(s.x.cols()), 0.0);
  const auto col = s.x.col(static_cast<Eigen::Index>(feature));
  const double denom = col.squaredNorm();
  p.weights[feature] = denom > 0.0 ? col.dot(s.yc) / denom : 0.0;
  p.intercept = s.y_mean;
  return p;
}

LinearParams fit_ridge(const Standardized& s, double penalty) {
  if (penalty < 0.0) throw Error("ridge penalty must be non-negative");
  const Eigen::Index d = s.x.cols();
  LinearParams p;
  p.intercept = s.y_mean;
  Eigen::VectorXd w;
  if (penalty == 0.0) {
    // Minimum-norm least squares; tolerates the zero columns left by
    // constant features.
    w = s.x.completeOrthogonalDecomposition().solve(s.yc);
  } else {
    Eigen::MatrixXd gram = s.x.transpose() * s.x;
    gram.diagonal().array() += penalty;
    const auto chol = gram.ldlt();
    if (chol.info() != Eigen::Success)
      throw Error("singular ridge solve; raise the penalty");
    w = chol.solve(s.x.transpose() * s.yc);
  }
  p.weights.assign(w.data(), w.data() + d);
  return p;
}

LinearParams fit_bayesian_ridge(const Standardized& s, int max_iter, double tol) {
  const Eigen::Index n = s.x.rows();
  const Eigen::Index d = s.x.cols();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.x.transpose() * s.x);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const Eigen::VectorXd evals = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::VectorXd proj = v.transpose() * (s.x.transpose() * s.yc);

  constexpr double kTiny = 1e-12;
  constexpr double kHuge = 1e12;
  const double var_y = s.yc.squaredNorm() / static_cast<double>(n);
  double alpha = var_y > kTiny ? 1.0 / var_y : 1.0;  // noise precision
  double lambda = 1.0;                               // weight precision

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::ArrayXd denom = lambda + alpha * evals.array();
    mu = v * (alpha * proj.array() / denom).matrix();
    const double gamma = (alpha * evals.array() / denom).sum();
    const double resid = (s.yc - s.x * mu).squaredNorm();
    const double new_lambda =
        std::clamp(gamma / std::max(mu.squaredNorm(), kTiny), kTiny, kHuge);
    const double new_alpha = std::clamp(
        (static_cast<double>(n) - gamma) / std::max(resid, kTiny), kTiny, kHuge);
    const double change = std::max(std::abs(new_lambda - lambda) / lambda,
                                   std::abs(new_alpha - alpha) / alpha);
    lambda = new_lambda;
    alpha = new_alpha;
    if (change < tol) break;
  }
  const Eigen::ArrayXd denom = lambda + alpha * evals.array();
  mu = v * (alpha * proj.array() / denom).matrix();

  LinearParams p;
  p.weights.assign(mu.data(), mu.data() + d);
  p.intercept = s.y_mean;
  return p;
}

LinearParams fit_pls(const Standardized& s, int n_components) {
  if (n_components < 1) throw Error("PLS needs at least one component");
  const Eigen::Index d = s.x.cols();
  Eigen::MatrixXd x = s.x;
  Eigen::VectorXd y = s.yc;
  Eigen::MatrixXd w_mat(d, n_components), p_mat(d, n_components);
  Eigen::VectorXd q(n_components);
  int used = 0;
  for (int h = 0; h < n_components; ++h) {
    Eigen::VectorXd w = x.transpose() * y;
    const double wn = w.norm();
    if (wn < 1e-12) break;
    w /= wn;
    const Eigen::VectorXd t = x * w;
    const double tt = t.squaredNorm();
    if (tt < 1e-12) break;
    const Eigen::VectorXd p = x.transpose() * t / tt;
    const double qh = y.dot(t) / tt;
    x -= t * p.transpose();
    y -= qh * t;
    w_mat.col(h) = w;
    p_mat.col(h) = p;
    q(h) = qh;
    ++used;
  }
  LinearParams out;
  out.intercept = s.y_mean;
  if (used == 0) {
    out.weights.assign(static_cast<std::size_t>(d), 0.0);
    return out;
  }
  const auto w_used = w_mat.leftCols(used);
  const auto p_used = p_mat.leftCols(used);
  const Eigen::MatrixXd pw = p_used.transpose() * w_used;
  const Eigen::VectorXd beta =
      w_used * pw.fullPivLu().solve(q.head(used));
  out.weights.assign(beta.data(), beta.data() + d);
  return out;
}

// --- kernel ridge ---------------------------------------------------------------

double median_pairwise_distance(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) return 1.0;
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j)
      dists.push_back((x.row(i) - x.row(j)).norm());
  }
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid),
                   dists.end());
  const double med = dists[mid];
  return med > 1e-12 ? med : 1.0;
}

KernelRidgeParams fit_kernel_ridge(const Standardized& s, double penalty,
                                   double bandwidth) {
  if (penalty <= 0.0) throw Error("kernel ridge penalty must be positive");
  const Eigen::Index n = s.x.rows();
  KernelRidgeParams p;
  p.n = static_cast<std::size_t>(n);
  p.d = static_cast<std::size_t>(s.x.cols());
  p.bandwidth = bandwidth > 0.0 ? bandwidth : median_pairwise_distance(s.x);
  p.intercept = s.y_mean;
  Eigen::MatrixXd k(n, n);
  const double inv = 1.0 / (2.0 * p.bandwidth * p.bandwidth);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0 + penalty;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double val = std::exp(-(s.x.row(i) - s.x.row(j)).squaredNorm() * inv);
      k(i, j) = val;
      k(j, i) = val;
    }
  }
  const Eigen::VectorXd alpha = k.ldlt().solve(s.yc);
  p.alpha.assign(alpha.data(), alpha.data() + n);
  p.x.resize(p.n * p.d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < s.x.cols(); ++j)
      p.x[static_cast<std::size_t>(i) * p.d + static_cast<std::size_t>(j)] = s.x(i, j);
  return p;
}

// --- CART / forest ----------------------------------------------------------------

struct CartConfig {
  int max_depth = 8;
  int min_leaf = 3;
  int feature_subsample = 0;  // 0 or >= d means all features
};

class CartBuilder {
public:
  CartBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
              const CartConfig& cfg, std::mt19937_64* rng)
      : x_(x), y_(y), cfg_(cfg), rng_(rng) {}

  TreeParams build(std::vector<int> rows) {
    TreeParams tree;
    grow(std::move(rows), 0, tree);
    return tree;
  }

private:
  int grow(std::vector<int> rows, int depth, TreeParams& tree) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double sum = 0.0;
    for (int r : rows) sum += y_(r);
    const double mean = sum / static_cast<double>(rows.size());
    tree.nodes[static_cast<std::size_t>(node_id)].value = mean;

    if (depth >= cfg_.max_depth ||
        static_cast<int>(rows.size()) < 2 * cfg_.min_leaf)
      return node_id;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_sse = std::numeric_limits<double>::infinity();

    const Eigen::Index d = x_.cols();
    std::vector<int> features;
    const int want = cfg_.feature_subsample;
    if (rng_ && want > 0 && want < static_cast<int>(d)) {
      std::vector<int> all(static_cast<std::size_t>(d));
      for (Eigen::Index j = 0; j < d; ++j) all[static_cast<std::size_t>(j)] = static_cast<int>(j);
      for (int i = 0; i < want; ++i) {
        const std::size_t pick = i + draw_below(*rng_, all.size() - static_cast<std::size_t>(i));
        std::swap(all[static_cast<std::size_t>(i)], all[pick]);
      }
      features.assign(all.begin(), all.begin() + want);
      std::sort(features.begin(), features.end());
    } else {
      for (Eigen::Index j = 0; j < d; ++j) features.push_back(static_cast<int>(j));
    }

    std::vector<std::pair<double, int>> order;
    order.reserve(rows.size());
    for (int feature : features) {
      order.clear();
      for (int r : rows) order.emplace_back(x_(r, feature), r);
      std::sort(order.begin(), order.end());
      // prefix scan of (count, sum, sum of squares)
      double left_sum = 0.0, left_sq = 0.0;
      double total_sum = 0.0, total_sq = 0.0;
      for (const auto& [v, r] : order) {
        total_sum += y_(r);
        total_sq += y_(r) * y_(r);
      }
      const int n = static_cast<int>(order.size());
      for (int i = 0; i < n - 1; ++i) {
        const double yv = y_(order[static_cast<std::size_t>(i)].second);
        left_sum += yv;
        left_sq += yv * yv;
        if (order[static_cast<std::size_t>(i)].first ==
            order[static_cast<std::size_t>(i + 1)].first)
          continue;
        const int nl = i + 1, nr = n - nl;
        if (nl < cfg_.min_leaf || nr < cfg_.min_leaf) continue;
        const double right_sum = total_sum - left_sum;
        const double right_sq = total_sq - left_sq;
        const double sse = (left_sq - left_sum * left_sum / nl) +
                           (right_sq - right_sum * right_sum / nr);
        if (sse < best_sse) {
          best_sse = sse;
          best_feature = feature;
          best_threshold = 0.5 * (order[static_cast<std::size_t>(i)].first +
                                  order[static_cast<std::size_t>(i + 1)].first);
        }
      }
    }

    if (best_feature < 0) return node_id;

    std::vector<int> left_rows, right_rows;
    for (int r : rows) {
      (x_(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left = grow(std::move(left_rows), depth + 1, tree);
    const int right = grow(std::move(right_rows), depth + 1, tree);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return node_id;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  CartConfig cfg_;
  std::mt19937_64* rng_;
};

TreeParams fit_tree(const Standardized& s, const CartConfig& cfg,
                    std::mt19937_64* rng, std::vector<int> rows) {
  // Trees predict the raw target; fold the centering back in.
  CartBuilder builder(s.x, s.yc, cfg, rng);
  return builder.build(std::move(rows));
}

double tree_value(const TreeParams& tree, const Eigen::VectorXd& z) {
  int node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    node = z(n.feature) <= n.threshold ? n.left : n.right;
  }
  return tree.nodes[static_cast<std::size_t>(node)].value;
}

// --- KNN -------------------------------------------------------------------------

KnnParams fit_knn(const Standardized& s, const Dataset& train, int k) {
  if (k < 1) throw Error("knn requires k >= 1");
  KnnParams p;
  p.n = train.rows.size();
  p.d = train.dim();
  p.k = k;
  p.x.resize(p.n * p.d);
  p.y.resize(p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < p.d; ++j)
      p.x[i * p.d + j] = s.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    p.y[i] = train.rows[i].y;
  }
  return p;
}

}  // namespace

// --- fit / predict -----------------------------------------------------------------

TrainedModel fit(ModelKind kind, const Dataset& train, const Hyper& hyper) {
  train.validate();
  TrainedModel model;
  model.kind = kind;
  model.hyper = resolve_hyper(kind, train.dim(), hyper);
  Standardized s = standardize(train);
  model.mean = s.mean;
  model.stddev = s.stddev;

  switch (kind) {
    case ModelKind::OLS_ASIC_POWER:
      model.params = fit_ols_single(s, kFeatureAsicPower);
      break;
    case ModelKind::OLS_ASIC_LATENCY:
      model.params = fit_ols_single(s, kFeatureAsicDelay);
      break;
    case ModelKind::OLS_ASIC_AREA:
      model.params = fit_ols_single(s, kFeatureAsicArea);
      break;
    case ModelKind::RIDGE:
      model.params = fit_ridge(s, hyper_at(model.hyper, "penalty"));
      break;
    case ModelKind::BAYESIAN_RIDGE:
      model.params = fit_bayesian_ridge(
          s, static_cast<int>(hyper_at(model.hyper, "max_iter", 300)),
          hyper_at(model.hyper, "tol", 1e-6));
      break;
    case ModelKind::PLS:
      model.params =
          fit_pls(s, static_cast<int>(hyper_at(model.hyper, "n_components", 4)));
      break;
    case ModelKind::KERNEL_RIDGE:
      model.params = fit_kernel_ridge(s, hyper_at(model.hyper, "penalty", 1.0),
                                      hyper_at(model.hyper, "bandwidth", 0.0));
      break;
    case ModelKind::KNN:
      model.params = fit_knn(s, train, static_cast<int>(hyper_at(model.hyper, "k", 5)));
      break;
    case ModelKind::DECISION_TREE: {
      CartConfig cfg;
      cfg.max_depth = static_cast<int>(hyper_at(model.hyper, "max_depth", 8));
      cfg.min_leaf = static_cast<int>(hyper_at(model.hyper, "min_leaf", 3));
      if (cfg.min_leaf < 1) throw Error("min_leaf must be at least 1");
      if (cfg.max_depth < 0) throw Error("max_depth must be non-negative");
      std::vector<int> rows(train.rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
      TreeParams tree = fit_tree(s, cfg, nullptr, std::move(rows));
      for (TreeNode& n : tree.nodes) n.value += s.y_mean;
      model.params = std::move(tree);
      break;
    }
    case ModelKind::RANDOM_FOREST: {
      CartConfig cfg;
      cfg.max_depth = static_cast<int>(hyper_at(model.hyper, "max_depth", 8));
      cfg.min_leaf = static_cast<int>(hyper_at(model.hyper, "min_leaf", 3));
      cfg.feature_subsample =
          static_cast<int>(hyper_at(model.hyper, "feature_subsample", 0));
      if (cfg.min_leaf < 1) throw Error("min_leaf must be at least 1");
      const int n_trees = static_cast<int>(hyper_at(model.hyper, "n_trees", 50));
      if (n_trees < 1) throw Error("n_trees must be at least 1");
      const bool bootstrap = hyper_at(model.hyper, "bootstrap", 1.0) != 0.0;
      const auto seed = static_cast<std::uint64_t>(hyper_at(model.hyper, "seed", 0.0));
      const std::size_t n = train.rows.size();
      ForestParams forest;
      forest.trees.reserve(static_cast<std::size_t>(n_trees));
      // One seeded stream per tree, so parallel and serial fits agree.
      for (int t = 0; t < n_trees; ++t) {
        std::mt19937_64 rng(sub_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<int> rows(n);
        if (bootstrap) {
          for (std::size_t i = 0; i < n; ++i)
            rows[i] = static_cast<int>(draw_below(rng, n));
        } else {
          for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<int>(i);
        }
        TreeParams tree = fit_tree(s, cfg, &rng, std::move(rows));
        for (TreeNode& node : tree.nodes) node.value += s.y_mean;
        forest.trees.push_back(std::move(tree));
      }
      model.params = std::move(forest);
      break;
    }
  }
  return model;
}

double predict(const TrainedModel& model, std::span<const double> features) {
  const Eigen::VectorXd z = apply_standardization(model, features);
  if (const auto* lin = std::get_if<LinearParams>(&model.params)) {
    double acc = lin->intercept;
    for (std::size_t j = 0; j < lin->weights.size(); ++j)
      acc += lin->weights[j] * z(static_cast<Eigen::Index>(j));
    return acc;
  }
  if (const auto* krr = std::get_if<KernelRidgeParams>(&model.params)) {
    const double inv = 1.0 / (2.0 * krr->bandwidth * krr->bandwidth);
    double acc = krr->intercept;
    for (std::size_t i = 0; i < krr->n; ++i) {
      double sq = 0.0;
      for (std::size_t j = 0; j < krr->d; ++j) {
        const double diff = z(static_cast<Eigen::Index>(j)) - krr->x[i * krr->d + j];
        sq += diff * diff;
      }
      acc += krr->alpha[i] * std::exp(-sq * inv);
    }
    return acc;
  }
  if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(knn->n);
    for (std::size_t i = 0; i < knn->n; ++i) {
      double sq = 0.0;
      for (std::size_t j = 0; j < knn->d; ++j) {
        const double diff = z(static_cast<Eigen::Index>(j)) - knn->x[i * knn->d + j];
        sq += diff * diff;
      }
      dist.emplace_back(sq, i);
    }
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(knn->k), knn->n);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                      dist.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += knn->y[dist[i].second];
    return acc / static_cast<double>(k);
  }
  if (const auto* tree = std::get_if<TreeParams>(&model.params)) {
    return tree_value(*tree, z);
  }
  const auto& forest = std::get<ForestParams>(model.params);
  double acc = 0.0;
  for (const TreeParams& tree : forest.trees) acc += tree_value(tree, z);
  return acc / static_cast<double>(forest.trees.size());
}

// --- ranking -----------------------------------------------------------------------

std::vector<TrainedModel> rank_models(
    std::span<const ModelKind> kinds, const Dataset& train, const Dataset& valid,
    std::size_t top_k, const Hyper& base_hyper,
    std::vector<std::pair<ModelKind, double>>* scores,
    std::vector<std::string>* diagnostics) {
  if (top_k < 1) throw Error("top_k must be at least 1");
  valid.validate();

  std::vector<TrainedModel> fitted;
  for (ModelKind kind : kinds) {
    try {
      TrainedModel model = fit(kind, train, filter_hyper(kind, train.dim(), base_hyper));
      std::map<std::string, double> est, mes;
      for (const DataRow& row : valid.rows) {
        est[row.id] = predict(model, row.x);
        mes[row.id] = row.y;
      }
      model.fidelity = fidelity(est, mes);
      if (scores) scores->emplace_back(kind, *model.fidelity);
      fitted.push_back(std::move(model));
    } catch (const Error& e) {
      if (diagnostics)
        diagnostics->push_back(std::string(to_string(kind)) + ": " + e.what());
    }
  }
  if (fitted.empty()) throw Error("every model kind failed to fit");

  std::stable_sort(fitted.begin(), fitted.end(),
                   [](const TrainedModel& a, const TrainedModel& b) {
                     if (*a.fidelity != *b.fidelity) return *a.fidelity > *b.fidelity;
                     return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                   });
  if (fitted.size() > top_k) fitted.resize(top_k);
  return fitted;
}

// --- persistence --------------------------------------------------------------------

namespace {

nlohmann::json params_to_json(const ModelParams& params) {
  nlohmann::json j;
  if (const auto* lin = std::get_if<LinearParams>(&params)) {
    j["type"] = "linear";
    j["weights"] = lin->weights;
    j["intercept"] = lin->intercept;
  } else if (const auto* krr = std::get_if<KernelRidgeParams>(&params)) {
    j["type"] = "kernel_ridge";
    j["n"] = krr->n;
    j["d"] = krr->d;
    j["x"] = krr->x;
    j["alpha"] = krr->alpha;
    j["bandwidth"] = krr->bandwidth;
    j["intercept"] = krr->intercept;
  } else if (const auto* knn = std::get_if<KnnParams>(&params)) {
    j["type"] = "knn";
    j["n"] = knn->n;
    j["d"] = knn->d;
    j["x"] = knn->x;
    j["y"] = knn->y;
    j["k"] = knn->k;
  } else if (const auto* tree = std::get_if<TreeParams>(&params)) {
    j["type"] = "tree";
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : tree->nodes)
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"value", n.value}});
    j["nodes"] = std::move(nodes);
  } else {
    const auto& forest = std::get<ForestParams>(params);
    j["type"] = "forest";
    nlohmann::json trees = nlohmann::json::array();
    for (const TreeParams& t : forest.trees)
      trees.push_back(params_to_json(ModelParams(t)));
    j["trees"] = std::move(trees);
  }
  return j;
}

TreeParams tree_from_json(const nlohmann::json& j) {
  TreeParams tree;
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.value = n.at("value").get<double>();
    tree.nodes.push_back(node);
  }
  return tree;
}

ModelParams params_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "linear") {
    LinearParams p;
    p.weights = j.at("weights").get<std::vector<double>>();
    p.intercept = j.at("intercept").get<double>();
    return p;
  }
  if (type == "kernel_ridge") {
    KernelRidgeParams p;
    p.n = j.at("n").get<std::size_t>();
    p.d = j.at("d").get<std::size_t>();
    p.x = j.at("x").get<std::vector<double>>();
    p.alpha = j.at("alpha").get<std::vector<double>>();
    p.bandwidth = j.at("bandwidth").get<double>();
    p.intercept = j.at("intercept").get<double>();
    return p;
  }
  if (type == "knn") {
    KnnParams p;
    p.n = j.at("n").get<std::size_t>();
    p.d = j.at("d").get<std::size_t>();
    p.x = j.at("x").get<std::vector<double>>();
    p.y = j.at("y").get<std::vector<double>>();
    p.k = j.at("k").get<int>();
    return p;
  }
  if (type == "tree") return tree_from_json(j);
  if (type == "forest") {
    ForestParams forest;
    for (const auto& t : j.at("trees")) forest.trees.push_back(tree_from_json(t));
    return forest;
  }
  throw Error("unknown model parameter type '" + type + "'");
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["kind"] = to_string(model.kind);
  j["hyper"] = model.hyper;
  j["standardization"] = {{"mean", model.mean}, {"stddev", model.stddev}};
  j["parameters"] = params_to_json(model.params);
  if (model.fidelity)
    j["fidelity"] = *model.fidelity;
  else
    j["fidelity"] = nullptr;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed model file: " + std::string(e.what()));
  }
  TrainedModel model;
  model.kind = model_kind_from_string(j.at("kind").get<std::string>());
  model.hyper = j.at("hyper").get<Hyper>();
  model.mean = j.at("standardization").at("mean").get<std::vector<double>>();
  model.stddev = j.at("standardization").at("stddev").get<std::vector<double>>();
  model.params = params_from_json(j.at("parameters"));
  if (!j.at("fidelity").is_null()) model.fidelity = j.at("fidelity").get<double>();
  return model;
}

}  // namespace axdse
