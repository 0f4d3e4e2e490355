#include "axdse/explore.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "axdse/rng.hpp"
#include "csv_util.hpp"

namespace axdse {

const char* to_string(CostTarget t) {
  switch (t) {
    case CostTarget::luts:
      return "fpga_luts";
    case CostTarget::latency_ns:
      return "fpga_latency_ns";
    default:
      return "fpga_power_mw";
  }
}

CostTarget cost_target_from_string(const std::string& s) {
  if (s == "fpga_luts") return CostTarget::luts;
  if (s == "fpga_latency_ns") return CostTarget::latency_ns;
  if (s == "fpga_power_mw") return CostTarget::power_mw;
  throw Error("unknown cost target '" + s + "'");
}

double cost_field(const FpgaCost& c, CostTarget t) {
  switch (t) {
    case CostTarget::luts:
      return static_cast<double>(c.luts);
    case CostTarget::latency_ns:
      return c.latency_ns;
    default:
      return c.power_mw;
  }
}

namespace {

double error_field(const ErrorReport& e, const std::string& name) {
  if (name == "med_raw") return e.med_raw;
  if (name == "med_norm_pct") return e.med_norm_pct;
  if (name == "worst_case") return e.worst_case;
  if (name == "error_rate") return e.error_rate;
  throw Error("unknown error objective '" + name + "'");
}

}  // namespace

void ExplorationConfig::validate() const {
  if (!(sample_fraction > 0.0 && sample_fraction < 1.0))
    throw Error("sample_fraction must lie strictly between 0 and 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error("train_fraction must lie strictly between 0 and 1");
  if (front_count < 1) throw Error("front_count must be at least 1");
  if (top_k < 1) throw Error("top_k must be at least 1");
  if (targets.empty()) throw Error("targets must be non-empty");
  if (lut_k < 2 || lut_k > 6) throw Error("lut_k out of range [2,6]");
  error_field(ErrorReport{}, error_objective);  // validates the name
}

ExplorationConfig load_exploration_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed config: " + std::string(e.what()));
  }
  ExplorationConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "sample_fraction")
      cfg.sample_fraction = value.get<double>();
    else if (key == "train_fraction")
      cfg.train_fraction = value.get<double>();
    else if (key == "front_count")
      cfg.front_count = value.get<int>();
    else if (key == "top_k")
      cfg.top_k = value.get<int>();
    else if (key == "targets") {
      cfg.targets.clear();
      for (const auto& t : value)
        cfg.targets.push_back(cost_target_from_string(t.get<std::string>()));
    } else if (key == "error_objective")
      cfg.error_objective = value.get<std::string>();
    else if (key == "lut_k")
      cfg.lut_k = value.get<int>();
    else if (key == "seed")
      cfg.seed = value.get<std::uint64_t>();
    else if (key == "perfect_predictor")
      cfg.perfect_predictor = value.get<bool>();
    else if (key == "joint_peel")
      cfg.joint_peel = value.get<bool>();
    else if (key == "ground_truth_cap")
      cfg.ground_truth_cap = value.get<std::size_t>();
    else
      throw Error("unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

namespace {

nlohmann::json config_to_json(const ExplorationConfig& cfg) {
  nlohmann::json targets = nlohmann::json::array();
  for (CostTarget t : cfg.targets) targets.push_back(to_string(t));
  return nlohmann::json{{"sample_fraction", cfg.sample_fraction},
                        {"train_fraction", cfg.train_fraction},
                        {"front_count", cfg.front_count},
                        {"top_k", cfg.top_k},
                        {"targets", std::move(targets)},
                        {"error_objective", cfg.error_objective},
                        {"lut_k", cfg.lut_k},
                        {"seed", cfg.seed},
                        {"perfect_predictor", cfg.perfect_predictor},
                        {"joint_peel", cfg.joint_peel},
                        {"ground_truth_cap", cfg.ground_truth_cap}};
}

}  // namespace

void save_exploration_config(const ExplorationConfig& cfg,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << config_to_json(cfg).dump(2) << '\n';
}

// --- pipeline ----------------------------------------------------------------

namespace {

struct LibraryIndex {
  std::vector<const Netlist*> circuits;
  std::unordered_map<std::string, std::size_t> by_id;
};

LibraryIndex index_library(std::span<const Netlist> library) {
  LibraryIndex idx;
  for (const Netlist& nl : library) {
    if (!idx.by_id.emplace(nl.name, idx.circuits.size()).second)
      throw Error("duplicate circuit id '" + nl.name + "' in library");
    idx.circuits.push_back(&nl);
  }
  return idx;
}

}  // namespace

ExplorationReport run_exploration(std::span<const Netlist> library,
                                  const Netlist& exact_ref,
                                  const ExplorationConfig& config) {
  config.validate();
  if (library.size() < 20) throw Error("library must contain at least 20 circuits");
  const LibraryIndex idx = index_library(library);
  const std::size_t n = library.size();

  ExplorationReport report;
  report.config = config;
  report.library_size = n;

  // (1) Sample ceil(fraction * n) distinct circuits.
  const auto subset_n = static_cast<std::size_t>(
      std::ceil(config.sample_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 sample_rng(sub_seed(config.seed, 0));
  shuffle_det(order, sample_rng);
  std::vector<std::size_t> subset(order.begin(),
                                  order.begin() + static_cast<std::ptrdiff_t>(subset_n));
  for (std::size_t i : subset) report.subset_ids.push_back(library[i].name);

  // (2) Measure the subset.
  const ExactOutputs exact_cache(exact_ref);
  std::unordered_map<std::string, Measurement> measured;
  for (std::size_t i : subset) {
    measured.emplace(library[i].name,
                     measure(library[i], exact_cache, config.lut_k));
  }

  // (3) Features and exact error objectives for the whole library. The error
  // metric comes from exhaustive behavioral simulation, which is cheap in
  // software; only the FPGA cost parameters are surrogate-estimated.
  std::vector<FeatureVector> features(n);
  std::vector<double> error_objective(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Netlist& nl = library[i];
    const Activity act = activity(nl);
    features[i] = featurize(nl, asic_cost(nl, {}, &act));
    error_objective[i] =
        error_field(error_metrics(nl, exact_cache), config.error_objective);
  }

  // Ground-truth hook values, when requested (never counted as invocations;
  // the hook models a hypothetically perfect estimator).
  std::unordered_map<std::string, Measurement> hook_values;
  if (config.perfect_predictor) {
    for (std::size_t i = 0; i < n; ++i)
      hook_values.emplace(library[i].name,
                          measure(library[i], exact_cache, config.lut_k));
  }

  // (4)-(6) Per target: split, fit, rank, predict, peel.
  // kept_predictions[target_index][model] -> per-circuit predictions.
  struct KeptModel {
    std::string name;
    std::vector<double> predictions;  // per library index
  };
  std::vector<std::vector<KeptModel>> kept_per_target(config.targets.size());

  const auto kinds = all_model_kinds();
  for (std::size_t ti = 0; ti < config.targets.size(); ++ti) {
    const CostTarget target = config.targets[ti];
    Dataset ds;
    ds.target_name = to_string(target);
    for (std::size_t i : subset) {
      const Netlist& nl = library[i];
      DataRow row;
      row.id = nl.name;
      row.x.assign(features[i].begin(), features[i].end());
      row.y = cost_field(measured.at(nl.name).fpga, target);
      ds.rows.push_back(std::move(row));
    }
    const auto [train, valid] =
        split(ds, config.train_fraction, sub_seed(config.seed, 1 + ti));

    std::vector<std::pair<ModelKind, double>> scores;
    Hyper base_hyper{{"seed", static_cast<double>(sub_seed(config.seed, 100 + ti))}};
    std::vector<TrainedModel> top =
        rank_models(kinds, train, valid, static_cast<std::size_t>(config.top_k),
                    base_hyper, &scores);

    std::stable_sort(scores.begin(), scores.end(),
                     [](const auto& a, const auto& b) {
                       if (a.second != b.second) return a.second > b.second;
                       return static_cast<int>(a.first) < static_cast<int>(b.first);
                     });
    auto& fid = report.model_fidelity[to_string(target)];
    for (const auto& [kind, f] : scores) fid.push_back({kind, f});

    for (const TrainedModel& model : top) {
      KeptModel kept;
      kept.name = to_string(model.kind);
      kept.predictions.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        kept.predictions[i] = config.perfect_predictor
                                  ? cost_field(hook_values.at(library[i].name).fpga,
                                               target)
                                  : predict(model, features[i]);
      }
      kept_per_target[ti].push_back(std::move(kept));
    }
  }

  // (6) Peel pseudo-fronts per (target, model), or jointly when configured.
  std::set<std::string> candidate_ids;
  auto peel_and_record = [&](const std::string& target_name,
                             const std::string& model_name,
                             const std::vector<std::vector<double>>& objectives) {
    std::vector<Point> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      points.push_back({library[i].name, objectives[i]});
    const auto fronts = peel_fronts(points, config.front_count);
    auto& levels = report.candidates[target_name][model_name];
    for (const Front& f : fronts) {
      std::vector<std::string> ids = f.ids();
      for (const std::string& id : ids) candidate_ids.insert(id);
      levels.push_back(std::move(ids));
    }
  };

  if (!config.joint_peel) {
    for (std::size_t ti = 0; ti < config.targets.size(); ++ti) {
      for (const auto& kept : kept_per_target[ti]) {
        std::vector<std::vector<double>> objs(n);
        for (std::size_t i = 0; i < n; ++i)
          objs[i] = {error_objective[i], kept.predictions[i]};
        peel_and_record(to_string(config.targets[ti]), kept.name, objs);
      }
    }
  } else {
    // Joint peeling combines, per rank r, the r-th ranked model of every
    // target into one (error, target_1, ..., target_T) objective space.
    std::size_t ranks = 0;
    for (const auto& kept : kept_per_target)
      ranks = std::max(ranks, kept.size());
    for (std::size_t r = 0; r < ranks; ++r) {
      std::vector<std::vector<double>> objs(n);
      std::string joint_name = "rank" + std::to_string(r + 1);
      for (std::size_t i = 0; i < n; ++i) {
        objs[i].push_back(error_objective[i]);
        for (std::size_t ti = 0; ti < config.targets.size(); ++ti) {
          const auto& kept = kept_per_target[ti];
          const auto& model = kept[std::min(r, kept.size() - 1)];
          objs[i].push_back(model.predictions[i]);
        }
      }
      peel_and_record("joint", joint_name, objs);
    }
  }

  // (7)+(8) Union with the measured subset, then measure what is missing.
  for (const std::string& id : candidate_ids) {
    if (measured.count(id)) continue;
    const Netlist& nl = *idx.circuits[idx.by_id.at(id)];
    measured.emplace(id, measure(nl, exact_cache, config.lut_k));
  }
  report.union_size = measured.size();
  report.oracle_invocations = measured.size();
  report.reduction_factor =
      static_cast<double>(n) / static_cast<double>(measured.size());

  // (9) Verified fronts per target, over measured values only.
  for (CostTarget target : config.targets) {
    std::vector<Point> points;
    points.reserve(measured.size());
    for (const auto& [id, m] : measured) {
      points.push_back(
          {id,
           {error_field(m.error, config.error_objective), cost_field(m.fpga, target)}});
    }
    report.final_fronts[to_string(target)] = pareto_front(points);
  }

  // (10) Assemble: measurements sorted by id, scatter data for measured ids.
  for (const auto& [id, m] : measured) report.measured.push_back(m);
  std::sort(report.measured.begin(), report.measured.end(),
            [](const Measurement& a, const Measurement& b) {
              return a.circuit_id < b.circuit_id;
            });
  for (std::size_t ti = 0; ti < config.targets.size(); ++ti) {
    const std::string target_name = to_string(config.targets[ti]);
    for (const auto& kept : kept_per_target[ti]) {
      auto& scatter = report.predictions[target_name][kept.name];
      for (const auto& [id, m] : measured) {
        scatter[id] = kept.predictions[idx.by_id.at(id)];
      }
    }
  }
  return report;
}

GroundTruth ground_truth(std::span<const Netlist> library, const Netlist& exact_ref,
                         const ExplorationConfig& config) {
  config.validate();
  if (library.size() > config.ground_truth_cap)
    throw Error("library exceeds the exhaustive ground-truth budget of " +
                std::to_string(config.ground_truth_cap));
  index_library(library);  // id uniqueness
  const ExactOutputs exact_cache(exact_ref);
  GroundTruth gt;
  gt.measurements.reserve(library.size());
  for (const Netlist& nl : library)
    gt.measurements.push_back(measure(nl, exact_cache, config.lut_k));
  for (CostTarget target : config.targets) {
    std::vector<Point> points;
    points.reserve(gt.measurements.size());
    for (const Measurement& m : gt.measurements) {
      points.push_back({m.circuit_id,
                        {error_field(m.error, config.error_objective),
                         cost_field(m.fpga, target)}});
    }
    gt.fronts[to_string(target)] = pareto_front(points);
  }
  return gt;
}

void attach_ground_truth(ExplorationReport& report, const GroundTruth& gt) {
  report.true_fronts = gt.fronts;
  report.coverage.clear();
  for (const auto& [target, front] : gt.fronts) {
    const auto it = report.final_fronts.find(target);
    if (it == report.final_fronts.end()) continue;
    report.coverage[target] = coverage(it->second.ids(), front);
  }
}

// --- export ------------------------------------------------------------------

namespace {

nlohmann::json front_to_json(const Front& f) {
  nlohmann::json points = nlohmann::json::array();
  for (const Point& p : f.points)
    points.push_back({{"id", p.id}, {"objectives", p.objectives}});
  return nlohmann::json{{"level", f.level}, {"points", std::move(points)}};
}

nlohmann::json measurement_to_json(const Measurement& m) {
  return nlohmann::json{
      {"circuit_id", m.circuit_id},
      {"error",
       {{"med_raw", m.error.med_raw},
        {"med_norm_pct", m.error.med_norm_pct},
        {"worst_case", m.error.worst_case},
        {"error_rate", m.error.error_rate}}},
      {"asic",
       {{"area_units", m.asic.area_units},
        {"delay_units", m.asic.delay_units},
        {"power_units", m.asic.power_units}}},
      {"fpga",
       {{"luts", m.fpga.luts},
        {"latency_ns", m.fpga.latency_ns},
        {"power_mw", m.fpga.power_mw}}}};
}

}  // namespace

std::string report_to_json(const ExplorationReport& report) {
  nlohmann::json j;
  j["config"] = config_to_json(report.config);
  j["library_size"] = report.library_size;
  j["subset_ids"] = report.subset_ids;
  {
    nlohmann::json fid;
    for (const auto& [target, scores] : report.model_fidelity) {
      nlohmann::json list = nlohmann::json::array();
      for (const ModelScore& s : scores)
        list.push_back({{"model", to_string(s.kind)},
                        {"ml_code", ml_code(s.kind)},
                        {"fidelity", s.fidelity}});
      fid[target] = std::move(list);
    }
    j["model_fidelity"] = std::move(fid);
  }
  j["candidates"] = report.candidates;
  j["predictions"] = report.predictions;
  j["union_size"] = report.union_size;
  j["oracle_invocations"] = report.oracle_invocations;
  j["reduction_factor"] = report.reduction_factor;
  {
    nlohmann::json fronts;
    for (const auto& [target, front] : report.final_fronts)
      fronts[target] = front_to_json(front);
    j["final_fronts"] = std::move(fronts);
  }
  {
    nlohmann::json rows = nlohmann::json::array();
    for (const Measurement& m : report.measured)
      rows.push_back(measurement_to_json(m));
    j["measured"] = std::move(rows);
  }
  if (!report.true_fronts.empty()) {
    nlohmann::json fronts;
    for (const auto& [target, front] : report.true_fronts)
      fronts[target] = front_to_json(front);
    j["true_fronts"] = std::move(fronts);
    j["coverage"] = report.coverage;
  }
  return j.dump(2) + "\n";
}

void export_report(const ExplorationReport& report,
                   const std::filesystem::path& directory) {
  report.config.validate();
  std::filesystem::create_directories(directory);
  {
    std::ofstream out(directory / "report.json", std::ios::binary);
    if (!out) throw Error("cannot write report.json");
    out << report_to_json(report);
  }
  for (const auto& [target, front] : report.final_fronts)
    save_front_csv(front, directory / ("front_" + target + ".csv"));
  for (const auto& [target, front] : report.true_fronts)
    save_front_csv(front, directory / ("true_front_" + target + ".csv"));
  save_measurements(report.measured, directory / "measurements.csv");

  std::unordered_map<std::string, const Measurement*> by_id;
  for (const Measurement& m : report.measured) by_id.emplace(m.circuit_id, &m);
  for (const auto& [target, models] : report.predictions) {
    const CostTarget t = cost_target_from_string(target);
    for (const auto& [model, scatter] : models) {
      std::ofstream out(directory / ("scatter_" + target + "_" + model + ".csv"),
                        std::ios::binary);
      if (!out) throw Error("cannot write scatter CSV");
      out << "circuit_id,estimated,measured\n";
      for (const auto& [id, est] : scatter) {
        out << id << ',' << detail::format_double(est) << ','
            << detail::format_double(cost_field(by_id.at(id)->fpga, t)) << '\n';
      }
    }
  }
}

}  // namespace axdse
