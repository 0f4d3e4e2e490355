#include "axdse/autoax.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_map>

#include "axdse/rng.hpp"
#include "csv_util.hpp"

namespace axdse {

std::vector<Configuration> sample_random(std::size_t n,
                                         const AcceleratorTemplate& tmpl,
                                         const ComponentPalette& palette,
                                         std::uint64_t seed) {
  if (n < 1) throw Error("sample count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<Configuration> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    Configuration cfg;
    cfg.assign.reserve(tmpl.nodes.size());
    for (const TemplateNode& node : tmpl.nodes) {
      const auto& pal = palette.role(node.role);
      cfg.assign.push_back(static_cast<int>(draw_below(rng, pal.size())));
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<double> config_features(const Configuration& cfg,
                                    const AcceleratorTemplate& tmpl,
                                    const ComponentPalette& palette) {
  std::vector<double> x;
  x.reserve(tmpl.nodes.size() * 4);
  for (std::size_t i = 0; i < tmpl.nodes.size(); ++i) {
    const PaletteEntry& e =
        palette.role(tmpl.nodes[i].role)[static_cast<std::size_t>(cfg.assign[i])];
    x.push_back(e.med_norm_pct);
    x.push_back(static_cast<double>(e.cost.luts));
    x.push_back(e.cost.power_mw);
    x.push_back(e.cost.latency_ns);
  }
  return x;
}

Estimators fit_estimators(std::span<const EvaluatedConfig> evaluated,
                          const AcceleratorTemplate& tmpl,
                          const ComponentPalette& palette, ModelKind kind,
                          const Hyper& hyper) {
  if (evaluated.size() < 20)
    throw Error("estimator fitting needs at least 20 evaluated samples");

  auto make_dataset = [&](const char* target_name, auto&& get) {
    Dataset ds;
    ds.target_name = target_name;
    for (std::size_t i = 0; i < evaluated.size(); ++i) {
      DataRow row;
      // Duplicate sampled configurations are legal; the row id only needs to
      // be unique within the dataset.
      row.id = std::to_string(i) + ":" + config_to_string(evaluated[i].config);
      row.x = config_features(evaluated[i].config, tmpl, palette);
      row.y = get(evaluated[i]);
      ds.rows.push_back(std::move(row));
    }
    return ds;
  };

  Estimators est;
  est.ssim_model = fit(
      kind, make_dataset("ssim", [](const EvaluatedConfig& e) { return e.ssim; }),
      hyper);
  for (CostTarget target :
       {CostTarget::luts, CostTarget::latency_ns, CostTarget::power_mw}) {
    est.cost_models.emplace(
        target, fit(kind,
                    make_dataset(to_string(target),
                                 [target](const EvaluatedConfig& e) {
                                   return cost_field(e.cost, target);
                                 }),
                    hyper));
  }
  return est;
}

std::array<double, 2> estimated_objectives(const Estimators& est,
                                           CostTarget target,
                                           const Configuration& cfg,
                                           const AcceleratorTemplate& tmpl,
                                           const ComponentPalette& palette) {
  const std::vector<double> x = config_features(cfg, tmpl, palette);
  const double qor_loss = 1.0 - predict(est.ssim_model, x);
  const double cost = predict(est.cost_models.at(target), x);
  return {qor_loss, cost};
}

namespace {

bool obj_dominates(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

struct ArchiveEntry {
  Configuration config;
  std::array<double, 2> obj;
};

// Dominance-archive insertion. Children identical to an existing member are
// dropped so degenerate palettes keep a single entry.
void archive_insert(std::vector<ArchiveEntry>& archive, ArchiveEntry child) {
  for (const ArchiveEntry& e : archive) {
    if (e.config == child.config) return;
    if (obj_dominates(e.obj, child.obj)) return;
  }
  std::erase_if(archive, [&](const ArchiveEntry& e) {
    return obj_dominates(child.obj, e.obj);
  });
  archive.push_back(std::move(child));
}

}  // namespace

std::vector<Configuration> hill_climb(const Estimators& est, CostTarget target,
                                      const AcceleratorTemplate& tmpl,
                                      const ComponentPalette& palette,
                                      std::size_t budget, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto objectives = [&](const Configuration& cfg) {
    return estimated_objectives(est, target, cfg, tmpl, palette);
  };

  std::vector<ArchiveEntry> archive;
  Configuration random_seed_cfg;
  for (const TemplateNode& node : tmpl.nodes) {
    random_seed_cfg.assign.push_back(
        static_cast<int>(draw_below(rng, palette.role(node.role).size())));
  }
  archive_insert(archive, {random_seed_cfg, objectives(random_seed_cfg)});
  const Configuration exact = all_exact_config(tmpl);
  archive_insert(archive, {exact, objectives(exact)});

  for (std::size_t step = 0; step < budget; ++step) {
    const ArchiveEntry& parent = archive[draw_below(rng, archive.size())];
    Configuration child = parent.config;
    const std::size_t node = draw_below(rng, tmpl.nodes.size());
    const std::size_t pal_size = palette.role(tmpl.nodes[node].role).size();
    if (pal_size > 1) {
      // Uniform choice among the other palette indices.
      int pick = static_cast<int>(draw_below(rng, pal_size - 1));
      if (pick >= child.assign[node]) ++pick;
      child.assign[node] = pick;
    }
    archive_insert(archive, {child, objectives(child)});
  }

  std::vector<Configuration> out;
  out.reserve(archive.size());
  for (ArchiveEntry& e : archive) out.push_back(std::move(e.config));
  return out;
}

std::vector<Configuration> random_search(const Estimators& est, CostTarget target,
                                         const AcceleratorTemplate& tmpl,
                                         const ComponentPalette& palette,
                                         std::size_t budget, std::uint64_t seed) {
  if (budget < 1) throw Error("search budget must be at least 1");
  const std::vector<Configuration> samples =
      sample_random(budget, tmpl, palette, seed);
  std::vector<ArchiveEntry> archive;
  for (const Configuration& cfg : samples) {
    archive_insert(archive,
                   {cfg, estimated_objectives(est, target, cfg, tmpl, palette)});
  }
  std::vector<Configuration> out;
  out.reserve(archive.size());
  for (ArchiveEntry& e : archive) out.push_back(std::move(e.config));
  return out;
}

FinalizeResult finalize(std::span<const Configuration> archive,
                        const FilterContext& ctx) {
  if (archive.empty()) throw Error("cannot finalize an empty archive");
  FinalizeResult result;
  result.evaluated.reserve(archive.size());
  std::unordered_map<std::string, bool> seen;
  for (const Configuration& cfg : archive) {
    if (!seen.emplace(config_to_string(cfg), true).second) continue;
    result.evaluated.push_back(ctx.evaluate(cfg));
  }

  for (CostTarget target :
       {CostTarget::luts, CostTarget::latency_ns, CostTarget::power_mw}) {
    std::vector<Point> points;
    points.reserve(result.evaluated.size());
    for (const EvaluatedConfig& e : result.evaluated) {
      points.push_back({config_to_string(e.config),
                        {1.0 - e.ssim, cost_field(e.cost, target)}});
    }
    result.fronts[target] = pareto_front(points);
  }
  return result;
}

FinalizeResult finalize(std::span<const Configuration> archive,
                        const AcceleratorTemplate& tmpl,
                        const ComponentPalette& palette,
                        std::span<const Image> images) {
  FilterContext ctx(tmpl, palette, std::vector<Image>(images.begin(), images.end()));
  return finalize(archive, ctx);
}

void save_autoax_front_csv(const FinalizeResult& result, CostTarget target,
                           const std::filesystem::path& path) {
  const auto it = result.fronts.find(target);
  if (it == result.fronts.end()) throw Error("no front for the requested target");
  std::unordered_map<std::string, const EvaluatedConfig*> by_id;
  for (const EvaluatedConfig& e : result.evaluated)
    by_id.emplace(config_to_string(e.config), &e);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "config,ssim,fpga_luts,fpga_latency_ns,fpga_power_mw\n";
  for (const Point& p : it->second.points) {
    const EvaluatedConfig& e = *by_id.at(p.id);
    out << p.id << ',' << detail::format_double(e.ssim) << ',' << e.cost.luts
        << ',' << detail::format_double(e.cost.latency_ns) << ','
        << detail::format_double(e.cost.power_mw) << '\n';
  }
}

}  // namespace axdse
