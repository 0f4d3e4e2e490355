// axdse: approximate-circuit design-space exploration toolkit.
//
// Subcommands: gen-lib, measure, explore, report, autoax.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "axdse/autoax.hpp"
#include "axdse/explore.hpp"
#include "axdse/library_gen.hpp"
#include "axdse/rng.hpp"

namespace fs = std::filesystem;
using namespace axdse;

namespace {

struct GenLibArgs {
  std::string base = "multiplier";
  int bits = 8;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::string out;
};

int run_gen_lib(const GenLibArgs& a) {
  Netlist base;
  if (a.base == "adder")
    base = build_exact_adder(a.bits);
  else if (a.base == "multiplier")
    base = build_exact_multiplier(a.bits);
  else
    throw Error("unknown base '" + a.base + "' (expected adder or multiplier)");
  const auto lib = gen_library(base, a.count, a.seed);
  save_library(lib, a.out);
  std::cout << "wrote " << lib.size() << " circuits to " << a.out
            << " (reference: " << lib[0].name << ")\n";
  return 0;
}

struct MeasureArgs {
  std::string lib;
  int k = 6;
  std::string out = "measurements.csv";
  std::string oracle_config;
};

int run_measure(const MeasureArgs& a) {
  const auto library = load_library(fs::path(a.lib) / "manifest.json");
  if (library.empty()) throw Error("library is empty");
  const OracleConfig cfg =
      a.oracle_config.empty() ? OracleConfig{} : load_oracle_config(a.oracle_config);
  const ExactOutputs exact(library[0]);
  std::vector<Measurement> rows;
  rows.reserve(library.size());
  for (const Netlist& nl : library) rows.push_back(measure(nl, exact, a.k, cfg));
  save_measurements(rows, a.out);
  std::cout << "measured " << rows.size() << " circuits against " << library[0].name
            << " -> " << a.out << "\n";
  return 0;
}

struct ExploreArgs {
  std::string lib;
  std::string config;
  std::string out;
  bool with_ground_truth = false;
};

int run_explore(const ExploreArgs& a) {
  const auto library = load_library(fs::path(a.lib) / "manifest.json");
  if (library.empty()) throw Error("library is empty");
  const ExplorationConfig cfg = a.config.empty()
                                    ? ExplorationConfig{}
                                    : load_exploration_config(a.config);
  ExplorationReport report = run_exploration(library, library[0], cfg);
  if (a.with_ground_truth) {
    const GroundTruth gt = ground_truth(library, library[0], cfg);
    attach_ground_truth(report, gt);
  }
  export_report(report, a.out);
  std::cout << "explored " << report.library_size << " circuits with "
            << report.oracle_invocations << " oracle invocations (reduction "
            << report.reduction_factor << "x); report in " << a.out << "\n";
  return 0;
}

struct ReportArgs {
  std::string in;
};

int run_report(const ReportArgs& a) {
  std::ifstream in(fs::path(a.in) / "report.json");
  if (!in) throw Error("cannot open " + a.in + "/report.json");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed report.json: " + std::string(e.what()));
  }

  std::printf("library size        %zu\n", j.at("library_size").get<std::size_t>());
  std::printf("measured subset     %zu\n", j.at("subset_ids").size());
  std::printf("oracle invocations  %zu\n",
              j.at("oracle_invocations").get<std::size_t>());
  std::printf("reduction factor    %.2fx\n", j.at("reduction_factor").get<double>());
  std::printf("\n%-18s %-18s %-10s %s\n", "target", "model", "fidelity", "kept");
  for (const auto& [target, scores] : j.at("model_fidelity").items()) {
    const auto& front = j.at("final_fronts").at(target);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const auto& s = scores[i];
      std::printf("%-18s %-18s %8.4f   %s\n", i == 0 ? target.c_str() : "",
                  s.at("model").get<std::string>().c_str(),
                  s.at("fidelity").get<double>(), i < 3 ? "*" : "");
    }
    std::printf("%-18s final front: %zu points\n", "",
                front.at("points").size());
    if (j.contains("coverage") && j.at("coverage").contains(target))
      std::printf("%-18s coverage: %.3f\n", "",
                  j.at("coverage").at(target).get<double>());
  }
  return 0;
}

struct AutoaxArgs {
  std::string palette_dir;
  std::string images_dir;
  int synthetic = 0;
  std::size_t budget = 2000;
  std::size_t samples = 500;
  std::uint64_t seed = 1;
  std::string out;
  int k = 6;
  std::size_t mult_palette = 9;
  std::size_t add_palette = 8;
  double mult_med_cap = 1.0;
  double add_med_cap = 0.05;
};

int run_autoax(const AutoaxArgs& a) {
  const auto mult_lib = load_library(fs::path(a.palette_dir) / "mult_manifest.json");
  const auto add_lib = load_library(fs::path(a.palette_dir) / "add_manifest.json");
  ComponentPalette palette = build_palette(mult_lib, add_lib, a.k);
  select_pareto(palette, a.mult_palette, a.add_palette, a.mult_med_cap,
                a.add_med_cap);

  std::vector<Image> images;
  if (a.synthetic > 0) {
    for (int i = 0; i < a.synthetic; ++i)
      images.push_back(synthetic_image(64, 64, a.seed + static_cast<std::uint64_t>(i)));
  } else {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.images_dir)) {
      if (entry.path().extension() == ".pgm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) images.push_back(load_pgm(f));
    if (images.empty()) throw Error("no .pgm images in " + a.images_dir);
  }

  const AcceleratorTemplate tmpl = default_gaussian_template();
  FilterContext ctx(tmpl, palette, images);

  const auto sample_cfgs = sample_random(a.samples, tmpl, palette, sub_seed(a.seed, 1));
  std::vector<EvaluatedConfig> evaluated;
  evaluated.reserve(sample_cfgs.size());
  for (const Configuration& cfg : sample_cfgs) evaluated.push_back(ctx.evaluate(cfg));
  const Estimators est = fit_estimators(evaluated, tmpl, palette);

  fs::create_directories(a.out);
  nlohmann::json archives;
  const double space =
      std::pow(static_cast<double>(palette.mult.size()), 9.0) *
      std::pow(static_cast<double>(palette.add.size()), 8.0);
  archives["palette"] = {{"mult", palette.mult.size()},
                         {"add", palette.add.size()},
                         {"design_space_size", space}};
  std::printf("palette: %zu multipliers, %zu adders; design space %.3g points\n",
              palette.mult.size(), palette.add.size(), space);

  for (CostTarget target :
       {CostTarget::luts, CostTarget::latency_ns, CostTarget::power_mw}) {
    const auto hill =
        hill_climb(est, target, tmpl, palette, a.budget, sub_seed(a.seed, 2));
    const auto rand =
        random_search(est, target, tmpl, palette, a.budget, sub_seed(a.seed, 3));
    const FinalizeResult hill_fin = finalize(hill, ctx);
    const FinalizeResult rand_fin = finalize(rand, ctx);
    const std::string name = to_string(target);
    save_autoax_front_csv(hill_fin, target, fs::path(a.out) / ("autoax_front_" + name + ".csv"));
    save_autoax_front_csv(rand_fin, target,
                          fs::path(a.out) / ("random_front_" + name + ".csv"));

    nlohmann::json h = nlohmann::json::array(), r = nlohmann::json::array();
    for (const Configuration& c : hill) h.push_back(config_to_string(c));
    for (const Configuration& c : rand) r.push_back(config_to_string(c));
    archives[name] = {{"hill_climb", std::move(h)}, {"random_search", std::move(r)}};
    std::printf("%-16s hill-climb front %zu points, random front %zu points\n",
                name.c_str(), hill_fin.fronts.at(target).size(),
                rand_fin.fronts.at(target).size());
  }
  std::ofstream out(fs::path(a.out) / "archives.json", std::ios::binary);
  if (!out) throw Error("cannot write archives.json");
  out << archives.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximate-circuit design-space exploration toolkit"};
  app.require_subcommand(1);

  GenLibArgs gen;
  auto* gen_cmd = app.add_subcommand(
      "gen-lib", "generate a library of approximate variants");
  gen_cmd->add_option("--base", gen.base, "adder|multiplier")->required();
  gen_cmd->add_option("--bits", gen.bits, "operand bit-width")->required();
  gen_cmd->add_option("--count", gen.count, "library size")->required();
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--out", gen.out, "output directory")->required();

  MeasureArgs meas;
  auto* meas_cmd =
      app.add_subcommand("measure", "measure every circuit in a library");
  meas_cmd->add_option("--lib", meas.lib, "library directory")->required();
  meas_cmd->add_option("--k", meas.k, "LUT input size (2-6)");
  meas_cmd->add_option("--out", meas.out, "output CSV");
  meas_cmd->add_option("--oracle", meas.oracle_config, "oracle constants JSON");

  ExploreArgs expl;
  auto* expl_cmd =
      app.add_subcommand("explore", "run the surrogate-guided exploration");
  expl_cmd->add_option("--lib", expl.lib, "library directory")->required();
  expl_cmd->add_option("--config", expl.config, "exploration config JSON");
  expl_cmd->add_option("--out", expl.out, "output directory")->required();
  expl_cmd->add_flag("--ground-truth", expl.with_ground_truth,
                     "also measure everything for coverage");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "print an exploration summary");
  rep_cmd->add_option("--in", rep.in, "report directory")->required();

  AutoaxArgs ax;
  auto* ax_cmd = app.add_subcommand(
      "autoax", "compose components into a Gaussian-filter accelerator");
  ax_cmd->add_option("--palette-dir", ax.palette_dir,
                     "directory with mult_manifest.json and add_manifest.json")
      ->required();
  ax_cmd->add_option("--images", ax.images_dir, "directory of .pgm images");
  ax_cmd->add_option("--synthetic", ax.synthetic,
                     "use N seeded synthetic images instead");
  ax_cmd->add_option("--budget", ax.budget, "search evaluations");
  ax_cmd->add_option("--samples", ax.samples, "estimator training samples");
  ax_cmd->add_option("--seed", ax.seed, "RNG seed");
  ax_cmd->add_option("--k", ax.k, "LUT input size (2-6)");
  ax_cmd->add_option("--mult-palette", ax.mult_palette, "multiplier palette size");
  ax_cmd->add_option("--add-palette", ax.add_palette, "adder palette size");
  ax_cmd->add_option("--mult-med-cap", ax.mult_med_cap,
                     "max multiplier med_norm_pct admitted to the palette");
  ax_cmd->add_option("--add-med-cap", ax.add_med_cap,
                     "max adder med_norm_pct admitted to the palette");
  ax_cmd->add_option("--out", ax.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen_cmd->parsed()) return run_gen_lib(gen);
    if (meas_cmd->parsed()) return run_measure(meas);
    if (expl_cmd->parsed()) return run_explore(expl);
    if (rep_cmd->parsed()) return run_report(rep);
    if (ax_cmd->parsed()) {
      if (ax.images_dir.empty() && ax.synthetic <= 0) {
        std::cerr << "autoax: provide --images DIR or --synthetic N\n";
        return 1;
      }
      return run_autoax(ax);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
