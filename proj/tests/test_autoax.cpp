#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "axdse/autoax.hpp"
#include "axdse/library_gen.hpp"
#include "oracles.hpp"

using namespace axdse;

namespace {

// Shared palette/template fixture; building the 16-bit adder palette is the
// expensive part, so it is constructed once.
struct Fixture {
  AcceleratorTemplate tmpl = default_gaussian_template();
  ComponentPalette palette;
  std::vector<Image> images;

  Fixture() {
    const Netlist mul8 = build_exact_multiplier(8);
    const Netlist add16 = build_exact_adder(16);
    palette = build_palette(gen_library(mul8, 20, 2024), gen_library(add16, 40, 7));
    select_pareto(palette, 6, 5);
    images.push_back(synthetic_image(48, 48, 1));
    images.push_back(synthetic_image(48, 48, 2));
  }
};

const Fixture& fixture() {
  static Fixture fx;
  return fx;
}

}  // namespace

TEST_CASE("pgm round trip in both encodings") {
  const Image img = synthetic_image(33, 17, 9);
  const auto dir = std::filesystem::temp_directory_path();
  for (bool binary : {true, false}) {
    const auto path = dir / (binary ? "axdse_t.pgm" : "axdse_t2.pgm");
    save_pgm(img, path, binary);
    const Image back = load_pgm(path);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.pixels == img.pixels);
    std::filesystem::remove(path);
  }
  CHECK_THROWS_AS(load_pgm(dir / "axdse_missing.pgm"), Error);
}

TEST_CASE("synthetic images are deterministic and non-flat") {
  const Image a = synthetic_image(32, 32, 5);
  const Image b = synthetic_image(32, 32, 5);
  CHECK(a.pixels == b.pixels);
  const Image c = synthetic_image(32, 32, 6);
  CHECK(a.pixels != c.pixels);
  std::set<std::uint8_t> values(a.pixels.begin(), a.pixels.end());
  CHECK(values.size() > 10);
}

TEST_CASE("ssim identity, symmetry, range and oracle agreement") {
  const Image a = synthetic_image(40, 40, 11);
  const Image b = synthetic_image(40, 40, 12);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  CHECK(ssim(a, b) < 1.0);
  CHECK(ssim(a, b) >= -1.0);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Image x = synthetic_image(24, 24, 100 + seed);
    const Image y = synthetic_image(24, 24, 200 + seed);
    CHECK(ssim(x, y) == doctest::Approx(oracles::ssim_reference(x, y)).epsilon(1e-9));
  }

  Image c100{16, 16, std::vector<std::uint8_t>(256, 100)};
  Image c110{16, 16, std::vector<std::uint8_t>(256, 110)};
  CHECK(ssim(c100, c110) ==
        doctest::Approx(oracles::ssim_reference(c100, c110)).epsilon(1e-9));

  Image small{4, 4, std::vector<std::uint8_t>(16, 0)};
  CHECK_THROWS_AS(ssim(small, small), Error);
  Image other{20, 16, std::vector<std::uint8_t>(320, 0)};
  CHECK_THROWS_AS(ssim(c100, other), Error);
}

TEST_CASE("template structure and kernel validation") {
  const AcceleratorTemplate t = default_gaussian_template();
  CHECK(t.nodes.size() == 17);
  CHECK(t.shift == 4);
  int mults = 0, adds = 0;
  for (const TemplateNode& n : t.nodes)
    (n.role == TemplateNode::Role::mult ? mults : adds) += 1;
  CHECK(mults == 9);
  CHECK(adds == 8);
  CHECK_THROWS_WITH_AS(build_template({{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}}),
                       doctest::Contains("power of two"), Error);
  CHECK_THROWS_AS(build_template({{{-1, 2, 1}, {2, 4, 2}, {1, 2, 1}}}), Error);
}

TEST_CASE("identity kernel with exact components passes images through") {
  const Fixture& fx = fixture();
  const AcceleratorTemplate ident = build_template({{{0, 0, 0}, {0, 1, 0}, {0, 0, 0}}});
  FilterContext ctx(ident, fx.palette, {fx.images[0]});
  const Image out = ctx.filter_image(all_exact_config(ident), fx.images[0]);
  CHECK(out.pixels == fx.images[0].pixels);
}

TEST_CASE("all-exact filter equals the reference integer convolution") {
  const Fixture& fx = fixture();
  FilterContext ctx(fx.tmpl, fx.palette, {fx.images[0], fx.images[1]});
  for (const Image& img : fx.images) {
    const Image got = ctx.filter_image(all_exact_config(fx.tmpl), img);
    const Image want = oracles::conv3x3_reference(img, fx.tmpl.kernel, fx.tmpl.shift);
    CHECK(got.pixels == want.pixels);
  }
}

TEST_CASE("evaluate_exact: exact configuration scores ssim 1") {
  const Fixture& fx = fixture();
  const EvaluatedConfig e =
      evaluate_exact(all_exact_config(fx.tmpl), fx.tmpl, fx.palette, fx.images);
  CHECK(e.ssim == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.cost.luts > 0);
  CHECK_THROWS_WITH_AS(
      evaluate_exact(Configuration{std::vector<int>(17, 99)}, fx.tmpl, fx.palette,
                     fx.images),
      doctest::Contains("palette index"), Error);
}

TEST_CASE("aggregate_cost sums components and takes the longest path") {
  const Fixture& fx = fixture();
  const Configuration exact = all_exact_config(fx.tmpl);
  const FpgaCost cost = aggregate_cost(exact, fx.tmpl, fx.palette);
  int luts = 0;
  double power = 0.0;
  for (const TemplateNode& n : fx.tmpl.nodes) {
    luts += fx.palette.role(n.role)[0].cost.luts;
    power += fx.palette.role(n.role)[0].cost.power_mw;
  }
  CHECK(cost.luts == luts);
  CHECK(cost.power_mw == doctest::Approx(power));
  // mult -> four adder levels on the longest path.
  const double mult_lat = fx.palette.mult[0].cost.latency_ns;
  const double add_lat = fx.palette.add[0].cost.latency_ns;
  CHECK(cost.latency_ns == doctest::Approx(mult_lat + 4 * add_lat));
}

TEST_CASE("cost aggregation is monotone under component domination") {
  const Fixture& fx = fixture();
  // Find a mult entry whose cost is dominated by another's.
  for (std::size_t a = 0; a < fx.palette.mult.size(); ++a) {
    for (std::size_t b = 0; b < fx.palette.mult.size(); ++b) {
      const FpgaCost& ca = fx.palette.mult[a].cost;
      const FpgaCost& cb = fx.palette.mult[b].cost;
      if (ca.luts <= cb.luts && ca.latency_ns <= cb.latency_ns &&
          ca.power_mw <= cb.power_mw) {
        Configuration hi = all_exact_config(fx.tmpl);
        hi.assign[0] = static_cast<int>(b);
        Configuration lo = hi;
        lo.assign[0] = static_cast<int>(a);
        const FpgaCost fhi = aggregate_cost(hi, fx.tmpl, fx.palette);
        const FpgaCost flo = aggregate_cost(lo, fx.tmpl, fx.palette);
        CHECK(flo.luts <= fhi.luts);
        CHECK(flo.latency_ns <= fhi.latency_ns + 1e-12);
        CHECK(flo.power_mw <= fhi.power_mw + 1e-12);
      }
    }
  }
}

TEST_CASE("sample_random determinism and uniformity") {
  const Fixture& fx = fixture();
  const auto a = sample_random(50, fx.tmpl, fx.palette, 7);
  const auto b = sample_random(50, fx.tmpl, fx.palette, 7);
  CHECK(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  // Frequencies of each choice at each mult node stay within 3 sigma.
  const std::size_t n = 10000;
  const auto big = sample_random(n, fx.tmpl, fx.palette, 99);
  const std::size_t choices = fx.palette.mult.size();
  const double p = 1.0 / static_cast<double>(choices);
  const double sigma = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  for (int node = 0; node < 9; ++node) {
    std::vector<int> count(choices, 0);
    for (const Configuration& cfg : big)
      count[static_cast<std::size_t>(cfg.assign[static_cast<std::size_t>(node)])]++;
    for (int c : count)
      CHECK(std::abs(c - static_cast<double>(n) * p) <= 3.0 * sigma);
  }
}

TEST_CASE("config string encoding round trips") {
  Configuration cfg;
  cfg.assign = {0, 3, 11, 2, 0, 1, 4, 5, 6, 0, 1, 2, 3, 4, 0, 1, 2};
  CHECK(config_from_string(config_to_string(cfg)) == cfg);
  CHECK_THROWS_AS(config_from_string("1-x-2"), Error);
}

TEST_CASE("estimators reproduce constants and hit held-out fidelity") {
  const Fixture& fx = fixture();
  FilterContext ctx(fx.tmpl, fx.palette, fx.images);

  SUBCASE("exact-only dataset predicts ssim 1 everywhere") {
    std::vector<EvaluatedConfig> evals;
    for (int i = 0; i < 25; ++i) evals.push_back(ctx.evaluate(all_exact_config(fx.tmpl)));
    const Estimators est = fit_estimators(evals, fx.tmpl, fx.palette);
    const auto obj = estimated_objectives(est, CostTarget::luts,
                                          all_exact_config(fx.tmpl), fx.tmpl,
                                          fx.palette);
    CHECK(obj[0] == doctest::Approx(0.0).epsilon(1e-9));
  }

  SUBCASE("held-out fidelity of the ssim estimator reaches 0.7") {
    const auto samples = sample_random(500, fx.tmpl, fx.palette, 404);
    std::vector<EvaluatedConfig> evals;
    evals.reserve(samples.size());
    for (const Configuration& cfg : samples) evals.push_back(ctx.evaluate(cfg));

    const std::size_t train_n = 400;
    const std::vector<EvaluatedConfig> train(evals.begin(), evals.begin() + train_n);
    const Estimators est = fit_estimators(train, fx.tmpl, fx.palette);

    std::map<std::string, double> pred, meas;
    for (std::size_t i = train_n; i < evals.size(); ++i) {
      const std::string id = std::to_string(i);
      pred[id] = predict(est.ssim_model,
                         config_features(evals[i].config, fx.tmpl, fx.palette));
      meas[id] = evals[i].ssim;
    }
    CHECK(fidelity(pred, meas) >= 0.7);
  }

  CHECK_THROWS_WITH_AS(
      fit_estimators(std::vector<EvaluatedConfig>(5), fx.tmpl, fx.palette),
      doctest::Contains("at least 20"), Error);
}

TEST_CASE("hill climb and random search archive behaviour") {
  const Fixture& fx = fixture();
  FilterContext ctx(fx.tmpl, fx.palette, fx.images);
  const auto samples = sample_random(60, fx.tmpl, fx.palette, 11);
  std::vector<EvaluatedConfig> evals;
  for (const Configuration& cfg : samples) evals.push_back(ctx.evaluate(cfg));
  const Estimators est = fit_estimators(evals, fx.tmpl, fx.palette);

  SUBCASE("archives are reproducible and non-dominated under the estimates") {
    const auto a = hill_climb(est, CostTarget::luts, fx.tmpl, fx.palette, 300, 21);
    const auto b = hill_climb(est, CostTarget::luts, fx.tmpl, fx.palette, 300, 21);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    std::vector<std::array<double, 2>> objs;
    for (const Configuration& cfg : a)
      objs.push_back(estimated_objectives(est, CostTarget::luts, cfg, fx.tmpl,
                                          fx.palette));
    for (std::size_t i = 0; i < objs.size(); ++i) {
      for (std::size_t j = 0; j < objs.size(); ++j) {
        if (i == j) continue;
        const bool dom = objs[i][0] <= objs[j][0] && objs[i][1] <= objs[j][1] &&
                         (objs[i][0] < objs[j][0] || objs[i][1] < objs[j][1]);
        CHECK_FALSE(dom);
      }
    }
  }

  SUBCASE("single-component palettes pin the archive to one configuration") {
    ComponentPalette solo;
    solo.mult = {fx.palette.mult[0]};
    solo.add = {fx.palette.add[0]};
    std::vector<EvaluatedConfig> solo_evals;
    FilterContext solo_ctx(fx.tmpl, solo, {fx.images[0]});
    for (int i = 0; i < 20; ++i)
      solo_evals.push_back(solo_ctx.evaluate(all_exact_config(fx.tmpl)));
    const Estimators solo_est = fit_estimators(solo_evals, fx.tmpl, solo);
    const auto archive =
        hill_climb(solo_est, CostTarget::luts, fx.tmpl, solo, 100, 3);
    REQUIRE(archive.size() == 1);
    CHECK(archive[0] == all_exact_config(fx.tmpl));
  }

  SUBCASE("budget zero keeps only the seeds' non-dominated subset") {
    const auto archive = hill_climb(est, CostTarget::luts, fx.tmpl, fx.palette, 0, 5);
    CHECK(archive.size() >= 1);
    CHECK(archive.size() <= 2);
  }

  SUBCASE("random search returns its non-dominated sample subset") {
    const auto archive =
        random_search(est, CostTarget::power_mw, fx.tmpl, fx.palette, 200, 31);
    CHECK(!archive.empty());
    const auto again =
        random_search(est, CostTarget::power_mw, fx.tmpl, fx.palette, 200, 31);
    REQUIRE(archive.size() == again.size());
    for (std::size_t i = 0; i < archive.size(); ++i) CHECK(archive[i] == again[i]);
    const auto one = random_search(est, CostTarget::power_mw, fx.tmpl, fx.palette, 1, 8);
    CHECK(one.size() == 1);
  }
}

TEST_CASE("finalize evaluates exactly and matches the brute-force front") {
  const Fixture& fx = fixture();
  FilterContext ctx(fx.tmpl, fx.palette, fx.images);
  const auto samples = sample_random(40, fx.tmpl, fx.palette, 13);
  std::vector<EvaluatedConfig> evals;
  for (const Configuration& cfg : samples) evals.push_back(ctx.evaluate(cfg));
  const Estimators est = fit_estimators(evals, fx.tmpl, fx.palette);
  auto archive = hill_climb(est, CostTarget::luts, fx.tmpl, fx.palette, 150, 17);
  archive.push_back(all_exact_config(fx.tmpl));

  const FinalizeResult result = finalize(archive, ctx);
  CHECK(result.evaluated.size() <= archive.size());
  for (CostTarget target :
       {CostTarget::luts, CostTarget::latency_ns, CostTarget::power_mw}) {
    const Front& front = result.fronts.at(target);
    CHECK(front.size() <= result.evaluated.size());

    std::vector<Point> pts;
    for (const EvaluatedConfig& e : result.evaluated)
      pts.push_back({config_to_string(e.config),
                     {1.0 - e.ssim, cost_field(e.cost, target)}});
    const auto brute = oracles::brute_force_front(pts);
    std::set<std::string> want, got;
    for (const auto& p : brute) want.insert(p.id);
    for (const auto& p : front.points) got.insert(p.id);
    CHECK(got == want);

    // The all-exact member survives on the quality axis.
    CHECK(got.count(config_to_string(all_exact_config(fx.tmpl))) == 1);
  }

  const auto path = std::filesystem::temp_directory_path() / "axdse_autoax_front.csv";
  save_autoax_front_csv(result, CostTarget::luts, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "config,ssim,fpga_luts,fpga_latency_ns,fpga_power_mw");
  std::filesystem::remove(path);
}

TEST_CASE("palette construction guards") {
  const Netlist mul8 = build_exact_multiplier(8);
  const Netlist add16 = build_exact_adder(16);

  // Errors are measured relative to element 0, which anchors index 0 with a
  // zero error by construction.
  Netlist trunc = mul8;
  trunc.outputs[0] = kConst0Net;
  trunc.name = "mul8_trunc";
  const std::vector<Netlist> mult_lib = {mul8, trunc};
  const ComponentPalette p = build_palette(mult_lib, gen_library(add16, 3, 51));
  CHECK(p.mult[0].med_norm_pct == 0.0);
  CHECK(p.mult[1].med_norm_pct > 0.0);

  // Duplicate component ids are rejected.
  const std::vector<Netlist> dup = {mul8, mul8};
  CHECK_THROWS_WITH_AS(build_palette(dup, gen_library(add16, 3, 51)),
                       doctest::Contains("duplicate component id"), Error);

  // Wrong widths are rejected.
  CHECK_THROWS_WITH_AS(
      build_palette(gen_library(build_exact_multiplier(4), 3, 1),
                    gen_library(add16, 3, 1)),
      doctest::Contains("16 inputs"), Error);
}
