#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "axdse/error_metrics.hpp"
#include "axdse/library_gen.hpp"
#include "axdse/netlist.hpp"
#include "oracles.hpp"

using namespace axdse;

namespace {

const char* kFullAdder = R"(
# full adder: s = a^b^c, cout = ab + c(a^b)
name fa
inputs a b c
gate x1 XOR a b
gate s XOR x1 c
gate t1 AND a b
gate t2 AND c x1
gate cout OR t1 t2
outputs s cout
)";

}  // namespace

TEST_CASE("parse minimal well-formed netlist") {
  const Netlist nl = parse_netlist("inputs a b\ngate g1 AND a b\noutputs g1\n");
  CHECK(nl.num_inputs() == 2);
  CHECK(nl.num_outputs() == 1);
  CHECK(nl.num_gates() == 1);
  CHECK(nl.gates[0].type == GateType::AND);
}

TEST_CASE("parse accepts statements in any order and topo-sorts gates") {
  const Netlist nl = parse_netlist(
      "outputs s cout\n"
      "gate cout OR t1 t2\n"
      "gate t2 AND c x1\n"
      "gate t1 AND a b\n"
      "gate s XOR x1 c\n"
      "gate x1 XOR a b\n"
      "inputs a b c\n");
  for (std::size_t g = 0; g < nl.gates.size(); ++g) {
    for (int i = 0; i < arity(nl.gates[g].type); ++i) {
      CHECK(nl.gates[g].fanin[static_cast<std::size_t>(i)] <
            nl.gate_net(static_cast<int>(g)));
    }
  }
  CHECK(simulate(nl, 0b111) == 0b11);
}

TEST_CASE("parse errors carry position and identifier") {
  CHECK_THROWS_WITH_AS(parse_netlist("inputs a\ngate g1 AND a a\ngate g1 BUF a\noutputs g1\n"),
                       doctest::Contains("duplicate identifier 'g1'"), ParseError);
  CHECK_THROWS_WITH_AS(parse_netlist("inputs a\ngate g1 AND a zz\noutputs g1\n"),
                       doctest::Contains("undefined net 'zz'"), ParseError);
  CHECK_THROWS_WITH_AS(parse_netlist("inputs a\ngate g1 NOT a a\noutputs g1\n"),
                       doctest::Contains("expects 1 fan-in"), ParseError);
  CHECK_THROWS_WITH_AS(parse_netlist("inputs a\ngate g1 FROB a\noutputs g1\n"),
                       doctest::Contains("unknown gate type"), ParseError);
  CHECK_THROWS_AS(parse_netlist("inputs a\noutputs g1\n"), ParseError);
}

TEST_CASE("self-referencing gate is a cycle") {
  CHECK_THROWS_WITH_AS(parse_netlist("inputs a\ngate g1 AND a g1\noutputs g1\n"),
                       doctest::Contains("cycle"), Error);
  CHECK_THROWS_WITH_AS(
      parse_netlist("inputs a\ngate g1 AND a g2\ngate g2 BUF g1\noutputs g1\n"),
      doctest::Contains("cycle"), Error);
}

TEST_CASE("parse/to_text round trip") {
  const Netlist nl = parse_netlist(kFullAdder);
  const Netlist again = parse_netlist(to_text(nl));
  CHECK(canonical_text(nl) == canonical_text(again));
  CHECK(check_equivalence(nl, again));
}

TEST_CASE("full adder matches arithmetic sum on all 8 inputs") {
  const Netlist nl = parse_netlist(kFullAdder);
  for (std::uint64_t w = 0; w < 8; ++w) {
    const std::uint64_t expect = (w & 1) + ((w >> 1) & 1) + ((w >> 2) & 1);
    CHECK(simulate(nl, w) == expect);
  }
}

TEST_CASE("simulate rejects out-of-range words and is pure") {
  const Netlist nl = parse_netlist(kFullAdder);
  CHECK_THROWS_AS(simulate(nl, 8), Error);
  CHECK(simulate(nl, 5) == simulate(nl, 5));
}

TEST_CASE("constant outputs simulate to fixed bits") {
  const Netlist nl = parse_netlist("inputs a\noutputs CONST0 CONST1 a\n");
  CHECK(simulate(nl, 0) == 0b010);
  CHECK(simulate(nl, 1) == 0b110);
}

TEST_CASE("exact adder matches integer addition") {
  const Netlist add2 = build_exact_adder(2);
  CHECK(simulate(add2, 3 | (1u << 2)) == 4);  // a=3, b=1
  const Netlist add4 = build_exact_adder(4);
  for (std::uint64_t w = 0; w < 256; ++w) {
    const std::uint64_t a = w & 15, b = w >> 4;
    CHECK(simulate(add4, w) == a + b);
  }
}

TEST_CASE("exact multiplier matches integer product") {
  const Netlist mul2 = build_exact_multiplier(2);
  CHECK(simulate(mul2, 0b1111) == 9);  // a=3, b=3
  const Netlist mul4 = build_exact_multiplier(4);
  CHECK(simulate(mul4, 15 | (15u << 4)) == 225);
  for (std::uint64_t w = 0; w < 256; ++w) {
    const std::uint64_t a = w & 15, b = w >> 4;
    CHECK(simulate(mul4, w) == a * b);
  }
  CHECK_THROWS_AS(build_exact_multiplier(1), Error);
  CHECK_THROWS_AS(build_exact_adder(17), Error);
}

TEST_CASE("exact 8x8 multiplier matches on all 65536 words") {
  const Netlist mul8 = build_exact_multiplier(8);
  const ExactOutputs table(mul8);
  for (std::uint64_t w = 0; w < (1ull << 16); ++w) {
    const std::uint64_t a = w & 0xff, b = w >> 8;
    REQUIRE(table.word(w) == a * b);
  }
}

TEST_CASE("block evaluator agrees with scalar simulation at block boundaries") {
  const Netlist mul4 = build_exact_multiplier(4);
  BlockEvaluator ev(mul4);
  std::array<std::uint64_t, 64> words{};
  for (std::uint64_t base = 0; base < 256; base += 64) {
    ev.eval(base);
    ev.output_words(words);
    for (std::size_t l = 0; l < 64; ++l) CHECK(words[l] == simulate(mul4, base + l));
  }
}

TEST_CASE("check_equivalence basics") {
  const Netlist a = parse_netlist("inputs a b\ngate g AND a b\noutputs g\n");
  const Netlist b = parse_netlist("inputs a b\ngate g OR a b\noutputs g\n");
  CHECK(check_equivalence(a, a));
  CHECK_FALSE(check_equivalence(a, b));
  const Netlist nand_ab =
      parse_netlist("inputs a b\ngate g NAND a b\noutputs g\n");
  const Netlist demorgan = parse_netlist(
      "inputs a b\ngate na NOT a\ngate nb NOT b\ngate g OR na nb\noutputs g\n");
  CHECK(check_equivalence(nand_ab, demorgan));
  const Netlist wider = parse_netlist("inputs a b c\ngate g AND a b\noutputs g\n");
  CHECK_THROWS_AS(check_equivalence(a, wider), Error);
}

TEST_CASE("error_metrics identity and truncation ground truth") {
  const Netlist mul2 = build_exact_multiplier(2);
  const ErrorReport zero = error_metrics(mul2, mul2);
  CHECK(zero.med_raw == 0.0);
  CHECK(zero.med_norm_pct == 0.0);
  CHECK(zero.worst_case == 0.0);
  CHECK(zero.error_rate == 0.0);

  // LSB tied to CONST0: odd products occur only when a and b are both odd.
  Netlist trunc = mul2;
  trunc.outputs[0] = kConst0Net;
  const ErrorReport r = error_metrics(trunc, mul2);
  CHECK(r.med_raw == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.error_rate == doctest::Approx(4.0 / 16.0).epsilon(1e-12));
  CHECK(r.worst_case == 1.0);
  CHECK(r.med_norm_pct == doctest::Approx(0.25 / 15.0 * 100.0).epsilon(1e-12));
}

TEST_CASE("error_metrics properties on random variants") {
  const Netlist mul4 = build_exact_multiplier(4);
  const auto lib = gen_library(mul4, 30, 99);
  for (const Netlist& v : lib) {
    const ErrorReport r = error_metrics(v, mul4);
    CHECK(r.med_raw >= 0.0);
    CHECK(r.worst_case >= r.med_raw);
    CHECK(r.error_rate >= 0.0);
    CHECK(r.error_rate <= 1.0);
    CHECK((r.error_rate == 0.0) == (r.med_raw == 0.0));
  }
}

TEST_CASE("error_metrics rejects width mismatch and oversized sweeps") {
  const Netlist mul2 = build_exact_multiplier(2);
  const Netlist mul4 = build_exact_multiplier(4);
  CHECK_THROWS_AS(error_metrics(mul2, mul4), Error);
}

TEST_CASE("truncated 8x8 multiplier MED matches integer enumeration") {
  const Netlist mul8 = build_exact_multiplier(8);
  for (int k : {1, 2, 4}) {
    Netlist trunc = mul8;
    for (int j = 0; j < k; ++j) trunc.outputs[static_cast<std::size_t>(j)] = kConst0Net;
    const double expect = oracles::truncated_multiplier_med(8, k);
    const ErrorReport r = error_metrics(trunc, mul8);
    CHECK(r.med_raw == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("sampled_error_metrics approximates exhaustive MED") {
  const Netlist mul8 = build_exact_multiplier(8);
  Netlist trunc = mul8;
  for (int j = 0; j < 4; ++j) trunc.outputs[static_cast<std::size_t>(j)] = kConst0Net;
  const double exact_med = error_metrics(trunc, mul8).med_raw;
  const double sampled = sampled_error_metrics(trunc, mul8, 65536, 7).med_raw;
  CHECK(sampled == doctest::Approx(exact_med).epsilon(0.05));
}

TEST_CASE("simplify folds constants through downstream logic") {
  const Netlist nl = parse_netlist(
      "inputs a b\n"
      "gate z CONST0\n"
      "gate pp AND a z\n"       // -> CONST0
      "gate s XOR b pp\n"       // -> BUF b -> wire
      "gate c AND b pp\n"       // -> CONST0
      "gate o OR s c\n"         // -> b
      "gate inv NOT z\n"        // -> CONST1
      "gate n NAND inv inv\n"   // -> NOT(CONST1) -> CONST0
      "outputs o n\n");
  const Netlist simp = simplify(nl);
  CHECK(simp.num_gates() == 0);
  CHECK(simp.outputs[0] == nl.input_net(1));
  CHECK(simp.outputs[1] == kConst0Net);

  // Constant-free circuits come back structurally identical.
  const Netlist mul4 = build_exact_multiplier(4);
  CHECK(canonical_text(simplify(mul4)) == canonical_text(mul4));
}

TEST_CASE("simplify preserves function on mutated variants") {
  const Netlist mul4 = build_exact_multiplier(4);
  for (const Netlist& v : gen_library(mul4, 25, 7)) {
    // Library variants are already simplified; stacking another pass must be
    // a no-op and equivalence must hold against a manual mutation.
    CHECK(canonical_text(simplify(v)) == canonical_text(v));
  }
  Netlist manual = mul4;
  manual.gates[5].type = GateType::CONST1;
  manual.gates[5].fanin = {-1, -1};
  manual.gates[20].type = GateType::CONST0;
  manual.gates[20].fanin = {-1, -1};
  const Netlist simp = simplify(manual);
  CHECK(simp.num_gates() < manual.num_gates());
  CHECK(check_equivalence(simp, manual));
}

TEST_CASE("gen_library contracts") {
  const Netlist mul2 = build_exact_multiplier(2);
  SUBCASE("count 1 returns only the base") {
    const auto lib = gen_library(mul2, 1, 123);
    REQUIRE(lib.size() == 1);
    CHECK(canonical_text(lib[0]) == canonical_text(mul2));
  }
  SUBCASE("same seed gives identical libraries") {
    const auto a = gen_library(mul2, 25, 42);
    const auto b = gen_library(mul2, 25, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(to_text(a[i]) == to_text(b[i]));
  }
  SUBCASE("variants are structurally distinct and valid") {
    const auto lib = gen_library(mul2, 25, 42);
    std::set<std::string> keys;
    for (const Netlist& v : lib) {
      v.validate();
      CHECK(keys.insert(canonical_text(v)).second);
    }
  }
}

TEST_CASE("gen_library reports an exhausted mutation space") {
  const Netlist tiny = parse_netlist("inputs a b\ngate g AND a b\noutputs g\n");
  CHECK_THROWS_WITH_AS(gen_library(tiny, 500, 9),
                       doctest::Contains("mutation space"), Error);
}

TEST_CASE("gen_library on the 8x8 multiplier spreads error levels") {
  const Netlist mul8 = build_exact_multiplier(8);
  const auto lib = gen_library(mul8, 60, 42);
  std::set<double> meds;
  for (const Netlist& v : lib) {
    const ErrorReport r = error_metrics(v, mul8);
    CHECK(r.med_raw >= 0.0);
    meds.insert(r.med_raw);
  }
  CHECK(meds.size() >= 2);
}

TEST_CASE("library manifest round trip") {
  const Netlist mul2 = build_exact_multiplier(2);
  const auto lib = gen_library(mul2, 10, 5);
  const auto dir = std::filesystem::temp_directory_path() / "axdse_lib_test";
  std::filesystem::remove_all(dir);
  save_library(lib, dir);
  const auto loaded = load_library(dir / "manifest.json");
  REQUIRE(loaded.size() == lib.size());
  for (std::size_t i = 0; i < lib.size(); ++i) {
    CHECK(loaded[i].name == lib[i].name);
    CHECK(canonical_text(loaded[i]) == canonical_text(lib[i]));
  }
  std::filesystem::remove_all(dir);
}
