#include <catch2/catch_amalgamated.hpp>

#include "qtm/constructions.hpp"
#include "qtm/fixtures.hpp"

using namespace qtm;

namespace {
const std::vector<FixtureRecord>& corpus() {
  static const std::vector<FixtureRecord> c = fixture_corpus();
  return c;
}
const FixtureRecord& fx(const std::string& name) { return find_fixture(corpus(), name); }

OptProblem dispatch_problem() { return fx("two_point").problem(); }

QubitSource source(const std::string& name) {
  QubitSource s;
  s.generator = find_fixture(corpus(), name).machine;
  s.qubits = 1;
  s.rule.windows = {5};
  return s;
}
}  // namespace

TEST_CASE("classical maximum over a dispatch grid") {
  OptProblem f = dispatch_problem();
  OptProblem g = max_over_classical(f, 1);
  CHECK(g.index_size() == 2);
  double constructed = solve_opt(g, "");
  CHECK(constructed == Catch::Approx(0.6).margin(1e-7));
  CHECK(constructed == Catch::Approx(analytic_max_value(f, "", 1)).margin(1e-7));

  // zero classical bits is the identity construction
  CHECK(solve_opt(max_over_classical(f, 0), pair_string("", "1")) == Catch::Approx(0.6).margin(1e-9));

  // a constant function stays constant
  OptProblem c = fx("const_q64").problem();
  OptProblem gc = max_over_classical(compose_with_fp(c, [](const std::string&) { return std::string("0"); }), 1);
  CHECK(solve_opt(gc, "") == Catch::Approx(0.64).margin(1e-7));
}

TEST_CASE("convex combination against the analytic weighted sum") {
  OptProblem f = dispatch_problem();
  SECTION("balanced source averages the branch values") {
    QubitSource plus = source("plus_source");
    OptProblem g = convex_combine(f, plus);
    double constructed = solve_opt(g, "");
    CHECK(constructed == Catch::Approx(0.4).margin(1e-7));
    CHECK(constructed == Catch::Approx(analytic_convex_value(f, plus, "")).margin(1e-7));
  }
  SECTION("a basis source picks one branch exactly") {
    QubitSource one = source("one_source");
    CHECK(solve_opt(convex_combine(f, one), "") == Catch::Approx(0.6).margin(1e-7));
  }
  SECTION("a constant function is a fixed point") {
    OptProblem c = compose_with_fp(fx("const_q36").problem(), [](const std::string&) { return std::string("0"); });
    CHECK(solve_opt(convex_combine(c, source("plus_source")), "") == Catch::Approx(0.36).margin(1e-7));
  }
  SECTION("a dirty source is rejected") {
    QubitSource dirty = source("plus_source");
    dirty.generator = fx("projector_p1").machine;  // halts with junk beyond cell 0
    CHECK_THROWS_AS(solve_opt(convex_combine(f, dirty), ""), Error);
  }
}

TEST_CASE("products over all classical strings") {
  OptProblem f = dispatch_problem();
  CHECK(solve_opt(product_over_all(f, 1), "") == Catch::Approx(0.12).margin(1e-6));

  OptProblem f4 = fx("four_point").problem();
  OptProblem g = product_over_all(f4, 2);
  CHECK(g.index_size() == 4);
  double constructed = solve_opt(g, "");
  CHECK(constructed == Catch::Approx(0.3024).margin(1e-6));
  CHECK(constructed == Catch::Approx(analytic_product_value(f4, "", 2)).margin(1e-6));

  // a zero factor kills the product
  OptProblem fz = OptProblem::for_machine(fixtures::two_point(0.0, 0.6), 1, f.rule);
  CHECK(solve_opt(product_over_all(fz, 1), "") == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("products shrink as factors accumulate") {
  OptProblem f4 = fx("four_point").problem();
  double full = analytic_product_value(f4, "", 2);
  double partial = 1.0;
  for (const char* y : {"00", "01"}) partial *= solve_opt(f4, pair_string("", y));
  CHECK(full <= partial + 1e-12);
  double single_min = std::min(solve_opt(dispatch_problem(), pair_string("", "0")),
                               solve_opt(dispatch_problem(), pair_string("", "1")));
  CHECK(analytic_product_value(dispatch_problem(), "", 1) <= single_min + 1e-12);
}

TEST_CASE("composition with string transformations") {
  OptProblem f = dispatch_problem();
  auto flip_last = [](const std::string& s) {
    std::string o = s;
    if (!o.empty()) o.back() = o.back() == '0' ? '1' : '0';
    return o;
  };
  OptProblem flipped = compose_with_fp(f, flip_last);
  CHECK(solve_opt(flipped, pair_string("", "0")) == Catch::Approx(0.6).margin(1e-9));
  CHECK(solve_opt(flipped, pair_string("", "1")) == Catch::Approx(0.2).margin(1e-9));
  OptProblem same = compose_with_fp(f, [](const std::string& s) { return s; });
  CHECK(solve_opt(same, pair_string("", "1")) == Catch::Approx(0.6).margin(1e-9));
}

TEST_CASE("convex combinations never beat the classical maximum") {
  OptProblem f = dispatch_problem();
  double mx = analytic_max_value(f, "", 1);
  for (const char* src : {"plus_source", "one_source"})
    CHECK(analytic_convex_value(f, source(src), "") <= mx + 1e-9);
}

TEST_CASE("swapping the classical max and the index supremum is value-neutral") {
  OptProblem f = dispatch_problem();
  // classical-out: max over y of sup over indices
  double classical_out = analytic_max_value(f, "", 1);
  // index-out: sup over the combined index of the dispatched machine
  double index_out = solve_opt(max_over_classical(f, 1), "");
  CHECK(classical_out == Catch::Approx(index_out).margin(1e-7));
}

TEST_CASE("tensor-product index optimization") {
  SECTION("separable witnesses multiply per-factor values") {
    OptProblem sep = product_over_all(dispatch_problem(), 1);
    TensorIndexReport r = tensor_index_value(sep, "", 1, 500, 7);
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(0.12).margin(1e-9));
    CHECK(r.value == Catch::Approx(r.lambda_max).margin(1e-9));
  }
  SECTION("a single factor reduces to the plain supremum") {
    const auto& r = fx("hadamard_sandwich_p1");
    TensorIndexReport t = tensor_index_value(r.problem(), "0", 1, 100, 7);
    CHECK(t.value == Catch::Approx(solve_opt(r.problem(), "0")).margin(1e-9));
  }
  SECTION("the entangling witness shows a product gap") {
    TensorIndexReport r = tensor_index_value(fx("bell_p2").problem(), "0", 1, 2000, 7);
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(0.5).margin(1e-9));
    CHECK(r.sample_max <= r.value + 1e-4);
    CHECK(r.value <= r.lambda_max + tol::kMatrixCert);
    CHECK(r.lambda_max == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("the averaging bounds hold across the corpus") {
  for (const auto& r : corpus()) {
    if (!r.is_witness()) continue;
    for (int m : {1, 2, 3, 4}) {
      INFO(r.name << " exponent " << m);
      SandwichReport s = averaging_sandwich(r.problem(), r.witness_input, m);
      CHECK(s.holds);
      CHECK(s.lower_margin >= -tol::kMatrixCert);
      CHECK(s.upper_margin >= -tol::kMatrixCert);
    }
  }
}

TEST_CASE("sandwich pins on the bundled extremes") {
  // constant over classical indices: the average equals the power exactly
  SandwichReport c = averaging_sandwich(fx("const_q25").problem(), "0", 2);
  CHECK(c.average == Catch::Approx(0.0625).margin(1e-9));
  CHECK(c.lower_margin == Catch::Approx(0.0).margin(1e-9));

  // rank-one witness: the upper bound is tight
  SandwichReport p = averaging_sandwich(fx("projector_p1").problem(), "0", 1);
  CHECK(p.average == Catch::Approx(0.5).margin(1e-9));
  CHECK(p.powered == Catch::Approx(1.0).margin(1e-9));
  CHECK(p.upper_margin == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("constituents of every construction stay well-formed") {
  OptProblem f = dispatch_problem();
  CHECK(locally_well_formed(f.machine));
  CHECK(locally_well_formed(source("plus_source").generator));
  CHECK(locally_well_formed(source("one_source").generator));
}
