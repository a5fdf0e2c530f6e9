#include <catch2/catch_amalgamated.hpp>

#include "qtm/decide.hpp"

using namespace qtm;

namespace {

// low-rank random positive semidefinite matrix with a separated top
// eigenvalue, the benign family for the characteristic-polynomial oracle
RealMatrix random_low_rank_psd(Rng& rng, std::size_t n, int rank) {
  std::vector<double> eigs;
  eigs.push_back(0.55 + 0.4 * rng.uniform());  // isolated top
  for (int k = 1; k < rank; ++k) eigs.push_back(0.05 + 0.3 * rng.uniform() * (rank - k) / rank);
  std::sort(eigs.begin(), eigs.end(), std::greater<>());
  // random orthonormal columns via Gram-Schmidt
  std::vector<std::vector<double>> q;
  for (int k = 0; k < rank; ++k) {
    std::vector<double> v(n);
    for (auto& a : v) a = rng.gaussian();
    for (const auto& prev : q) {
      double proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += prev[i] * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= proj * prev[i];
    }
    double norm = 0.0;
    for (double a : v) norm += a * a;
    norm = std::sqrt(norm);
    for (auto& a : v) a /= norm;
    q.push_back(v);
  }
  RealMatrix p(n, std::vector<double>(n, 0.0));
  for (int k = 0; k < rank; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p[i][j] += eigs[k] * q[k][i] * q[k][j];
  return p;
}

}  // namespace

TEST_CASE("jacobi eigensolver on pinned matrices") {
  MaxEigen d = hermitian_max_eigen({{0.25, 0.0}, {0.0, 0.75}});
  CHECK(d.lambda == Catch::Approx(0.75));

  MaxEigen r = hermitian_max_eigen({{0.5, 0.5}, {0.5, 0.5}});
  CHECK(r.lambda == Catch::Approx(1.0));
  CHECK(std::abs(r.vector[0]) == Catch::Approx(kInvSqrt2));
  CHECK(std::abs(r.vector[1]) == Catch::Approx(kInvSqrt2));
  CHECK(r.residual <= tol::kEigenResidual);

  CHECK_THROWS_AS(hermitian_max_eigen({{0.0, 1.0}, {0.5, 0.0}}), Error);
}

TEST_CASE("characteristic-polynomial root on pinned matrices") {
  CHECK(char_poly_max_root({{0.3}}) == Catch::Approx(0.3).margin(1e-10));
  CHECK(char_poly_max_root({{0.2, 0.0, 0.0}, {0.0, 0.9, 0.0}, {0.0, 0.0, 0.4}}) ==
        Catch::Approx(0.9).margin(1e-10));
  // repeated top eigenvalue exercises the square-free reduction
  CHECK(char_poly_max_root({{0.25, 0.0}, {0.0, 0.25}}) == Catch::Approx(0.25).margin(1e-9));
  RealMatrix zero(4, std::vector<double>(4, 0.0));
  CHECK(char_poly_max_root(zero) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("both eigenvalue routes agree on random low-rank matrices") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = std::size_t(2) << rng.below(3);  // 2, 4, 8
    RealMatrix p = random_low_rank_psd(rng, n, int(1 + rng.below(std::min<std::size_t>(n, 4))));
    double jac = hermitian_max_eigen(p).lambda;
    double cp = char_poly_max_root(p);
    REQUIRE(std::abs(jac - cp) < 1e-8);
  }
  for (std::size_t n : {16, 32, 64}) {
    RealMatrix p = random_low_rank_psd(rng, n, 5);
    REQUIRE(std::abs(hermitian_max_eigen(p).lambda - char_poly_max_root(p)) < 1e-8);
  }
}

TEST_CASE("binary search recovers dyadic floors") {
  auto oracle_for = [](double f) {
    return [f](DyadicValue t) { return f >= t.value(); };
  };

  BinarySearchResult r = binary_search_value(oracle_for(0.625), 3);
  CHECK(r.value.numerator == 5);
  CHECK(r.value.bits == 3);
  CHECK(r.oracle_calls == 3);

  for (int b : {1, 4, 12}) {
    BinarySearchResult top = binary_search_value(oracle_for(1.0), b);
    CHECK(top.value.numerator == (std::int64_t(1) << b));  // the inclusive-top convention
    CHECK(top.oracle_calls == b);
  }

  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    double f = rng.uniform() * 0.99;
    BinarySearchResult s = binary_search_value(oracle_for(f), 10, true);
    CHECK(s.value.numerator == std::int64_t(std::floor(std::ldexp(f, 10))));
    CHECK(s.oracle_calls == 10);
  }
}

TEST_CASE("a conflicting oracle is detected in verify mode") {
  int calls = 0;
  auto liar = [&calls](DyadicValue t) {
    ++calls;
    return calls <= 2 ? t.value() <= 0.5 : false;  // answers flip arbitrarily
  };
  CHECK_THROWS_AS(binary_search_value(liar, 4, true), Error);
}

TEST_CASE("floor comparison predicate with the boundary guard") {
  QopVerdict v = eval_qop_predicate_values(0.75, 0.5, 2);
  CHECK(v.holds);
  CHECK(v.f_floor == 3);
  CHECK(v.g_floor == 2);
  CHECK_FALSE(v.boundary_flagged);

  QopVerdict eq = eval_qop_predicate_values(0.5, 0.5, 2);
  CHECK_FALSE(eq.holds);

  // half-cell separated pair with one value drifting against a cell edge
  QopVerdict near = eval_qop_predicate_values(0.5 + 2e-13 + 0.125, 0.5 + 2e-13, 2);
  CHECK(near.boundary_flagged);

  // exact dyadics are not ambiguous
  CHECK_FALSE(eval_qop_predicate_values(1.0, 0.0, 4).boundary_flagged);
  CHECK(eval_qop_predicate_values(1.0, 0.0, 4).f_floor == 16);
}

TEST_CASE("verdicts are stable under tiny perturbations unless flagged") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    double f = rng.uniform();
    double g = rng.uniform();
    int b = 1 + int(rng.below(12));
    QopVerdict base = eval_qop_predicate_values(f, g, b);
    for (double df : {-1e-12, 1e-12}) {
      QopVerdict moved = eval_qop_predicate_values(f + df, g - df, b);
      if (!base.boundary_flagged && !moved.boundary_flagged) REQUIRE(moved.holds == base.holds);
    }
  }
}

TEST_CASE("definability verdicts on the three value regimes") {
  DefinabilityVerdicts one = definability_predicates(1.0);
  CHECK(one.bounded_gap == Verdict::Accept);
  CHECK(one.positive_value == Verdict::Accept);
  CHECK(one.exact_binary == Verdict::Accept);

  DefinabilityVerdicts half = definability_predicates(0.5);
  CHECK(half.bounded_gap == Verdict::PromiseViolated);
  CHECK(half.positive_value == Verdict::Accept);
  CHECK(half.exact_binary == Verdict::PromiseViolated);

  DefinabilityVerdicts zero = definability_predicates(0.0);
  CHECK(zero.bounded_gap == Verdict::Reject);
  CHECK(zero.positive_value == Verdict::Reject);
  CHECK(zero.exact_binary == Verdict::Reject);
}

TEST_CASE("two-sided inequality report") {
  // upper bound tight when f = g on an in-label
  TwoSidedReport same = pp_style_inequalities({{"tight", true, 0.8, 0.8}}, 4);
  CHECK(same.passed);
  // f = 0 on an out-label
  CHECK(pp_style_inequalities({{"zero", false, 0.0, 0.9}}, 4).passed);
  // violation is reported with its margin
  TwoSidedReport bad = pp_style_inequalities({{"bad", true, 0.2, 0.9}}, 2);
  CHECK_FALSE(bad.passed);
  CHECK(bad.lines[0].lower_margin < 0.0);

  // squared gap pair: start from a classical-style pair, square everything,
  // and weaken the exponent by one
  int q = 5;
  double eps = std::ldexp(1.0, -q);
  double g = 0.9, f_in = (1.0 - eps) * g, f_out = eps * g * 0.5;
  std::vector<TwoSidedCase> squared = {{"in", true, f_in * f_in, g * g},
                                       {"out", false, f_out * f_out, g * g}};
  CHECK(pp_style_inequalities(squared, q - 1).passed);
}
