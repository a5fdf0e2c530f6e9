// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qtm/approx.hpp"
#include "qtm/cli.hpp"
#include "qtm/constructions.hpp"
#include "qtm/decide.hpp"
#include "qtm/fixtures.hpp"
#include "qtm/qopt.hpp"
#include "qtm/wellformedness.hpp"

using namespace qtm;

namespace {

struct Criterion {
  int number;
  std::string title;
  std::function<std::string()> body;  // empty string = pass, otherwise failure detail
};

const std::vector<FixtureRecord>& corpus() {
  static const std::vector<FixtureRecord> c = fixture_corpus();
  return c;
}

std::vector<const FixtureRecord*> witnesses() {
  std::vector<const FixtureRecord*> out;
  for (const auto& r : corpus())
    if (r.is_witness()) out.push_back(&r);
  return out;
}

std::string criterion_well_formedness() {
  auto start = std::chrono::steady_clock::now();
  int agree = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    MachineDescription valid = random_valid_table(seed, 3, 2);
    MachineDescription broken = perturb_table(valid, seed * 977 + 5);
    for (const MachineDescription* m : {&valid, &broken}) {
      ConfigurationSpace space(*m, {5});
      bool local = locally_well_formed(*m);
      bool global = check_global_unitarity(*m, space).passed;
      ++total;
      if (local == global) ++agree;
    }
    if (!locally_well_formed(valid)) return "seeded valid table failed the local conditions";
  }
  for (const auto& r : corpus()) {
    ConfigurationSpace space(r.machine, r.windows);
    bool local = locally_well_formed(r.machine);
    bool global = check_global_unitarity(r.machine, space).passed;
    ++total;
    if (local == global) ++agree;
    if (local != r.expect_well_formed) return r.name + " has the wrong local verdict";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (agree != total)
    return std::to_string(total - agree) + " of " + std::to_string(total) + " tables disagree";
  if (secs >= 60.0) return "runtime " + std::to_string(secs) + "s exceeds the 60s budget";
  return "";
}

std::string criterion_matrix_certification() {
  Rng rng(404);
  for (const auto* r : witnesses()) {
    OptProblem prob = r->problem();
    ComplexMatrix k = acceptance_kernel(prob, r->witness_input);
    for (std::size_t s = 0; s < k.size(); ++s)
      for (std::size_t t = 0; t < k.size(); ++t) {
        if (std::abs(k[s][t] - std::conj(k[t][s])) > tol::kMatrixCert)
          return r->name + " is not Hermitian";
        if (std::abs(k[s][t].imag()) > tol::kMatrixCert) return r->name + " has complex entries";
        if (std::abs(k[s][t] - k[t][s]) > tol::kMatrixCert) return r->name + " is not symmetric";
      }
    OptMatrix p = certify_kernel(k);  // PSD and contractivity certified inside
    if (p.min_eigenvalue < -tol::kPsd) return r->name + " is not positive semidefinite";
    if (p.max_eigenvalue > 1.0 + tol::kMatrixCert) return r->name + " is not contractive";

    const std::uint64_t dim = 1ull << prob.index_size();
    for (int trial = 0; trial < 100; ++trial) {
      Qustring phi;
      phi.size = prob.index_size();
      phi.amplitudes = random_unit_vector(rng, dim);
      Complex quad = 0.0;
      for (std::uint64_t s = 0; s < dim; ++s)
        for (std::uint64_t t = 0; t < dim; ++t)
          quad += std::conj(phi.amplitudes[s]) * p.entries[s][t] * phi.amplitudes[t];
      double simulated = simulate_acceptance(prob, r->witness_input, phi);
      if (std::abs(quad.real() - simulated) > tol::kMatrixCert)
        return r->name + " quadratic form deviates from simulation by " +
               std::to_string(std::abs(quad.real() - simulated));
    }
  }
  return "";
}

std::string criterion_optimization() {
  for (const auto* r : witnesses()) {
    OptProblem prob = r->problem();
    SolveResult sol = solve_opt_full(prob, r->witness_input);
    SamplingReport s = sampling_lower_bound(prob, r->witness_input, 10000, 2026, &sol.matrix);
    if (s.max_acceptance > sol.lambda_max + tol::kMatrixCert)
      return r->name + " sampling exceeded the eigenvalue";
    if (sol.lambda_max - s.refined_max > 1e-4)
      return r->name + " refinement left a gap of " + std::to_string(sol.lambda_max - s.refined_max);
    double cp = char_poly_max_root(sol.matrix.entries);
    if (std::abs(cp - sol.lambda_max) > 1e-8)
      return r->name + " eigenvalue routes disagree by " + std::to_string(std::abs(cp - sol.lambda_max));
  }
  // cross-method agreement up to dimension 64 on low-rank spectra
  Rng rng(500);
  for (std::size_t n : {8, 16, 32, 64}) {
    std::vector<double> eigs{0.85, 0.4, 0.15};
    std::vector<std::vector<double>> q;
    for (std::size_t k = 0; k < eigs.size(); ++k) {
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
    for (std::size_t k = 0; k < eigs.size(); ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p[i][j] += eigs[k] * q[k][i] * q[k][j];
    double jac = hermitian_max_eigen(p).lambda;
    double cp = char_poly_max_root(p);
    if (std::abs(jac - cp) > 1e-8)
      return "dimension " + std::to_string(n) + " routes disagree by " + std::to_string(std::abs(jac - cp));
  }
  return "";
}

std::string criterion_squaring() {
  for (const auto* r : witnesses()) {
    OptProblem sq = square_problem(r->problem());
    if (sq.index_size() != r->index_size) return r->name + " squaring changed the index size";
    double base = solve_opt(r->problem(), r->witness_input);
    double squared = solve_opt(sq, r->witness_input);
    if (std::abs(squared - base * base) > 1e-8)
      return r->name + " squared value off by " + std::to_string(std::abs(squared - base * base));
  }
  return "";
}

std::string criterion_closures() {
  const auto& tp = find_fixture(corpus(), "two_point");
  const auto& fp = find_fixture(corpus(), "four_point");
  OptProblem f = tp.problem();
  OptProblem f4 = fp.problem();

  double mx_c = solve_opt(max_over_classical(f, 1), "");
  double mx_a = analytic_max_value(f, "", 1);
  if (std::abs(mx_c - mx_a) > 1e-6) return "classical max off by " + std::to_string(std::abs(mx_c - mx_a));
  if (std::abs(mx_c - mx_a) > 1e-7) return "max-sup swap beyond 1e-7";

  QubitSource plus{find_fixture(corpus(), "plus_source").machine, 1, {}};
  plus.rule.windows = {5};
  double cv_c = solve_opt(convex_combine(f, plus), "");
  double cv_a = analytic_convex_value(f, plus, "");
  if (std::abs(cv_c - cv_a) > 1e-6) return "convex combination off by " + std::to_string(std::abs(cv_c - cv_a));
  if (cv_a > mx_a + 1e-9) return "convex combination exceeded the maximum";

  double pr_c = solve_opt(product_over_all(f4, 2), "");
  double pr_a = analytic_product_value(f4, "", 2);
  if (std::abs(pr_c - pr_a) > 1e-6) return "product off by " + std::to_string(std::abs(pr_c - pr_a));

  const auto& c9 = find_fixture(corpus(), "const_q90");
  for (int m : {2, 3, 4}) {
    double pw = solve_opt(power_problem(c9.problem(), m), "0");
    double direct = std::pow(solve_opt(c9.problem(), "0"), m);
    if (std::abs(pw - direct) > 1e-6) return "power off by " + std::to_string(std::abs(pw - direct));
  }
  return "";
}

std::string criterion_sandwich() {
  for (const auto* r : witnesses()) {
    for (int m : {1, 2, 3, 4}) {
      try {
        SandwichReport s = averaging_sandwich(r->problem(), r->witness_input, m);
        if (!s.holds) return r->name + " violated the averaging bounds at exponent " + std::to_string(m);
      } catch (const Error& e) {
        return r->name + " exponent " + std::to_string(m) + ": " + e.what();
      }
    }
  }
  return "";
}

std::string criterion_lemma_epsilon() {
  const auto& coin = find_fixture(corpus(), "coin_flip");
  const auto& third = find_fixture(corpus(), "const_third");
  int pairs = 0;
  double min_slack = 1.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    for (const FixtureRecord* r : {&coin, &third}) {
      MachineDescription other = perturb_and_project(r->machine, seed, 0.05);
      ConfigurationSpace space(r->machine, r->windows);
      EvolutionOperator u1(r->machine, space);
      EvolutionOperator u2(other, space);
      auto v1 = encode_input(space, "");
      auto v2 = v1;
      for (int s = 0; s < r->halt_steps; ++s) {
        v1 = u1.apply(v1);
        v2 = u2.apply(v2);
      }
      LemmaEpsilonReport rep = check_lemma_epsilon(space, v1, v2);
      ++pairs;
      min_slack = std::min(min_slack, rep.slack);
      if (!rep.holds) return "pair with seed " + std::to_string(seed) + " violated the bound";
    }
  }
  if (pairs != 100) return "expected 100 pairs, ran " + std::to_string(pairs);
  if (min_slack < -1e-12) return "negative slack " + std::to_string(min_slack);
  return "";
}

std::string criterion_maxqtm() {
  for (const auto* r : witnesses()) {
    double exact = solve_opt(r->problem(), r->witness_input);
    for (int m : {2, 4, 8, 16}) {
      ApproxEvalResult res = eval_maxqtm(r->machine, r->witness_input, r->halt_steps, m, r->index_size,
                                         r->windows);
      if (!res.well_formed) return r->name + " reported ill-formed";
      if (std::abs(res.value - exact) > 1.0 / double(m))
        return r->name + " at accuracy " + std::to_string(m) + " off by " +
               std::to_string(std::abs(res.value - exact));
    }
  }
  return "";
}

std::string criterion_binary_search() {
  for (const auto* r : witnesses()) {
    double lambda = solve_opt(r->problem(), r->witness_input);
    for (int b : {3, 8, 12}) {
      int calls = 0;
      BinarySearchResult s = binary_search_value(
          [&](DyadicValue t) {
            ++calls;
            return lambda >= t.value();
          },
          b);
      if (calls != b || s.oracle_calls != b)
        return r->name + " used " + std::to_string(calls) + " calls at " + std::to_string(b) + " bits";
      long double scaled = (long double)lambda * (long double)(1ll << b);
      std::int64_t expected = (std::int64_t)std::floor(scaled);
      if (std::abs(lambda * std::ldexp(1.0, b) - std::round(lambda * std::ldexp(1.0, b))) < 1e-9)
        expected = (std::int64_t)std::llround(scaled);  // exact dyadic values keep their own cell
      if (s.value.numerator != expected)
        return r->name + " recovered " + std::to_string(s.value.numerator) + " expected " +
               std::to_string(expected);
    }
  }
  // verdict stability under 1e-12 value perturbations
  Rng rng(606);
  for (int trial = 0; trial < 300; ++trial) {
    double f = rng.uniform();
    double g = rng.uniform();
    int b = 1 + int(rng.below(12));
    QopVerdict base = eval_qop_predicate_values(f, g, b);
    for (double d : {-1e-12, 1e-12}) {
      QopVerdict moved = eval_qop_predicate_values(f + d, g - d, b);
      if (!base.boundary_flagged && !moved.boundary_flagged && moved.holds != base.holds)
        return "verdict flipped without a boundary flag";
    }
  }
  return "";
}

std::string criterion_determinism() {
  std::vector<std::vector<std::string>> invocations = {
      {"qopt", "solve", "fixtures/projector_p1.problem.json", "--input", "0", "--samples", "300",
       "--seed", "17"},
      {"construct", "tensor", "fixtures/bell_p2.problem.json", "--input", "0", "--split", "1",
       "--samples", "200", "--seed", "29"},
      {"run", "fixtures/coin_flip.json", "--input", "", "--steps", "1", "--windows", "5"},
      {"maxqtm", "fixtures/const_third.json", "--x", "0", "-t", "3", "-m", "16", "--index-size", "1",
       "--windows", "5"},
      {"fixtures", "regen", "--check"},
  };
  for (const auto& args : invocations) {
    std::ostringstream out1, err1, out2, err2;
    int c1 = cli::dispatch(args, out1, err1);
    int c2 = cli::dispatch(args, out2, err2);
    if (c1 != c2) return args[0] + " exit codes differ";
    if (out1.str() != out2.str()) return args[0] + " output differs between reruns";
  }
  return "";
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "local conditions match global unitarity on 50 seeded tables plus the corpus",
       criterion_well_formedness},
      {2, "acceptance matrices certify Hermitian/PSD/contractive/real and match simulation",
       criterion_matrix_certification},
      {3, "eigenvalue dominates 10^4 samples, refinement within 1e-4, both routes agree",
       criterion_optimization},
      {4, "squaring squares every value with the index size unchanged", criterion_squaring},
      {5, "closure constructions match their analytic formulas", criterion_closures},
      {6, "averaging bounds hold for exponents 1 through 4", criterion_sandwich},
      {7, "acceptance-distance inequality holds on 100 perturbation pairs", criterion_lemma_epsilon},
      {8, "calibrated simulation tracks the exact value within 1/m", criterion_maxqtm},
      {9, "binary search recovers dyadic floors exactly in b calls; verdicts stable",
       criterion_binary_search},
      {10, "seeded reruns reproduce byte-identical output", criterion_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::string detail;
    try {
      detail = c.body();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      std::cout << "[PASS] criterion " << c.number << ": " << c.title << "\n";
    } else {
      std::cout << "[FAIL] criterion " << c.number << ": " << c.title << " -- " << detail << "\n";
      ++failures;
    }
  }
  if (failures != 0) std::cout << failures << " criterion(s) failed\n";
  return failures == 0 ? 0 : 1;
}
