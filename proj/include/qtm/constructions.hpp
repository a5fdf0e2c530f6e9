#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qtm/common.hpp"
#include "qtm/qopt.hpp"

namespace qtm {

// A clean generator machine plus the number of output qubits it produces.
struct QubitSource {
  MachineDescription generator;
  int qubits = 1;
  InputRule rule;
};

// g(x) = max over classical y of f(<x,y>). Realized as observe-then-dispatch:
// the first q qubits of the new index are observed, which makes the assembled
// acceptance matrix block diagonal over y.
inline OptProblem max_over_classical(const OptProblem& f, int classical_bits) {
  if (classical_bits < 0 || classical_bits > 4)
    throw Error(errkind::kValidation, "classical index length capped at 4 bits");
  if (classical_bits == 0) return f;
  OptProblem p;
  p.kind = OptProblem::Kind::MaxOverClassical;
  p.inner = std::make_shared<OptProblem>(f);
  p.classical_bits = classical_bits;
  return p;
}

// g(x) = sum_y |<y|phi_x>|^2 f(<x,y>), with phi_x produced by the source.
inline OptProblem convex_combine(const OptProblem& f, const QubitSource& source) {
  OptProblem p;
  p.kind = OptProblem::Kind::ConvexCombine;
  p.inner = std::make_shared<OptProblem>(f);
  p.source_machine = source.generator;
  p.source_qubits = source.qubits;
  if ((1ull << p.index_size()) > kIndexDimensionCap)
    throw Error(errkind::kDimensionCap, "combined index blocks exceed the dimension cap");
  return p;
}

// g(x) = prod over y of f(<x,y>), one independent simulation round per y on
// its own index block.
inline OptProblem product_over_all(const OptProblem& f, int factor_bits) {
  if (factor_bits < 0 || factor_bits > 2)
    throw Error(errkind::kValidation, "factor length capped at 2 bits");
  OptProblem p;
  p.kind = OptProblem::Kind::ProductOverAll;
  p.inner = std::make_shared<OptProblem>(f);
  p.factor_bits = factor_bits;
  if ((1ull << p.index_size()) > kIndexDimensionCap)
    throw Error(errkind::kDimensionCap, "product index blocks exceed the dimension cap");
  return p;
}

// g(x) = f(k(x)) by rewiring the input.
inline OptProblem compose_with_fp(const OptProblem& f, std::function<std::string(const std::string&)> k) {
  OptProblem p;
  p.kind = OptProblem::Kind::ComposeFP;
  p.inner = std::make_shared<OptProblem>(f);
  p.fp_map = std::move(k);
  return p;
}

// --- analytic oracles ------------------------------------------------------------

inline double analytic_max_value(const OptProblem& f, const std::string& x, int classical_bits) {
  double best = 0.0;
  for (std::uint64_t y = 0; y < (1ull << classical_bits); ++y)
    best = std::max(best, solve_opt(f, pair_string(x, classical_string(y, classical_bits))));
  return best;
}

inline double analytic_convex_value(const OptProblem& f, const QubitSource& source, const std::string& x) {
  SourceDistribution dist = run_qubit_source(source.generator, source.qubits, x, source.rule);
  double total = 0.0;
  for (std::uint64_t y = 0; y < dist.weights.size(); ++y) {
    if (dist.weights[y] == 0.0) continue;
    total += dist.weights[y] * solve_opt(f, pair_string(x, classical_string(y, source.qubits)));
  }
  return total;
}

inline double analytic_product_value(const OptProblem& f, const std::string& x, int factor_bits) {
  double total = 1.0;
  for (std::uint64_t y = 0; y < (1ull << factor_bits); ++y)
    total *= solve_opt(f, pair_string(x, classical_string(y, factor_bits)));
  return total;
}

// --- tensor-product index optimization --------------------------------------------

// sup of the acceptance over product indices phi_1 (x) phi_2, by alternating
// eigen-optimization over the factors. The paper gives no convergence
// guarantee for this loop; the result ships with a sampling lower bound and
// the unrestricted eigenvalue upper bound.
struct TensorIndexReport {
  double value = 0.0;
  bool converged = false;
  int sweeps = 0;
  double sample_max = 0.0;
  double lambda_max = 0.0;  // unrestricted upper bound
};

inline TensorIndexReport tensor_index_value(const OptProblem& prob, const std::string& x,
                                            int first_factor_qubits, int samples = 2000,
                                            std::uint64_t seed = 12345, int max_sweeps = 100) {
  const int total = prob.index_size();
  const int p1 = first_factor_qubits;
  const int p2 = total - p1;
  if (p1 < 1 || p2 < 1) throw Error(errkind::kValidation, "both factors need at least one qubit");
  OptMatrix full = extract_opt_matrix(prob, x);
  const std::uint64_t d1 = 1ull << p1, d2 = 1ull << p2;

  auto entry = [&](std::uint64_t i1, std::uint64_t i2, std::uint64_t j1, std::uint64_t j2) {
    return full.entries[(i1 << p2) | i2][(j1 << p2) | j2];
  };

  std::vector<double> phi1(d1, 0.0), phi2(d2, 1.0 / std::sqrt(double(d2)));
  TensorIndexReport report;
  report.lambda_max = full.max_eigenvalue;
  double prev = -1.0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    RealMatrix m1(d1, std::vector<double>(d1, 0.0));
    for (std::uint64_t i1 = 0; i1 < d1; ++i1)
      for (std::uint64_t j1 = 0; j1 < d1; ++j1)
        for (std::uint64_t i2 = 0; i2 < d2; ++i2)
          for (std::uint64_t j2 = 0; j2 < d2; ++j2)
            m1[i1][j1] += phi2[i2] * phi2[j2] * entry(i1, i2, j1, j2);
    MaxEigen e1 = hermitian_max_eigen(m1);
    phi1 = e1.vector;

    RealMatrix m2(d2, std::vector<double>(d2, 0.0));
    for (std::uint64_t i2 = 0; i2 < d2; ++i2)
      for (std::uint64_t j2 = 0; j2 < d2; ++j2)
        for (std::uint64_t i1 = 0; i1 < d1; ++i1)
          for (std::uint64_t j1 = 0; j1 < d1; ++j1)
            m2[i2][j2] += phi1[i1] * phi1[j1] * entry(i1, i2, j1, j2);
    MaxEigen e2 = hermitian_max_eigen(m2);
    phi2 = e2.vector;

    report.sweeps = sweep;
    report.value = e2.lambda;
    if (std::abs(report.value - prev) < 1e-12) {
      report.converged = true;
      break;
    }
    prev = report.value;
  }

  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    auto a = random_unit_vector(rng, d1);
    auto b = random_unit_vector(rng, d2);
    Complex q = 0.0;
    for (std::uint64_t i1 = 0; i1 < d1; ++i1)
      for (std::uint64_t i2 = 0; i2 < d2; ++i2)
        for (std::uint64_t j1 = 0; j1 < d1; ++j1)
          for (std::uint64_t j2 = 0; j2 < d2; ++j2)
            q += std::conj(a[i1] * b[i2]) * entry(i1, i2, j1, j2) * (a[j1] * b[j2]);
    report.sample_max = std::max(report.sample_max, q.real());
  }
  return report;
}

// --- averaging sandwich --------------------------------------------------------------

// g = 2^-p * sum over classical indices s of the powered witness's acceptance
// on s, checked against g <= f(x)^m <= 2^p g.
struct SandwichReport {
  double average = 0.0;     // g
  double powered = 0.0;     // f(x)^m
  double scale = 1.0;       // 2^p
  double lower_margin = 0.0;
  double upper_margin = 0.0;
  bool holds = false;
};

inline SandwichReport averaging_sandwich(const OptProblem& prob, const std::string& x, int m,
                                         double slack = tol::kMatrixCert) {
  if (m < 1 || m > 4) throw Error(errkind::kValidation, "sandwich exponent must be in [1, 4]");
  const int p = prob.index_size();
  ComplexMatrix km = acceptance_kernel(power_problem(prob, m), x);
  double g = 0.0;
  for (std::size_t s = 0; s < km.size(); ++s) g += km[s][s].real();
  g /= double(1ull << p);

  SandwichReport report;
  report.average = g;
  report.powered = std::pow(solve_opt(prob, x), m);
  report.scale = double(1ull << p);
  report.lower_margin = report.powered - g;
  report.upper_margin = report.scale * g - report.powered;
  report.holds = report.lower_margin >= -slack && report.upper_margin >= -slack;
  if (!report.holds)
    throw Error(errkind::kBoundViolation, "averaging bounds violated for exponent " + std::to_string(m));
  return report;
}

}  // namespace qtm
