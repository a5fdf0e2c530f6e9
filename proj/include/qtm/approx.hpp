#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qtm/common.hpp"
#include "qtm/decide.hpp"
#include "qtm/evolution.hpp"
#include "qtm/machine.hpp"
#include "qtm/qopt.hpp"
#include "qtm/wellformedness.hpp"

namespace qtm {

// A machine whose amplitudes were rounded to b fractional bits and then
// projected back onto the nearest table satisfying the local well-formedness
// conditions. The achieved amplitude error, not the requested bit count,
// feeds every downstream error budget.
struct QuantizedMachine {
  MachineDescription machine;
  int bits = 0;
  double achieved_error = 0.0;
};

namespace detail {

struct TableSlot {
  int state;
  int written_code;
  int dir_code;
  bool operator<(const TableSlot& o) const {
    if (state != o.state) return state < o.state;
    if (written_code != o.written_code) return written_code < o.written_code;
    return dir_code < o.dir_code;
  }
};

}  // namespace detail

namespace detail {

// Shared machinery: pull the explicit rows of a real-amplitude table into a
// dense rows-by-slots matrix, apply a per-entry transform, project the result
// onto the nearest row-orthonormal matrix (polar factor), and write it back.
inline MachineDescription transform_and_project(const MachineDescription& m,
                                                const std::function<double(double, std::size_t)>& transform,
                                                double* achieved_vs_original) {
  std::vector<int> row_keys;
  std::map<TableSlot, int> slot_index;
  for (int key = 0; key < int(m.delta.size()); ++key) {
    if (m.delta[key].empty()) continue;
    row_keys.push_back(key);
    for (const auto& t : m.delta[key]) {
      if (std::abs(t.amp.imag()) > 1e-15)
        throw Error(errkind::kReunitarization, "table projection handles real amplitudes only");
      slot_index.emplace(TableSlot{t.state, m.sym_code(t.written), dir_code(t.dirs)}, int(slot_index.size()));
    }
  }
  const std::size_t rows = row_keys.size(), cols = slot_index.size();
  RealMatrix original(rows, std::vector<double>(cols, 0.0));
  RealMatrix rough(rows, std::vector<double>(cols, 0.0));
  std::size_t entry_counter = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (const auto& t : m.delta[row_keys[r]]) {
      int c = slot_index.at(TableSlot{t.state, m.sym_code(t.written), dir_code(t.dirs)});
      original[r][c] += t.amp.real();
    }
    for (std::size_t c = 0; c < cols; ++c)
      if (original[r][c] != 0.0) rough[r][c] = transform(original[r][c], entry_counter++);
  }

  RealMatrix gram(rows, std::vector<double>(rows, 0.0));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < rows; ++j)
      for (std::size_t c = 0; c < cols; ++c) gram[i][j] += rough[i][c] * rough[j][c];
  Spectrum sp = jacobi_spectrum(gram);
  if (sp.eigenvalues.front() < 1e-9)
    throw Error(errkind::kReunitarization, "rows degenerated under the requested transform");
  RealMatrix inv_sqrt(rows, std::vector<double>(rows, 0.0));
  for (std::size_t k = 0; k < rows; ++k) {
    double w = 1.0 / std::sqrt(sp.eigenvalues[k]);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < rows; ++j) inv_sqrt[i][j] += w * sp.vectors[k][i] * sp.vectors[k][j];
  }
  RealMatrix projected = matmul(inv_sqrt, rough);

  if (achieved_vs_original != nullptr) {
    double achieved = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        achieved = std::max(achieved, std::abs(projected[r][c] - original[r][c]));
    *achieved_vs_original = achieved;
  }

  MachineDescription out = m;
  std::vector<TableSlot> slots(cols);
  for (const auto& [slot, idx] : slot_index) slots[idx] = slot;
  for (std::size_t r = 0; r < rows; ++r) {
    auto& row = out.delta[row_keys[r]];
    row.clear();
    for (std::size_t c = 0; c < cols; ++c) {
      if (std::abs(projected[r][c]) <= 1e-14) continue;
      DeltaTarget t;
      t.state = slots[c].state;
      t.written = m.sym_decode(slots[c].written_code);
      int code = slots[c].dir_code;
      t.dirs.assign(m.tape_count(), Dir::N);
      for (int i = m.tape_count() - 1; i >= 0; --i) {
        t.dirs[i] = Dir(code % 3 - 1);
        code /= 3;
      }
      t.amp = projected[r][c];
      row.push_back(t);
    }
  }
  if (!locally_well_formed(out))
    throw Error(errkind::kReunitarization, "projection did not restore the local conditions");
  return out;
}

}  // namespace detail

inline QuantizedMachine quantize_machine(const MachineDescription& m, int bits) {
  if (bits < 1 || bits > 52) throw Error(errkind::kValidation, "quantization bits must be in [1, 52]");
  QuantizedMachine out;
  out.bits = bits;
  const double scale = std::ldexp(1.0, bits);
  out.machine = detail::transform_and_project(
      m, [scale](double a, std::size_t) { return std::round(a * scale) / scale; }, &out.achieved_error);
  return out;
}

// A nearby valid table: Gaussian noise on every explicit amplitude, projected
// back onto the local conditions. Seeded; used for the perturbation-pair
// experiments.
inline MachineDescription perturb_and_project(const MachineDescription& m, std::uint64_t seed,
                                              double magnitude, double* achieved = nullptr) {
  Rng rng(seed);
  std::vector<double> noise;
  for (const auto& row : m.delta)
    for (std::size_t i = 0; i < row.size(); ++i) noise.push_back(rng.gaussian() * magnitude);
  return detail::transform_and_project(
      m, [&noise](double a, std::size_t k) { return a + noise[k % noise.size()]; }, achieved);
}

// Sound a-priori bound on the 2-norm of the step-operator difference of two
// structurally identical tables, via the column/row L1 norms computed at the
// table level.
inline double table_step_norm_bound(const MachineDescription& a, const MachineDescription& b) {
  auto rows_a = a.effective_delta();
  auto rows_b = b.effective_delta();
  double col_l1 = 0.0;
  std::map<int, double> incoming;  // per target state
  for (std::size_t key = 0; key < rows_a.size(); ++key) {
    std::map<std::tuple<int, int, int>, double> diff;
    for (const auto& t : rows_a[key])
      diff[{t.state, a.sym_code(t.written), detail::dir_code(t.dirs)}] += t.amp.real();
    for (const auto& t : rows_b[key])
      diff[{t.state, b.sym_code(t.written), detail::dir_code(t.dirs)}] -= t.amp.real();
    double l1 = 0.0;
    for (const auto& [slot, d] : diff) {
      l1 += std::abs(d);
      incoming[std::get<0>(slot)] += std::abs(d);
    }
    col_l1 = std::max(col_l1, l1);
  }
  double row_l1 = 0.0;
  for (const auto& [state, mass] : incoming) row_l1 = std::max(row_l1, mass);
  return std::sqrt(col_l1 * row_l1);
}

// --- quantized simulation ---------------------------------------------------------

struct QuantizedRun {
  double eta_exact = 0.0;
  double eta_quantized = 0.0;
  double distance = 0.0;  // final-state 2-norm difference
  double slack = 0.0;     // distance - |eta difference|, nonnegative when the bound holds
  double achieved_error = 0.0;
  bool bound_holds = false;
};

// Runs the machine and its quantization side by side and checks the
// acceptance-versus-distance inequality |eta_M - eta_N| <= ||u - v||.
inline QuantizedRun quantize_and_simulate(const MachineDescription& m, int bits, const std::string& x,
                                          int steps, const std::vector<int>& windows) {
  QuantizedMachine q = quantize_machine(m, bits);
  ConfigurationSpace space(m, windows);
  EvolutionOperator exact(m, space);
  EvolutionOperator quant(q.machine, space);
  std::vector<Complex> ve = encode_input(space, x);
  std::vector<Complex> vq = ve;
  for (int s = 1; s <= steps; ++s) {
    ve = exact.apply(ve);
    vq = quant.apply(vq);
    check_seam(space, ve, s);
    check_seam(space, vq, s);
  }
  QuantizedRun out;
  out.achieved_error = q.achieved_error;
  out.eta_exact = acceptance_probability(space, ve);
  out.eta_quantized = acceptance_probability(space, vq);
  double d2 = 0.0;
  for (std::size_t i = 0; i < ve.size(); ++i) d2 += std::norm(ve[i] - vq[i]);
  out.distance = std::sqrt(d2);
  out.slack = out.distance - std::abs(out.eta_exact - out.eta_quantized);
  out.bound_holds = out.slack >= -1e-12;
  if (!out.bound_holds)
    throw Error(errkind::kInvariant, "acceptance difference exceeded the final-state distance");
  return out;
}

struct LemmaEpsilonReport {
  double eta_difference = 0.0;
  double state_distance = 0.0;
  double slack = 0.0;
  bool holds = false;
};

// |eta_M(phi) - eta_N(psi)| <= ||U_M phi - U_N psi|| for final vectors over a
// common configuration space.
inline LemmaEpsilonReport check_lemma_epsilon(const ConfigurationSpace& space,
                                              const std::vector<Complex>& final_a,
                                              const std::vector<Complex>& final_b) {
  LemmaEpsilonReport r;
  r.eta_difference = std::abs(acceptance_probability(space, final_a) - acceptance_probability(space, final_b));
  double d2 = 0.0;
  for (std::size_t i = 0; i < final_a.size(); ++i) d2 += std::norm(final_a[i] - final_b[i]);
  r.state_distance = std::sqrt(d2);
  r.slack = r.state_distance - r.eta_difference;
  r.holds = r.slack >= -1e-12;
  return r;
}

// --- calibrated evaluators ---------------------------------------------------------

// Smallest bit count whose a-priori bound meets the target; the baseline
// comes from the calibration sweeps over the fixture families.
inline int calibrate_bits(const MachineDescription& m, double per_step_budget) {
  for (int b = 6; b <= 52; ++b) {
    try {
      QuantizedMachine q = quantize_machine(m, b);
      if (table_step_norm_bound(m, q.machine) <= per_step_budget) return b;
    } catch (const Error& e) {
      if (e.kind != errkind::kReunitarization) throw;
    }
  }
  return 52;
}

struct ApproxEvalResult {
  double value = 0.0;
  int bits = 0;
  double error_bound = 0.0;
  bool well_formed = true;
};

// Acceptance probability of the universally-simulated machine: the code is
// checked for well-formedness (ill-formed codes are rejected with probability
// 1), quantized with a bit count calibrated so the final-state distance stays
// within 1/m, and simulated for t steps.
inline ApproxEvalResult eval_qap(const MachineDescription& code, const std::string& x, int t, int m,
                                 const std::vector<int>& windows) {
  ApproxEvalResult out;
  if (m < 1) throw Error(errkind::kValidation, "accuracy parameter must be positive");
  if (!locally_well_formed(code)) {
    out.well_formed = false;
    out.error_bound = 0.0;
    out.value = 0.0;
    return out;
  }
  double budget = 1.0 / double(m) / std::max(1, t);
  out.bits = calibrate_bits(code, budget);
  QuantizedMachine q = quantize_machine(code, out.bits);
  out.error_bound = double(t) * table_step_norm_bound(code, q.machine);

  ConfigurationSpace space(code, windows);
  EvolutionOperator quant(q.machine, space);
  std::vector<Complex> v = encode_input(space, x);
  for (int s = 1; s <= t; ++s) {
    v = quant.apply(v);
    check_seam(space, v, s);
  }
  out.value = acceptance_probability(space, v);
  return out;
}

// Maximal acceptance probability over quantum indices of the simulated code:
// the quantized machine's acceptance matrix is extracted and eigensolved,
// with bits calibrated so the eigenvalue moves by at most 1/m.
inline ApproxEvalResult eval_maxqtm(const MachineDescription& code, const std::string& x, int t, int m,
                                    int index_size, const std::vector<int>& windows) {
  ApproxEvalResult out;
  if (m < 1) throw Error(errkind::kValidation, "accuracy parameter must be positive");
  if (!locally_well_formed(code)) {
    out.well_formed = false;
    return out;
  }
  double factor = 2.0 * std::sqrt(double(1ull << index_size)) * 2.0 * double(t);
  // |lambda(P') - lambda(P)| <= 2||dK|| + ||dK||^2 with ||dK|| <= factor * ||dU||
  double budget = 1.0 / double(m) / (2.5 * std::max(1.0, factor));
  out.bits = calibrate_bits(code, budget);
  QuantizedMachine q = quantize_machine(code, out.bits);
  double du = table_step_norm_bound(code, q.machine);
  double dk = factor * du;
  out.error_bound = 2.0 * dk + dk * dk;

  InputRule rule;
  rule.windows = windows;
  rule.halt_steps = t;
  rule.verify_halt = false;
  out.value = solve_opt(OptProblem::for_machine(q.machine, index_size, rule), x);
  return out;
}

// --- approximate reducibility -------------------------------------------------------

// |f(x) - g(k(x, m))| <= 1/m over the fixture inputs and accuracy range.
struct ApproxReductionReport {
  struct Line {
    std::string input;
    int m;
    double gap;
    double bound;
    bool ok;
  };
  std::vector<Line> lines;
  bool passed = true;
};

inline ApproxReductionReport check_approx_reduction(
    const std::function<double(const std::string&)>& f,
    const std::function<double(const std::string&)>& g,
    const std::function<std::string(const std::string&, int)>& k, const std::vector<std::string>& inputs,
    const std::vector<int>& accuracies) {
  ApproxReductionReport report;
  for (const auto& x : inputs) {
    for (int m : accuracies) {
      double gap = std::abs(f(x) - g(k(x, m)));
      bool ok = gap <= 1.0 / double(m) + 1e-12;
      report.lines.push_back({x, m, gap, 1.0 / double(m), ok});
      if (!ok) report.passed = false;
    }
  }
  return report;
}

// Transfer of approximability through a universal function: if every fixture
// reduces to the universal function within 1/(2p), and a target evaluator
// tracks the universal function within 1/(2p), the composed margins stay
// within 1/p by the triangle inequality. Verified with computed margins.
struct TransferCase {
  std::string name;
  std::function<double(const std::string&)> exact;                     // g
  std::function<double(const std::string&, int)> reduced_universal;    // f(k_g(x, m))
  std::function<double(const std::string&, int)> reduced_target;       // r(k_g(x, m))
};

struct TransferReport {
  struct Line {
    std::string name;
    std::string input;
    int p;
    double reduction_gap;  // |g - f(k)|
    double target_gap;     // |f(k) - r(k)|
    double total_gap;      // |g - r(k)|
    bool ok;
  };
  std::vector<Line> lines;
  bool passed = true;
};

inline TransferReport universality_transfer(const std::vector<TransferCase>& cases,
                                            const std::vector<std::string>& inputs,
                                            const std::vector<int>& polynomials) {
  TransferReport report;
  for (const auto& c : cases) {
    for (const auto& x : inputs) {
      for (int p : polynomials) {
        int m = 2 * p;
        double g = c.exact(x);
        double fk = c.reduced_universal(x, m);
        double rk = c.reduced_target(x, m);
        TransferReport::Line line;
        line.name = c.name;
        line.input = x;
        line.p = p;
        line.reduction_gap = std::abs(g - fk);
        line.target_gap = std::abs(fk - rk);
        line.total_gap = std::abs(g - rk);
        line.ok = line.reduction_gap <= 0.5 / p + 1e-12 && line.target_gap <= 0.5 / p + 1e-12 &&
                  line.total_gap <= 1.0 / p + 1e-12;
        report.lines.push_back(line);
        if (!line.ok) report.passed = false;
      }
    }
  }
  return report;
}

}  // namespace qtm
