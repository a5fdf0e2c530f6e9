#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qtm/common.hpp"
#include "qtm/configuration.hpp"
#include "qtm/decide.hpp"
#include "qtm/evolution.hpp"
#include "qtm/machine.hpp"
#include "qtm/wellformedness.hpp"

namespace qtm {

using ComplexMatrix = std::vector<std::vector<Complex>>;

inline ComplexMatrix complex_identity(std::size_t n) {
  ComplexMatrix m(n, std::vector<Complex>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline ComplexMatrix cmatmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  std::size_t n = a.size(), k = b.size(), p = b[0].size();
  ComplexMatrix out(n, std::vector<Complex>(p, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      Complex aij = a[i][j];
      if (aij == Complex(0.0)) continue;
      for (std::size_t c = 0; c < p; ++c) out[i][c] += aij * b[j][c];
    }
  return out;
}

inline ComplexMatrix cadjoint(const ComplexMatrix& a) {
  std::size_t n = a.size(), m = a[0].size();
  ComplexMatrix out(m, std::vector<Complex>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[j][i] = std::conj(a[i][j]);
  return out;
}

inline constexpr std::uint64_t kIndexDimensionCap = 1ull << 12;
inline constexpr int kHaltDetectionCap = 64;

// Tape geometry and timing for evaluating a witness machine on (x, index).
struct InputRule {
  std::vector<int> windows;  // empty: default window per tape
  int halt_steps = -1;       // -1: detect synchronized halting
  bool verify_halt = true;   // off for approximately-halting (quantized) tables
  std::uint64_t space_cap = kDefaultSpaceCap;

  std::vector<int> resolved_windows(const MachineDescription& m) const {
    if (windows.empty()) return std::vector<int>(m.tape_count(), kDefaultWindow);
    return windows;
  }
};

// A witnessed optimization problem. The base case is a machine with a
// declared quantum-index size; the other kinds are operator-level
// compositions whose acceptance matrices are assembled from the simulated
// matrices of their parts.
struct OptProblem {
  enum class Kind { Machine, MaxOverClassical, ConvexCombine, ProductOverAll, Power, Square, ComposeFP };
  Kind kind = Kind::Machine;

  MachineDescription machine;  // Kind::Machine
  int declared_index_size = 0;
  InputRule rule;

  std::shared_ptr<const OptProblem> inner;
  int classical_bits = 0;                                  // MaxOverClassical
  MachineDescription source_machine;                       // ConvexCombine generator
  int source_qubits = 0;                                   // ConvexCombine
  int factor_bits = 0;                                     // ProductOverAll
  int exponent = 1;                                        // Power
  std::function<std::string(const std::string&)> fp_map;   // ComposeFP

  static OptProblem for_machine(MachineDescription m, int index_size, InputRule rule = {}) {
    OptProblem p;
    p.kind = Kind::Machine;
    p.machine = std::move(m);
    p.declared_index_size = index_size;
    p.rule = std::move(rule);
    if (index_size < 0) throw Error(errkind::kValidation, "index size must be nonnegative");
    return p;
  }

  int index_size() const {
    switch (kind) {
      case Kind::Machine: return declared_index_size;
      case Kind::MaxOverClassical: return classical_bits + inner->index_size();
      case Kind::ConvexCombine: return (1 << source_qubits) * inner->index_size();
      case Kind::ProductOverAll: return (1 << factor_bits) * inner->index_size();
      case Kind::Power:
      case Kind::Square:
      case Kind::ComposeFP: return inner->index_size();
    }
    return 0;
  }
};

// --- machine-level pipeline ---------------------------------------------------

// Everything needed to evaluate one witness machine on one classical input:
// the configuration space, the step operator, the synchronized halting time,
// and the basis embedding of the index cells.
class WitnessPipeline {
 public:
  WitnessPipeline(const MachineDescription& m, int index_size, const std::string& x,
                  const InputRule& rule)
      : machine_(m),
        space_(m, rule.resolved_windows(m), rule.space_cap),
        op_(m, space_),
        index_size_(index_size),
        input_(x) {
    if (!m.flags.normal_form || m.flags.oracle)
      throw Error(errkind::kValidation, "witness machines must be oracle-free and in normal form");
    if (m.finals.empty()) throw Error(errkind::kValidation, "witness machines need a final state");
    if ((1ull << index_size) > kIndexDimensionCap)
      throw Error(errkind::kDimensionCap, "index space exceeds the 2^12 dimension cap");
    if (!locally_well_formed(m))
      throw Error(errkind::kValidation, "witness machine fails the local well-formedness conditions");

    dim_ = 1ull << index_size;
    basis_.reserve(dim_);
    for (std::uint64_t t = 0; t < dim_; ++t) {
      std::string bits;
      for (int b = index_size - 1; b >= 0; --b) bits += ((t >> b) & 1) ? '1' : '0';
      basis_.push_back(space_.index_of(classical_configuration(space_, x, bits)));
    }
    halt_steps_ = rule.halt_steps >= 0 ? rule.halt_steps : detect_halt();
    if (rule.halt_steps >= 0 && rule.verify_halt) verify_halt(rule.halt_steps);
  }

  const ConfigurationSpace& space() const { return space_; }
  const EvolutionOperator& op() const { return op_; }
  int halt_steps() const { return halt_steps_; }
  std::uint64_t index_dim() const { return dim_; }

  std::vector<Complex> embed(const Qustring& phi) const {
    std::vector<Complex> v(space_.size(), 0.0);
    for (std::uint64_t t = 0; t < dim_; ++t) v[basis_[t]] += phi.amplitudes[t];
    return v;
  }

  std::vector<Complex> project_accept(std::vector<Complex> v) const {
    int one = machine_.tapes[0].index_of('1');
    for (std::uint64_t c = 0; c < space_.size(); ++c)
      if (v[c] != Complex(0.0) && space_.cell_of(c, 0, 0) != one) v[c] = 0.0;
    return v;
  }

  // forward-evolved and accept-projected basis columns; the simulation side
  // of every cross-check
  std::vector<std::vector<Complex>> projected_columns() const {
    std::vector<std::vector<Complex>> cols;
    cols.reserve(dim_);
    for (std::uint64_t t = 0; t < dim_; ++t) {
      std::vector<Complex> v(space_.size(), 0.0);
      v[basis_[t]] = 1.0;
      for (int s = 0; s < halt_steps_; ++s) {
        v = op_.apply(v);
        check_seam(space_, v, s + 1);
      }
      cols.push_back(project_accept(std::move(v)));
    }
    return cols;
  }

  // The acceptance kernel: run forward, copy the output bit (projection onto
  // the accepting branch), run the reversal, and read the amplitudes back off
  // the basis configurations. Entry (s,t) is the post-selected amplitude for
  // input t landing on the shape that re-encodes (x, s).
  ComplexMatrix kernel() const {
    ComplexMatrix k(dim_, std::vector<Complex>(dim_, 0.0));
    auto cols = projected_columns();
    for (std::uint64_t t = 0; t < dim_; ++t) {
      std::vector<Complex> v = std::move(cols[t]);
      for (int s = 0; s < halt_steps_; ++s) v = op_.apply_adjoint(v);
      for (std::uint64_t s = 0; s < dim_; ++s) k[s][t] = v[basis_[s]];
    }
    return k;
  }

  double simulate_acceptance(const Qustring& phi) const {
    std::vector<Complex> v = embed(phi);
    for (int s = 0; s < halt_steps_; ++s) {
      v = op_.apply(v);
      check_seam(space_, v, s + 1);
    }
    return acceptance_probability(space_, v);
  }

 private:
  int detect_halt() const {
    std::vector<std::vector<Complex>> vs;
    for (std::uint64_t t = 0; t < dim_; ++t) {
      std::vector<Complex> v(space_.size(), 0.0);
      v[basis_[t]] = 1.0;
      vs.push_back(std::move(v));
    }
    std::vector<int> first_halt(dim_, -1);
    for (int step = 1; step <= kHaltDetectionCap; ++step) {
      bool all = true;
      for (std::uint64_t t = 0; t < dim_; ++t) {
        vs[t] = op_.apply(vs[t]);
        check_seam(space_, vs[t], step);
        if (first_halt[t] < 0 && final_state_mass(space_, vs[t]) >= 1.0 - tol::kUnitNorm)
          first_halt[t] = step;
        if (first_halt[t] < 0) all = false;
      }
      if (all) {
        for (std::uint64_t t = 1; t < dim_; ++t)
          if (first_halt[t] != first_halt[0])
            throw Error(errkind::kNotSynchronized,
                        "basis inputs halt at different times (" + std::to_string(first_halt[0]) +
                            " vs " + std::to_string(first_halt[t]) + ")");
        return first_halt[0];
      }
    }
    throw Error(errkind::kNotSynchronized,
                "no synchronized halting time within " + std::to_string(kHaltDetectionCap) + " steps");
  }

  void verify_halt(int steps) const {
    for (std::uint64_t t = 0; t < dim_; ++t) {
      std::vector<Complex> v(space_.size(), 0.0);
      v[basis_[t]] = 1.0;
      for (int s = 0; s < steps; ++s) v = op_.apply(v);
      if (final_state_mass(space_, v) < 1.0 - tol::kUnitNorm)
        throw Error(errkind::kNotSynchronized, "declared halting time leaves non-final mass");
    }
  }

  const MachineDescription& machine_;
  ConfigurationSpace space_;
  EvolutionOperator op_;
  int index_size_;
  std::string input_;
  std::uint64_t dim_ = 0;
  std::vector<std::uint64_t> basis_;
  int halt_steps_ = 0;
};

// --- kernel assembly for composed problems ------------------------------------

namespace detail {

// index-space helpers: qubit groups are blocks of the basis bit string,
// leftmost group first
inline std::uint64_t group_bits(std::uint64_t n, int total_qubits, int group, int group_size) {
  int shift = total_qubits - (group + 1) * group_size;
  return (n >> shift) & ((1ull << group_size) - 1);
}

// mask of the bits belonging to one qubit group
inline std::uint64_t block_mask(int total_qubits, int group, int group_size) {
  int shift = total_qubits - (group + 1) * group_size;
  return ((1ull << group_size) - 1) << shift;
}

}  // namespace detail

inline ComplexMatrix acceptance_kernel(const OptProblem& prob, const std::string& x);

// weights |<y|phi_x>|^2 read off a clean generator machine run on input x
struct SourceDistribution {
  std::vector<Complex> amplitudes;  // 2^l entries
  std::vector<double> weights;
};

inline SourceDistribution run_qubit_source(const MachineDescription& gen, int qubits,
                                           const std::string& x, const InputRule& rule = {}) {
  if (!gen.flags.stationary || !gen.flags.normal_form)
    throw Error(errkind::kSourceNotClean, "generator must be stationary and in normal form");
  ConfigurationSpace space(gen, rule.resolved_windows(gen), rule.space_cap);
  EvolutionOperator op(gen, space);
  std::vector<Complex> v = encode_input(space, x);
  int steps = rule.halt_steps;
  if (steps < 0) {
    steps = 0;
    for (int s = 1; s <= kHaltDetectionCap; ++s) {
      v = op.apply(v);
      check_seam(space, v, s);
      if (final_state_mass(space, v) >= 1.0 - tol::kUnitNorm) {
        steps = s;
        break;
      }
    }
    if (steps == 0) throw Error(errkind::kSourceNotClean, "generator does not halt");
  } else {
    for (int s = 1; s <= steps; ++s) v = op.apply(v);
  }

  // clean halt: single final state, heads home, qubits in cells [0, l), all
  // other cells and tapes blank
  SourceDistribution dist;
  dist.amplitudes.assign(1ull << qubits, 0.0);
  double captured = 0.0;
  for (std::uint64_t c = 0; c < space.size(); ++c) {
    if (v[c] == Complex(0.0)) continue;
    Configuration conf = space.configuration_of(c);
    bool clean = gen.is_final(conf.state);
    for (int i = 0; i < gen.tape_count() && clean; ++i) clean = conf.heads[i] == 0;
    std::uint64_t y = 0;
    for (int q = 0; q < qubits && clean; ++q) {
      char ch = gen.tapes[0].gamma[conf.tapes[0][q]];
      if (ch != '0' && ch != '1') clean = false;
      y = (y << 1) | std::uint64_t(ch == '1');
    }
    for (int i = 0; i < gen.tape_count() && clean; ++i)
      for (int cell = (i == 0 ? qubits : 0); cell < space.windows()[i]; ++cell)
        if (conf.tapes[i][cell] != gen.tapes[i].blank_index()) clean = false;
    if (!clean)
      throw Error(errkind::kSourceNotClean, "generator halt leaves junk outside the output qubits");
    dist.amplitudes[y] += v[c];
    captured += std::norm(v[c]);
  }
  if (std::abs(captured - 1.0) > tol::kUnitNorm)
    throw Error(errkind::kSourceNotClean, "generator output is not a unit qustring");
  dist.weights.resize(dist.amplitudes.size());
  for (std::size_t y = 0; y < dist.amplitudes.size(); ++y) dist.weights[y] = std::norm(dist.amplitudes[y]);
  return dist;
}

inline std::string classical_string(std::uint64_t y, int bits) {
  std::string s;
  for (int b = bits - 1; b >= 0; --b) s += ((y >> b) & 1) ? '1' : '0';
  return s;
}

inline ComplexMatrix acceptance_kernel(const OptProblem& prob, const std::string& x) {
  using Kind = OptProblem::Kind;
  const std::uint64_t dim = 1ull << prob.index_size();
  if (dim > kIndexDimensionCap)
    throw Error(errkind::kDimensionCap, "index space exceeds the 2^12 dimension cap");

  switch (prob.kind) {
    case Kind::Machine: {
      WitnessPipeline pipe(prob.machine, prob.declared_index_size, x, prob.rule);
      return pipe.kernel();
    }
    case Kind::MaxOverClassical: {
      // observe the leading classical qubits, then dispatch: the observation
      // removes interference between branches, so the assembled matrix is
      // block diagonal over the observed value
      ComplexMatrix k(dim, std::vector<Complex>(dim, 0.0));
      const std::uint64_t block = 1ull << prob.inner->index_size();
      for (std::uint64_t y = 0; y < (1ull << prob.classical_bits); ++y) {
        ComplexMatrix ky = acceptance_kernel(*prob.inner, pair_string(x, classical_string(y, prob.classical_bits)));
        for (std::uint64_t s = 0; s < block; ++s)
          for (std::uint64_t t = 0; t < block; ++t) k[y * block + s][y * block + t] = ky[s][t];
      }
      return k;
    }
    case Kind::ConvexCombine: {
      SourceDistribution dist = run_qubit_source(prob.source_machine, prob.source_qubits, x);
      const int p = prob.inner->index_size();
      const int total = prob.index_size();
      ComplexMatrix k(dim, std::vector<Complex>(dim, 0.0));
      for (std::uint64_t y = 0; y < dist.weights.size(); ++y) {
        if (dist.weights[y] == 0.0) continue;
        ComplexMatrix ky =
            acceptance_kernel(*prob.inner, pair_string(x, classical_string(y, prob.source_qubits)));
        for (std::uint64_t s = 0; s < dim; ++s) {
          std::uint64_t sy = detail::group_bits(s, total, int(y), p);
          for (std::uint64_t t = 0; t < dim; ++t) {
            if ((s & ~detail::block_mask(total, int(y), p)) != (t & ~detail::block_mask(total, int(y), p))) continue;
            std::uint64_t ty = detail::group_bits(t, total, int(y), p);
            k[s][t] += dist.weights[y] * ky[sy][ty];
          }
        }
      }
      return k;
    }
    case Kind::ProductOverAll: {
      const int p = prob.inner->index_size();
      const int total = prob.index_size();
      const std::uint64_t count = 1ull << prob.factor_bits;
      std::vector<ComplexMatrix> parts;
      for (std::uint64_t y = 0; y < count; ++y)
        parts.push_back(
            acceptance_kernel(*prob.inner, pair_string(x, classical_string(y, prob.factor_bits))));
      ComplexMatrix k(dim, std::vector<Complex>(dim));
      for (std::uint64_t s = 0; s < dim; ++s)
        for (std::uint64_t t = 0; t < dim; ++t) {
          Complex prod = 1.0;
          for (std::uint64_t y = 0; y < count && prod != Complex(0.0); ++y)
            prod *= parts[y][detail::group_bits(s, total, int(y), p)]
                            [detail::group_bits(t, total, int(y), p)];
          k[s][t] = prod;
        }
      return k;
    }
    case Kind::Power: {
      ComplexMatrix base = acceptance_kernel(*prob.inner, x);
      int m = prob.exponent;
      int halves = m / 2;
      ComplexMatrix a = complex_identity(base.size());
      for (int i = 0; i < halves; ++i) a = cmatmul(base, a);
      ComplexMatrix mid = (m % 2) ? base : complex_identity(base.size());
      return cmatmul(cadjoint(a), cmatmul(mid, a));
    }
    case Kind::Square: {
      ComplexMatrix base = acceptance_kernel(*prob.inner, x);
      return cmatmul(cadjoint(base), base);
    }
    case Kind::ComposeFP:
      return acceptance_kernel(*prob.inner, prob.fp_map(x));
  }
  throw Error(errkind::kValidation, "unknown problem kind");
}

// --- certification and solving -------------------------------------------------

// The certified acceptance matrix: Hermitian, real-entried, positive
// semidefinite, contractive, with its maximal eigenpair.
struct OptMatrix {
  RealMatrix entries;
  double max_eigenvalue = 0.0;
  std::vector<double> max_eigenvector;
  double eigen_residual = 0.0;
  double residual = 0.0;  // worst certified-invariant violation
  double min_eigenvalue = 0.0;
};

inline OptMatrix certify_kernel(const ComplexMatrix& k) {
  const std::size_t n = k.size();
  double herm = 0.0, imag = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      herm = std::max(herm, std::abs(k[s][t] - std::conj(k[t][s])));
      imag = std::max(imag, std::abs(k[s][t].imag()));
    }
  if (herm > tol::kMatrixCert)
    throw Error(errkind::kInvariant, "acceptance matrix is not Hermitian (defect " + std::to_string(herm) + ")");
  if (imag > tol::kMatrixCert)
    throw Error(errkind::kInvariant, "acceptance matrix has complex entries (defect " + std::to_string(imag) + ")");

  OptMatrix out;
  out.entries.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) out.entries[s][t] = 0.5 * (k[s][t].real() + k[t][s].real());

  Spectrum sp = jacobi_spectrum(out.entries);
  out.min_eigenvalue = sp.eigenvalues.front();
  out.max_eigenvalue = sp.eigenvalues.back();
  out.max_eigenvector = sp.vectors.back();
  if (out.min_eigenvalue < -tol::kPsd)
    throw Error(errkind::kInvariant,
                "acceptance matrix is not positive semidefinite (min eigenvalue " +
                    std::to_string(out.min_eigenvalue) + ")");
  if (out.max_eigenvalue > 1.0 + tol::kMatrixCert)
    throw Error(errkind::kInvariant, "acceptance matrix is not contractive (max eigenvalue " +
                                         std::to_string(out.max_eigenvalue) + ")");

  std::vector<double> pv = matvec(out.entries, out.max_eigenvector);
  double r2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = pv[i] - out.max_eigenvalue * out.max_eigenvector[i];
    r2 += d * d;
  }
  out.eigen_residual = std::sqrt(r2);
  if (out.eigen_residual > tol::kEigenResidual)
    throw Error(errkind::kInvariant, "eigenpair residual too large");
  out.residual = std::max({herm, imag, std::max(0.0, -out.min_eigenvalue),
                           std::max(0.0, out.max_eigenvalue - 1.0), out.eigen_residual});
  return out;
}

inline OptMatrix extract_opt_matrix(const OptProblem& prob, const std::string& x) {
  return certify_kernel(acceptance_kernel(prob, x));
}

struct SolveResult {
  OptMatrix matrix;
  double lambda_max = 0.0;
  Qustring eigenvector;
  double rayleigh_gap = 0.0;
};

inline SolveResult solve_opt_full(const OptProblem& prob, const std::string& x) {
  SolveResult r;
  r.matrix = extract_opt_matrix(prob, x);
  r.lambda_max = r.matrix.max_eigenvalue;
  r.eigenvector.size = prob.index_size();
  for (double a : r.matrix.max_eigenvector) r.eigenvector.amplitudes.push_back(Complex(a, 0.0));
  std::vector<double> pv = matvec(r.matrix.entries, r.matrix.max_eigenvector);
  double rayleigh = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) rayleigh += r.matrix.max_eigenvector[i] * pv[i];
  r.rayleigh_gap = std::abs(rayleigh - r.lambda_max);
  if (r.rayleigh_gap > tol::kMatrixCert)
    throw Error(errkind::kInvariant, "Rayleigh quotient disagrees with the eigenvalue");
  return r;
}

inline double solve_opt(const OptProblem& prob, const std::string& x) {
  return solve_opt_full(prob, x).lambda_max;
}

// --- independent sampling oracle ------------------------------------------------
//
// Built before the eigensolver is trusted: draw unit indices, push each one
// through the forward simulation, and measure. For machine problems the
// per-sample value is ||W phi||^2 with W the projected forward columns;
// composed problems sample their assembled quadratic form.
struct SamplingReport {
  double max_acceptance = 0.0;
  double refined_max = 0.0;  // after power-iteration refinement of the best sample
  int samples = 0;
};

inline SamplingReport sampling_lower_bound(const OptProblem& prob, const std::string& x, int samples,
                                           std::uint64_t seed, const OptMatrix* refine_with = nullptr) {
  SamplingReport report;
  report.samples = samples;
  Rng rng(seed);
  const std::uint64_t dim = 1ull << prob.index_size();

  std::vector<std::vector<Complex>> w;
  if (prob.kind == OptProblem::Kind::Machine) {
    WitnessPipeline pipe(prob.machine, prob.declared_index_size, x, prob.rule);
    w = pipe.projected_columns();
  }
  ComplexMatrix k;
  if (w.empty()) k = acceptance_kernel(prob, x);

  std::vector<Complex> best;
  for (int i = 0; i < samples; ++i) {
    std::vector<Complex> phi = random_unit_vector(rng, dim);
    double acc = 0.0;
    if (!w.empty()) {
      // ||sum_t phi_t W e_t||^2 accumulated column-sparsely
      std::vector<Complex> img(w[0].size(), 0.0);
      for (std::uint64_t t = 0; t < dim; ++t) {
        if (phi[t] == Complex(0.0)) continue;
        for (std::size_t r = 0; r < img.size(); ++r) img[r] += phi[t] * w[t][r];
      }
      double n = norm2(img);
      acc = n * n;
    } else {
      Complex q = 0.0;
      for (std::uint64_t s = 0; s < dim; ++s)
        for (std::uint64_t t = 0; t < dim; ++t) q += std::conj(phi[s]) * k[s][t] * phi[t];
      acc = q.real();
    }
    if (acc > report.max_acceptance) {
      report.max_acceptance = acc;
      best = phi;
    }
  }
  report.refined_max = report.max_acceptance;
  if (refine_with != nullptr && !best.empty()) {
    // local refinement: power iterations from the best sample
    std::vector<double> v(best.size());
    for (std::size_t i = 0; i < best.size(); ++i) v[i] = std::abs(best[i]);
    double n = 0.0;
    for (double a : v) n += a * a;
    if (n == 0.0) v[0] = 1.0;
    for (int it = 0; it < 200; ++it) {
      v = matvec(refine_with->entries, v);
      double vn = 0.0;
      for (double a : v) vn += a * a;
      vn = std::sqrt(vn);
      if (vn < 1e-300) {
        report.refined_max = std::max(report.refined_max, 0.0);
        return report;
      }
      for (double& a : v) a /= vn;
    }
    std::vector<double> pv = matvec(refine_with->entries, v);
    double quad = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) quad += v[i] * pv[i];
    report.refined_max = std::max(report.max_acceptance, quad);
  }
  return report;
}

// acceptance of the witness on (x, |phi>) by full forward simulation
inline double simulate_acceptance(const OptProblem& prob, const std::string& x, const Qustring& phi) {
  if (prob.kind != OptProblem::Kind::Machine)
    throw Error(errkind::kValidation, "direct simulation applies to machine-backed problems");
  WitnessPipeline pipe(prob.machine, prob.declared_index_size, x, prob.rule);
  return pipe.simulate_acceptance(phi);
}

// --- squaring and powers ---------------------------------------------------------

inline OptProblem square_problem(const OptProblem& prob) {
  OptProblem p;
  p.kind = OptProblem::Kind::Square;
  p.inner = std::make_shared<OptProblem>(prob);
  return p;
}

inline OptProblem power_problem(const OptProblem& prob, int m) {
  if (m < 1 || m > 8) throw Error(errkind::kValidation, "exponent must be in [1, 8]");
  OptProblem p;
  p.kind = OptProblem::Kind::Power;
  p.inner = std::make_shared<OptProblem>(prob);
  p.exponent = m;
  return p;
}

}  // namespace qtm
