#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qtm/common.hpp"

namespace qtm {

using RealMatrix = std::vector<std::vector<double>>;

inline RealMatrix identity_matrix(std::size_t n) {
  RealMatrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
  std::size_t n = a.size(), k = b.size(), p = b[0].size();
  RealMatrix out(n, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double aij = a[i][j];
      if (aij == 0.0) continue;
      for (std::size_t c = 0; c < p; ++c) out[i][c] += aij * b[j][c];
    }
  return out;
}

inline std::vector<double> matvec(const RealMatrix& a, const std::vector<double>& v) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
  return out;
}

inline double symmetry_defect(const RealMatrix& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[i][j] - a[j][i]));
  return worst;
}

struct Spectrum {
  std::vector<double> eigenvalues;          // ascending
  std::vector<std::vector<double>> vectors; // vectors[i] belongs to eigenvalues[i]
};

// Cyclic Jacobi diagonalization of a real symmetric matrix. Deterministic,
// single-threaded, quadratically convergent; the workhorse eigensolver.
inline Spectrum jacobi_spectrum(RealMatrix a) {
  const std::size_t n = a.size();
  if (symmetry_defect(a) > tol::kMatrixCert)
    throw Error(errkind::kNonSymmetric, "matrix is not symmetric within 1e-9");
  RealMatrix v = identity_matrix(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a[p][q]));
    if (off < 1e-14) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double vip = v[i][p], viq = v[i][q];
          v[i][p] = c * vip - s * viq;
          v[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  Spectrum sp;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] < a[y][y]; });
  for (std::size_t i : order) {
    sp.eigenvalues.push_back(a[i][i]);
    std::vector<double> col(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = v[r][i];
    sp.vectors.push_back(col);
  }
  return sp;
}

struct MaxEigen {
  double lambda = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
};

inline MaxEigen hermitian_max_eigen(const RealMatrix& p) {
  Spectrum sp = jacobi_spectrum(p);
  MaxEigen out;
  out.lambda = sp.eigenvalues.back();
  out.vector = sp.vectors.back();
  std::vector<double> pv = matvec(p, out.vector);
  double r2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = pv[i] - out.lambda * out.vector[i];
    r2 += d * d;
  }
  out.residual = std::sqrt(r2);
  if (out.residual > tol::kEigenResidual)
    throw Error(errkind::kInvariant, "eigenvector residual " + std::to_string(out.residual));
  return out;
}

namespace detail {

using Poly = std::vector<long double>;  // coefficients, constant term first

inline int degree(const Poly& p) {
  int d = int(p.size()) - 1;
  while (d > 0 && p[d] == 0.0L) --d;
  return d;
}

inline long double eval_poly(const Poly& p, long double z) {
  long double acc = 0.0L;
  for (int i = degree(p); i >= 0; --i) acc = acc * z + p[i];
  return acc;
}

inline Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * (long double)(i));
  if (d.empty()) d.push_back(0.0L);
  return d;
}

inline void normalize(Poly& p) {
  int d = degree(p);
  p.resize(d + 1);
  long double lead = p[d];
  if (lead != 0.0L)
    for (auto& c : p) c /= lead;
}

// remainder of a by b, both monic-normalized on entry
inline Poly poly_mod(Poly a, const Poly& b) {
  int db = degree(b);
  while (degree(a) >= db && !(degree(a) == 0 && a[0] == 0.0L)) {
    int da = degree(a);
    long double f = a[da] / b[db];
    for (int i = 0; i <= db; ++i) a[da - db + i] -= f * b[i];
    a[da] = 0.0L;
    if (da == db) break;
  }
  a.resize(std::max(1, db));
  return a;
}

inline long double coeff_scale(const Poly& p) {
  long double m = 0.0L;
  for (long double c : p) m = std::max(m, std::abs(c));
  return m;
}

// approximate gcd via Euclid with a relative cut; used to strip repeated
// roots before sign-change bracketing
inline Poly approx_gcd(Poly a, Poly b) {
  normalize(a);
  normalize(b);
  while (true) {
    if (degree(b) == 0) return Poly{1.0L};
    Poly r = poly_mod(a, b);
    if (coeff_scale(r) < 1e-10L) return b;
    normalize(r);
    a = b;
    b = r;
  }
}

inline Poly poly_divide(const Poly& num, const Poly& den) {
  Poly rem = num;
  int dd = degree(den);
  int dq = degree(num) - dd;
  if (dq < 0) return Poly{0.0L};
  Poly q(dq + 1, 0.0L);
  for (int k = dq; k >= 0; --k) {
    long double f = rem[k + dd] / den[dd];
    q[k] = f;
    for (int i = 0; i <= dd; ++i) rem[k + i] -= f * den[i];
  }
  return q;
}

}  // namespace detail

// Largest real root of det(zI - P) on [0, 1+eps]. Coefficients come from the
// trace recurrence M_k = P(M_{k-1} + c_{k-1} I), c_k = -tr(M_k)/k; repeated
// roots are stripped with an approximate square-free reduction, then the
// interval is scanned for a sign change and bisected. The slow oracle behind
// the Jacobi solver.
inline double char_poly_max_root(const RealMatrix& p) {
  const std::size_t n = p.size();
  if (n > 64) throw Error(errkind::kDimensionCap, "characteristic-polynomial oracle capped at 64");
  if (symmetry_defect(p) > tol::kMatrixCert)
    throw Error(errkind::kNonSymmetric, "matrix is not symmetric within 1e-9");

  // u(z) = z^n + c_1 z^{n-1} + ... + c_n
  std::vector<long double> c(n + 1, 0.0L);
  c[0] = 1.0L;
  std::vector<std::vector<long double>> m(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = p[i][j];
  std::vector<std::vector<long double>> mk = m;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1) {
      // mk = m * (mk + c_{k-1} I)
      std::vector<std::vector<long double>> t = mk;
      for (std::size_t i = 0; i < n; ++i) t[i][i] += c[k - 1];
      std::vector<std::vector<long double>> next(n, std::vector<long double>(n, 0.0L));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          long double s = 0.0L;
          for (std::size_t l = 0; l < n; ++l) s += m[i][l] * t[l][j];
          next[i][j] = s;
        }
      mk = next;
    }
    long double tr = 0.0L;
    for (std::size_t i = 0; i < n; ++i) tr += mk[i][i];
    c[k] = -tr / (long double)(k);
  }

  detail::Poly u(n + 1);
  for (std::size_t i = 0; i <= n; ++i) u[i] = c[n - i];  // constant term first

  // strip z^j factors (roots at zero)
  long double scale = detail::coeff_scale(u);
  std::size_t strip = 0;
  while (strip < n && std::abs(u[strip]) <= 1e-13L * scale) ++strip;
  bool zero_root = strip > 0;
  detail::Poly v(u.begin() + strip, u.end());

  // square-free part
  detail::Poly w = v;
  if (detail::degree(v) > 1) {
    detail::Poly g = detail::approx_gcd(v, detail::derivative(v));
    if (detail::degree(g) > 0) {
      detail::Poly vn = v;
      detail::normalize(vn);
      w = detail::poly_divide(vn, g);
    }
  }

  const double hi = 1.0 + 1e-6;
  if (detail::degree(w) == 0) {
    if (zero_root) return 0.0;
    throw Error(errkind::kBracketing, "characteristic polynomial degenerated on [0, 1+eps]");
  }

  const int grid = 4096;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool found = false;
  long double prev = detail::eval_poly(w, hi);
  for (int i = 1; i <= grid; ++i) {
    double z = hi * double(grid - i) / double(grid);
    long double val = detail::eval_poly(w, (long double)z);
    if ((prev < 0.0L) != (val < 0.0L) && prev != 0.0L) {
      bracket_lo = z;
      bracket_hi = hi * double(grid - i + 1) / double(grid);
      found = true;
      break;
    }
    if (val == 0.0L) return z;
    prev = val;
  }
  if (!found) {
    if (zero_root) return 0.0;
    throw Error(errkind::kBracketing, "no sign change located in [0, " + std::to_string(hi) + "]");
  }
  long double lo = bracket_lo, h = bracket_hi;
  long double flo = detail::eval_poly(w, lo);
  for (int it = 0; it < 200; ++it) {
    long double mid = 0.5L * (lo + h);
    long double fm = detail::eval_poly(w, mid);
    if ((fm < 0.0L) == (flo < 0.0L)) {
      lo = mid;
      flo = fm;
    } else {
      h = mid;
    }
  }
  return double(0.5L * (lo + h));
}

// value = numerator / 2^bits
struct DyadicValue {
  std::int64_t numerator = 0;
  int bits = 0;
  double value() const { return double(numerator) / double(std::int64_t(1) << bits); }
};

struct BinarySearchResult {
  DyadicValue value;
  int oracle_calls = 0;
};

// Recovers floor(2^b f) / 2^b from a monotone threshold oracle in exactly b
// calls, most significant bit first. When every call answers true the top
// numerator 2^b is reported (the inclusive-threshold convention for values at
// 1); values inside (1 - 2^-b, 1) are indistinguishable from 1 within b calls
// and report the same top cell. With verify set, two extra bracketing calls
// re-check the answer and a conflicting oracle raises an error.
inline BinarySearchResult binary_search_value(const std::function<bool(DyadicValue)>& oracle, int bits,
                                              bool verify = false) {
  if (bits < 1 || bits > 62) throw Error(errkind::kValidation, "bits must be in [1, 62]");
  BinarySearchResult out;
  out.value.bits = bits;
  std::int64_t k = 0;
  bool all_true = true;
  for (int i = bits - 1; i >= 0; --i) {
    DyadicValue probe{k + (std::int64_t(1) << i), bits};
    ++out.oracle_calls;
    if (oracle(probe))
      k = probe.numerator;
    else
      all_true = false;
  }
  out.value.numerator = all_true ? (std::int64_t(1) << bits) : k;
  if (verify) {
    if (out.value.numerator > 0 && !oracle(DyadicValue{out.value.numerator, bits}))
      throw Error(errkind::kNonMonotone, "oracle rejects the returned value");
    if (out.value.numerator < (std::int64_t(1) << bits) &&
        oracle(DyadicValue{out.value.numerator + 1, bits}))
      throw Error(errkind::kNonMonotone, "oracle accepts above the returned value");
  }
  return out;
}

// floor(2^b v) with a guard: values near (but not exactly on) a multiple of
// 2^-b are ambiguous under floating arithmetic and get flagged instead of
// silently floored.
struct FlooredValue {
  std::int64_t floor_value = 0;
  bool boundary_flagged = false;
};

inline FlooredValue floor_with_guard(double v, int bits) {
  double scaled = std::ldexp(v, bits);
  double nearest = std::round(scaled);
  FlooredValue out;
  double dist = std::abs(scaled - nearest) / std::ldexp(1.0, bits);
  if (dist > 0.0 && dist <= tol::kBoundary) {
    out.boundary_flagged = true;
    out.floor_value = std::int64_t(nearest);  // best guess, flagged
    return out;
  }
  out.floor_value = std::int64_t(std::floor(scaled));
  return out;
}

struct QopVerdict {
  bool holds = false;
  std::int64_t f_floor = 0;
  std::int64_t g_floor = 0;
  bool boundary_flagged = false;
};

// floor(2^b f) > floor(2^b g)
inline QopVerdict eval_qop_predicate_values(double f, double g, int bits) {
  QopVerdict v;
  FlooredValue ff = floor_with_guard(f, bits);
  FlooredValue gg = floor_with_guard(g, bits);
  v.f_floor = ff.floor_value;
  v.g_floor = gg.floor_value;
  v.boundary_flagged = ff.boundary_flagged || gg.boundary_flagged;
  v.holds = ff.floor_value > gg.floor_value;
  return v;
}

enum class Verdict { Accept, Reject, PromiseViolated };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::Reject: return "reject";
    default: return "promise-violated";
  }
}

struct DefinabilityVerdicts {
  Verdict bounded_gap;     // accept if f >= 3/4, reject if f <= 1/4
  Verdict positive_value;  // accept if f > 0, reject if f = 0
  Verdict exact_binary;    // accept if f = 1, reject if f = 0
};

inline DefinabilityVerdicts definability_predicates(double f, double eps = tol::kUnitNorm) {
  DefinabilityVerdicts out;
  out.bounded_gap = f >= 0.75 ? Verdict::Accept : (f <= 0.25 ? Verdict::Reject : Verdict::PromiseViolated);
  out.positive_value = f > eps ? Verdict::Accept : Verdict::Reject;
  out.exact_binary = f >= 1.0 - eps ? Verdict::Accept
                                    : (f <= eps ? Verdict::Reject : Verdict::PromiseViolated);
  return out;
}

// Two-sided comparison of a value pair under an in/out label:
//   in:  (1 - 2^-q) g <= f <= g
//   out: 0 <= f <= 2^-q g
struct TwoSidedCase {
  std::string name;
  bool in_label = false;
  double f = 0.0;
  double g = 0.0;
};

struct TwoSidedReport {
  bool passed = true;
  struct Line {
    std::string name;
    bool ok;
    double lower_margin;
    double upper_margin;
  };
  std::vector<Line> lines;
};

inline TwoSidedReport pp_style_inequalities(const std::vector<TwoSidedCase>& cases, int q_exponent,
                                            double slack = tol::kMatrixCert) {
  TwoSidedReport report;
  double eps = std::ldexp(1.0, -q_exponent);
  for (const auto& c : cases) {
    double lower, upper;
    if (c.in_label) {
      lower = c.f - (1.0 - eps) * c.g;
      upper = c.g - c.f;
    } else {
      lower = c.f;
      upper = eps * c.g - c.f;
    }
    bool ok = lower >= -slack && upper >= -slack;
    report.lines.push_back({c.name, ok, lower, upper});
    if (!ok) report.passed = false;
  }
  return report;
}

}  // namespace qtm
