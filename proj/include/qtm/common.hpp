#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtm {

using Complex = std::complex<double>;

// Named amplitude constants used by the bundled machine tables.
inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kThreeFifths = 0.6;
inline constexpr double kFourFifths = 0.8;

// Tolerances pinned across the project.
namespace tol {
inline constexpr double kLocalCheck = 1e-9;       // per-row transition-table checks
inline constexpr double kGlobalUnitary = 1e-8;    // assembled-operator checks
inline constexpr double kNormIdentity = 1e-10;    // direction-split norm identity
inline constexpr double kUnitNorm = 1e-9;         // qustrings and evolved states
inline constexpr double kMatrixCert = 1e-9;       // Hermitian/real/contractive slack
inline constexpr double kPsd = 1e-8;              // min-eigenvalue slack
inline constexpr double kEigenResidual = 1e-8;    // ||Pv - lambda v||
inline constexpr double kSeamMass = 1e-12;        // wraparound guard mass
inline constexpr double kBoundary = 1e-12;        // dyadic floor guard
}  // namespace tol

struct Error : std::runtime_error {
  Error(std::string k, const std::string& message)
      : std::runtime_error(message), kind(std::move(k)) {}
  std::string kind;
};

namespace errkind {
inline constexpr const char* kParse = "parse-error";
inline constexpr const char* kValidation = "validation-error";
inline constexpr const char* kSpaceTooLarge = "space-too-large";
inline constexpr const char* kInputTooLong = "input-too-long";
inline constexpr const char* kIndexSizeMismatch = "index-size-mismatch";
inline constexpr const char* kTravelBudget = "travel-budget-exceeded";
inline constexpr const char* kNotInPreQuery = "not-in-pre-query-state";
inline constexpr const char* kNotSynchronized = "witness-not-synchronized";
inline constexpr const char* kDimensionCap = "dimension-cap-exceeded";
inline constexpr const char* kInvariant = "invariant-violation";
inline constexpr const char* kSourceNotClean = "source-not-clean";
inline constexpr const char* kNonConvergence = "non-convergence";
inline constexpr const char* kBoundViolation = "bound-violation";
inline constexpr const char* kReunitarization = "re-unitarization-failure";
inline constexpr const char* kNonSymmetric = "non-symmetric-input";
inline constexpr const char* kBracketing = "bracketing-failure";
inline constexpr const char* kNonMonotone = "non-monotone-oracle";
inline constexpr const char* kBoundaryAmbiguity = "boundary-ambiguity";
inline constexpr const char* kUsage = "usage-error";
}  // namespace errkind

inline bool is_finite(Complex a) { return std::isfinite(a.real()) && std::isfinite(a.imag()); }

inline double norm2(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const Complex& a : v) s += std::norm(a);
  return std::sqrt(s);
}

inline Complex dot(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Deterministic xorshift-based generator: identical streams on every platform,
// independent of standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  std::size_t below(std::size_t n) { return std::size_t(next_u64() % n); }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Unit vector with Gaussian-distributed entries, the sampling measure used by
// every randomized cross-check in the project.
inline std::vector<Complex> random_unit_vector(Rng& rng, std::size_t dim, bool complex_entries = true) {
  std::vector<Complex> v(dim);
  for (auto& a : v)
    a = complex_entries ? Complex(rng.gaussian(), rng.gaussian()) : Complex(rng.gaussian(), 0.0);
  double n = norm2(v);
  for (auto& a : v) a /= n;
  return v;
}

// Length-prefixed pairing <x,y> = 1^|x| 0 x y. Length-preserving: the result
// length depends only on |x| and |y|.
inline std::string pair_string(const std::string& x, const std::string& y) {
  return std::string(x.size(), '1') + "0" + x + y;
}

}  // namespace qtm
