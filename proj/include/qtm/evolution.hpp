#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "qtm/common.hpp"
#include "qtm/configuration.hpp"
#include "qtm/machine.hpp"

namespace qtm {

// Finite oracle: membership set over binary strings.
struct OracleSet {
  std::set<std::string> members;
  bool contains(const std::string& x) const { return members.count(x) > 0; }
};

namespace detail {

// Oracle query applied to one basis configuration: the query tape (the last
// tape) holding |x>|b> becomes |x>|b xor A(x)> and the state moves from the
// pre-query to the post-query state. Configurations whose query tape does not
// parse as bits-then-blank pass through with only the state relabel, keeping
// the whole step a permutation.
inline Configuration oracle_step(const MachineDescription& m, const ConfigurationSpace& space,
                                 Configuration c, const OracleSet& oracle) {
  const int qt = m.tape_count() - 1;
  const TapeAlphabet& alpha = m.tapes[qt];
  const int t = space.windows()[qt];
  int run = 0;
  while (run < t && c.tapes[qt][run] != alpha.blank_index()) ++run;
  c.state = m.post_query;
  if (run == 0) return c;
  std::string chars;
  for (int i = 0; i < run; ++i) {
    char ch = alpha.gamma[c.tapes[qt][i]];
    if (ch != '0' && ch != '1') return c;
    chars += ch;
  }
  std::string x = chars.substr(0, run - 1);
  char b = chars[run - 1];
  if (oracle.contains(x)) {
    int flipped = alpha.index_of(b == '0' ? '1' : '0');
    c.tapes[qt][run - 1] = flipped;
  }
  return c;
}

}  // namespace detail

// One delta step as a sparse matrix over the configuration space, stored by
// columns: column c holds the image of basis configuration c. When the
// machine is oracle-enabled the pre-query columns realize the query
// permutation for the supplied oracle set.
class EvolutionOperator {
 public:
  EvolutionOperator(const MachineDescription& m, const ConfigurationSpace& space,
                    const OracleSet& oracle = {})
      : space_(&space) {
    const auto rows = m.effective_delta();
    const std::uint64_t n = space.size();
    col_ptr_.reserve(n + 1);
    col_ptr_.push_back(0);
    for (std::uint64_t c = 0; c < n; ++c) {
      Configuration conf = space.configuration_of(c);
      if (m.flags.oracle && conf.state == m.pre_query) {
        rows_.push_back(space.index_of(detail::oracle_step(m, space, conf, oracle)));
        amps_.push_back(1.0);
      } else {
        std::vector<int> scanned(m.tape_count());
        for (int i = 0; i < m.tape_count(); ++i) scanned[i] = conf.tapes[i][conf.heads[i]];
        for (const DeltaTarget& target : rows[m.row_key(conf.state, scanned)]) {
          Configuration out = conf;
          out.state = target.state;
          for (int i = 0; i < m.tape_count(); ++i) {
            out.tapes[i][conf.heads[i]] = target.written[i];
            int w = space.windows()[i];
            out.heads[i] = (conf.heads[i] + head_shift(target.dirs[i]) + w) % w;
          }
          rows_.push_back(space.index_of(out));
          amps_.push_back(target.amp);
        }
      }
      col_ptr_.push_back(std::uint64_t(rows_.size()));
    }
  }

  const ConfigurationSpace& space() const { return *space_; }
  std::uint64_t dimension() const { return space_->size(); }
  std::uint64_t nonzeros() const { return std::uint64_t(rows_.size()); }

  std::vector<Complex> apply(const std::vector<Complex>& v) const {
    std::vector<Complex> out(v.size(), 0.0);
    for (std::uint64_t c = 0; c < dimension(); ++c) {
      if (v[c] == Complex(0.0)) continue;
      for (std::uint64_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) out[rows_[k]] += amps_[k] * v[c];
    }
    return out;
  }

  std::vector<Complex> apply_adjoint(const std::vector<Complex>& v) const {
    std::vector<Complex> out(v.size(), 0.0);
    for (std::uint64_t c = 0; c < dimension(); ++c) {
      Complex s = 0.0;
      for (std::uint64_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) s += std::conj(amps_[k]) * v[rows_[k]];
      out[c] = s;
    }
    return out;
  }

  // column access for the global unitarity check
  struct ColumnEntry {
    std::uint64_t row;
    Complex amp;
  };
  std::vector<ColumnEntry> column(std::uint64_t c) const {
    std::vector<ColumnEntry> out;
    for (std::uint64_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) out.push_back({rows_[k], amps_[k]});
    return out;
  }

 private:
  const ConfigurationSpace* space_;
  std::vector<std::uint64_t> col_ptr_;
  std::vector<std::uint64_t> rows_;
  std::vector<Complex> amps_;
};

inline EvolutionOperator build_evolution(const MachineDescription& m, const ConfigurationSpace& space,
                                         const OracleSet& oracle = {}) {
  return EvolutionOperator(m, space, oracle);
}

// Mass on configurations whose head sits on the last ring cell of some tape.
// Nonzero mass there means a head crossed the seam, so the ring no longer
// matches an unbounded tape and the run must be rejected.
inline double seam_mass(const ConfigurationSpace& space, const std::vector<Complex>& v) {
  double mass = 0.0;
  for (std::uint64_t c = 0; c < space.size(); ++c) {
    if (v[c] == Complex(0.0)) continue;
    for (int i = 0; i < space.machine().tape_count(); ++i) {
      if (space.head_of(c, i) == space.windows()[i] - 1) {
        mass += std::norm(v[c]);
        break;
      }
    }
  }
  return mass;
}

inline double final_state_mass(const ConfigurationSpace& space, const std::vector<Complex>& v) {
  const MachineDescription& m = space.machine();
  double mass = 0.0;
  for (std::uint64_t c = 0; c < space.size(); ++c)
    if (v[c] != Complex(0.0) && m.is_final(space.state_of(c))) mass += std::norm(v[c]);
  return mass;
}

// Probability of observing bit 1 in the start cell of the output tape
// (tape 0, cell 0).
inline double acceptance_probability(const ConfigurationSpace& space, const std::vector<Complex>& v) {
  int one = space.machine().tapes[0].index_of('1');
  if (one < 0) return 0.0;
  double mass = 0.0;
  for (std::uint64_t c = 0; c < space.size(); ++c)
    if (v[c] != Complex(0.0) && space.cell_of(c, 0, 0) == one) mass += std::norm(v[c]);
  return mass;
}

struct RunResult {
  std::vector<Complex> final_state;
  int steps = 0;
  bool halted = false;
  double accept_probability = 0.0;
};

inline void check_seam(const ConfigurationSpace& space, const std::vector<Complex>& v, int step) {
  if (seam_mass(space, v) > tol::kSeamMass)
    throw Error(errkind::kTravelBudget,
                "head reached the ring seam at step " + std::to_string(step) +
                    "; enlarge the tape windows");
}

inline RunResult run(const EvolutionOperator& u, std::vector<Complex> v, int steps) {
  const ConfigurationSpace& space = u.space();
  for (int s = 1; s <= steps; ++s) {
    v = u.apply(v);
    check_seam(space, v, s);
  }
  RunResult r;
  r.steps = steps;
  r.halted = final_state_mass(space, v) >= 1.0 - tol::kUnitNorm;
  r.accept_probability = acceptance_probability(space, v);
  r.final_state = std::move(v);
  return r;
}

inline std::vector<Complex> run_reverse(const EvolutionOperator& u, std::vector<Complex> v, int steps) {
  for (int s = 1; s <= steps; ++s) {
    v = u.apply_adjoint(v);
    check_seam(u.space(), v, s);
  }
  return v;
}

// Standalone oracle query on a state vector. Requires all amplitude mass in
// the pre-query state; the map itself is a permutation of basis
// configurations composed with the pre/post state relabel.
inline std::vector<Complex> apply_oracle_query(const MachineDescription& m,
                                               const ConfigurationSpace& space,
                                               const std::vector<Complex>& v, const OracleSet& oracle) {
  if (!m.flags.oracle) throw Error(errkind::kValidation, "machine is not oracle-enabled");
  std::vector<Complex> out(v.size(), 0.0);
  double outside = 0.0;
  for (std::uint64_t c = 0; c < space.size(); ++c) {
    if (v[c] == Complex(0.0)) continue;
    if (space.state_of(c) != m.pre_query) {
      outside += std::norm(v[c]);
      continue;
    }
    Configuration conf = space.configuration_of(c);
    out[space.index_of(detail::oracle_step(m, space, conf, oracle))] += v[c];
  }
  if (outside > tol::kUnitNorm)
    throw Error(errkind::kNotInPreQuery, "amplitude mass outside the pre-query state");
  return out;
}

}  // namespace qtm
