#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qtm/common.hpp"
#include "qtm/evolution.hpp"
#include "qtm/machine.hpp"

namespace qtm {

// Direction values used by the separability condition. The head-move letters
// R, N, L are identified with -1, 0, +1 here; this labeling is independent of
// the geometric head shift.
inline int sep_dir_value(Dir d) {
  switch (d) {
    case Dir::R: return -1;
    case Dir::N: return 0;
    default: return 1;
  }
}

// The (d, epsilon) bookkeeping behind the separability condition:
//   E_d     = { eps in {0,±1,±2} : |2d - eps| <= 1 }
//   D_eps   = { d in {0,±1}     : |2d - eps| <= 1 }
//   h(d,eps)= 2d - eps when eps != 0, and a marker otherwise.
struct SeparabilityFrame {
  static constexpr std::array<int, 3> kDirections{0, 1, -1};
  static constexpr std::array<int, 5> kEpsilons{0, 1, -1, 2, -2};
  static constexpr int kHNatural = 99;  // the non-numeric h marker

  static bool member(int d, int eps) { return std::abs(2 * d - eps) <= 1; }

  static int e_size(int d) {
    int n = 0;
    for (int eps : kEpsilons) n += member(d, eps);
    return n;
  }

  static std::vector<int> d_set(int eps) {
    std::vector<int> out;
    for (int d : kDirections)
      if (member(d, eps)) out.push_back(d);
    return out;
  }

  static int h(int d, int eps) { return eps == 0 ? kHNatural : 2 * d - eps; }
};

struct CheckViolation {
  std::string where;
  double magnitude = 0.0;
};

// Exhaustive (not fail-fast) result of one condition, usable as a test oracle.
struct CheckReport {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  std::vector<CheckViolation> violations;

  void add(const std::string& where, double magnitude, double tolerance) {
    if (magnitude > worst) worst = magnitude;
    if (magnitude > tolerance) {
      passed = false;
      violations.push_back({where, magnitude});
    }
  }
};

namespace detail {

// target slot of one table entry: successor state, written-symbol code, direction code
struct SlotKey {
  int state;
  int written_code;
  int dir_code;
  bool operator<(const SlotKey& o) const {
    if (state != o.state) return state < o.state;
    if (written_code != o.written_code) return written_code < o.written_code;
    return dir_code < o.dir_code;
  }
};

inline int dir_code(const std::vector<Dir>& dirs) {
  int code = 0;
  for (Dir d : dirs) code = code * 3 + (int(d) + 1);
  return code;
}

using SparseRow = std::map<SlotKey, Complex>;

// one sparse vector per table row delta(p, sigma), indexed over (q, tau, d)
inline std::vector<std::pair<int, SparseRow>> table_rows(const MachineDescription& m) {
  auto rows = m.effective_delta();
  std::vector<std::pair<int, SparseRow>> out;
  const int sym_product = m.sym_product();
  for (int q = 0; q < m.state_count(); ++q) {
    if (!m.row_owned_by_table(q)) continue;
    for (int code = 0; code < sym_product; ++code) {
      SparseRow row;
      for (const auto& t : rows[q * sym_product + code])
        row[{t.state, m.sym_code(t.written), dir_code(t.dirs)}] += t.amp;
      out.emplace_back(q * sym_product + code, std::move(row));
    }
  }
  return out;
}

inline std::string row_label(const MachineDescription& m, int key) {
  int q = key / m.sym_product();
  auto syms = m.sym_decode(key % m.sym_product());
  std::string s = m.states[q] + ",\"";
  for (int i = 0; i < m.tape_count(); ++i) s += m.tapes[i].gamma[syms[i]];
  return s + "\"";
}

}  // namespace detail

// Condition 1: every row delta(p, sigma) has unit euclidean length.
inline CheckReport check_unit_length(const MachineDescription& m, double tolerance = tol::kLocalCheck) {
  CheckReport report;
  report.name = "unit-length";
  for (const auto& [key, row] : detail::table_rows(m)) {
    double n2 = 0.0;
    for (const auto& [slot, amp] : row) n2 += std::norm(amp);
    report.add(detail::row_label(m, key), std::abs(std::sqrt(n2) - 1.0), tolerance);
  }
  return report;
}

// Condition 2: rows from distinct (p, sigma) sources are orthogonal.
inline CheckReport check_orthogonality(const MachineDescription& m, double tolerance = tol::kLocalCheck) {
  CheckReport report;
  report.name = "orthogonality";
  auto rows = detail::table_rows(m);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const auto& a = rows[i].second;
      const auto& b = rows[j].second;
      const auto& small = a.size() <= b.size() ? a : b;
      const auto& large = a.size() <= b.size() ? b : a;
      Complex inner = 0.0;
      for (const auto& [slot, amp] : small) {
        auto it = large.find(slot);
        if (it != large.end())
          inner += (&small == &a) ? std::conj(amp) * it->second : std::conj(it->second) * amp;
      }
      report.add(detail::row_label(m, rows[i].first) + " vs " + detail::row_label(m, rows[j].first),
                 std::abs(inner), tolerance);
    }
  }
  return report;
}

namespace detail {

struct EpsVec {
  std::vector<int> eps;
  bool operator<(const EpsVec& o) const { return eps < o.eps; }
  bool operator==(const EpsVec& o) const { return eps == o.eps; }
};

// Coordinates of the split vectors delta[p, sigma, tau | eps]: successor
// state plus the per-tape h values.
struct SplitCoord {
  int state;
  std::vector<int> h;
  bool operator<(const SplitCoord& o) const {
    if (state != o.state) return state < o.state;
    return h < o.h;
  }
};

inline std::vector<EpsVec> all_eps_vectors(int k) {
  std::vector<EpsVec> out{{{}}};
  for (int i = 0; i < k; ++i) {
    std::vector<EpsVec> next;
    for (const auto& v : out)
      for (int e : SeparabilityFrame::kEpsilons) {
        EpsVec w = v;
        w.eps.push_back(e);
        next.push_back(w);
      }
    out = next;
  }
  return out;
}

}  // namespace detail

// Condition 3: the direction-split vectors for distinct eps tuples are
// orthogonal, across all (p, sigma, tau) triples. The 1/sqrt|E_d| weights make
// the split preserve the per-triple squared mass.
inline CheckReport check_separability(const MachineDescription& m, double tolerance = tol::kLocalCheck) {
  CheckReport report;
  report.name = "separability";
  const int k = m.tape_count();
  auto rows = detail::table_rows(m);
  auto eps_vectors = detail::all_eps_vectors(k);

  // triple id -> label; coordinate -> entries (triple, eps, amplitude)
  std::vector<std::string> triple_labels;
  struct Entry {
    int triple;
    int eps_id;
    Complex amp;
  };
  std::map<detail::SplitCoord, std::vector<Entry>> coords;

  for (const auto& [key, row] : rows) {
    // split the row by written-symbol tuple tau
    std::map<int, std::map<std::pair<int, int>, Complex>> by_tau;  // tau -> (q, dircode) -> amp
    for (const auto& [slot, amp] : row) by_tau[slot.written_code][{slot.state, slot.dir_code}] += amp;
    for (const auto& [tau, amps] : by_tau) {
      int triple = int(triple_labels.size());
      auto tau_syms = m.sym_decode(tau);
      std::string tau_str;
      for (int i = 0; i < k; ++i) tau_str += m.tapes[i].gamma[tau_syms[i]];
      triple_labels.push_back(detail::row_label(m, key) + "->\"" + tau_str + "\"");

      for (int eps_id = 0; eps_id < int(eps_vectors.size()); ++eps_id) {
        const auto& eps = eps_vectors[eps_id].eps;
        for (const auto& [qd, amp] : amps) {
          // decode the direction tuple and keep it only if every component
          // is a member of D_{eps_i}
          int code = qd.second;
          std::vector<int> dvals(k);
          for (int i = k - 1; i >= 0; --i) {
            Dir d = Dir(code % 3 - 1);
            code /= 3;
            dvals[i] = sep_dir_value(d);
          }
          double weight = 1.0;
          bool member = true;
          detail::SplitCoord coord;
          coord.state = qd.first;
          for (int i = 0; i < k; ++i) {
            if (!SeparabilityFrame::member(dvals[i], eps[i])) {
              member = false;
              break;
            }
            weight /= std::sqrt(double(SeparabilityFrame::e_size(dvals[i])));
            coord.h.push_back(SeparabilityFrame::h(dvals[i], eps[i]));
          }
          if (!member) continue;
          coords[coord].push_back({triple, eps_id, amp * weight});
        }
      }
    }
  }

  // accumulate inner products between vectors with distinct eps tuples
  std::map<std::tuple<int, int, int, int>, Complex> grams;
  for (const auto& [coord, entries] : coords) {
    for (std::size_t i = 0; i < entries.size(); ++i)
      for (std::size_t j = i + 1; j < entries.size(); ++j) {
        const Entry& a = entries[i];
        const Entry& b = entries[j];
        if (a.eps_id == b.eps_id) continue;
        auto key = a.eps_id < b.eps_id ? std::make_tuple(a.triple, a.eps_id, b.triple, b.eps_id)
                                       : std::make_tuple(b.triple, b.eps_id, a.triple, a.eps_id);
        if (a.eps_id < b.eps_id)
          grams[key] += std::conj(a.amp) * b.amp;
        else
          grams[key] += std::conj(b.amp) * a.amp;
      }
  }
  for (const auto& [key, inner] : grams) {
    auto [t1, e1, t2, e2] = key;
    auto eps_str = [&](int id) {
      std::string s = "(";
      for (std::size_t i = 0; i < eps_vectors[id].eps.size(); ++i)
        s += (i ? "," : "") + std::to_string(eps_vectors[id].eps[i]);
      return s + ")";
    };
    report.add(triple_labels[t1] + "|" + eps_str(e1) + " vs " + triple_labels[t2] + "|" + eps_str(e2),
               std::abs(inner), tolerance);
  }
  return report;
}

// The split preserves per-triple mass: summing the squared norms of
// delta[p,sigma,tau|eps] over all eps tuples equals the squared mass of the
// (p,sigma,tau) slice of the row. Checked for every triple.
inline CheckReport check_norm_identity(const MachineDescription& m, double tolerance = tol::kNormIdentity) {
  CheckReport report;
  report.name = "norm-identity";
  const int k = m.tape_count();
  auto rows = detail::table_rows(m);
  auto eps_vectors = detail::all_eps_vectors(k);

  for (const auto& [key, row] : rows) {
    std::map<int, std::map<std::pair<int, int>, Complex>> by_tau;
    for (const auto& [slot, amp] : row) by_tau[slot.written_code][{slot.state, slot.dir_code}] += amp;
    for (const auto& [tau, amps] : by_tau) {
      double direct = 0.0;
      for (const auto& [qd, amp] : amps) direct += std::norm(amp);

      double split = 0.0;
      for (const auto& eps_vec : eps_vectors) {
        std::map<detail::SplitCoord, Complex> vec;
        for (const auto& [qd, amp] : amps) {
          int code = qd.second;
          std::vector<int> dvals(k);
          for (int i = k - 1; i >= 0; --i) {
            dvals[i] = sep_dir_value(Dir(code % 3 - 1));
            code /= 3;
          }
          double weight = 1.0;
          bool member = true;
          detail::SplitCoord coord;
          coord.state = qd.first;
          for (int i = 0; i < k; ++i) {
            if (!SeparabilityFrame::member(dvals[i], eps_vec.eps[i])) {
              member = false;
              break;
            }
            weight /= std::sqrt(double(SeparabilityFrame::e_size(dvals[i])));
            coord.h.push_back(SeparabilityFrame::h(dvals[i], eps_vec.eps[i]));
          }
          if (member) vec[coord] += amp * weight;
        }
        for (const auto& [coord, a] : vec) split += std::norm(a);
      }
      report.add(detail::row_label(m, key), std::abs(split - direct), tolerance);
    }
  }
  return report;
}

// Assembles the step operator and verifies max |U*U - I| <= tolerance via a
// sparse Gram computation over columns sharing a row.
inline CheckReport check_global_unitarity(const MachineDescription& m, const ConfigurationSpace& space,
                                          const OracleSet& oracle = {},
                                          double tolerance = tol::kGlobalUnitary) {
  CheckReport report;
  report.name = "global-unitarity";
  EvolutionOperator u(m, space, oracle);
  const std::uint64_t n = space.size();

  std::vector<double> col_norm2(n, 0.0);
  std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, Complex>>> row_entries;
  for (std::uint64_t c = 0; c < n; ++c) {
    for (const auto& e : u.column(c)) {
      col_norm2[c] += std::norm(e.amp);
      row_entries[e.row].emplace_back(c, e.amp);
    }
  }
  for (std::uint64_t c = 0; c < n; ++c)
    report.add("column " + std::to_string(c), std::abs(col_norm2[c] - 1.0), tolerance);
  std::map<std::pair<std::uint64_t, std::uint64_t>, Complex> off_diag;
  for (const auto& [row, entries] : row_entries) {
    for (std::size_t i = 0; i < entries.size(); ++i)
      for (std::size_t j = i + 1; j < entries.size(); ++j) {
        auto key = entries[i].first < entries[j].first
                       ? std::make_pair(entries[i].first, entries[j].first)
                       : std::make_pair(entries[j].first, entries[i].first);
        if (key.first == key.second) continue;
        off_diag[key] += std::conj(entries[i].first < entries[j].first ? entries[i].second
                                                                       : entries[j].second) *
                         (entries[i].first < entries[j].first ? entries[j].second : entries[i].second);
      }
  }
  for (const auto& [key, inner] : off_diag)
    report.add("columns " + std::to_string(key.first) + "," + std::to_string(key.second),
               std::abs(inner), tolerance);
  return report;
}

// All conditions in one report, the shape the check subcommand emits.
struct WellFormedReport {
  CheckReport unit_length;
  CheckReport orthogonality;
  CheckReport separability;
  CheckReport global_unitarity;
  bool locally_well_formed = false;
  bool globally_unitary = false;
};

inline WellFormedReport well_formed_report(const MachineDescription& m, const ConfigurationSpace& space,
                                           const OracleSet& oracle = {}) {
  WellFormedReport r;
  r.unit_length = check_unit_length(m);
  r.orthogonality = check_orthogonality(m);
  r.separability = check_separability(m);
  r.global_unitarity = check_global_unitarity(m, space, oracle);
  r.locally_well_formed = r.unit_length.passed && r.orthogonality.passed && r.separability.passed;
  r.globally_unitary = r.global_unitarity.passed;
  return r;
}

inline bool locally_well_formed(const MachineDescription& m) {
  return check_unit_length(m).passed && check_orthogonality(m).passed && check_separability(m).passed;
}

// --- seeded table generators -------------------------------------------------
//
// Valid tables: every state gets a fixed entry direction; the rows then live
// on the slot set {(q, tau, d(q))} of size |Q||Gamma|, and orthonormalizing a
// random complex square matrix over those slots satisfies all three
// conditions at once. Invalid tables: a valid table with one of several
// seeded defects. Perturbation magnitudes stay well above both tolerances so
// the local and global checks always land on the same side.

inline MachineDescription random_valid_table(std::uint64_t seed, int num_states = 3, int num_symbols = 2) {
  Rng rng(seed);
  MachineDescription m;
  for (int q = 0; q < num_states; ++q) m.states.push_back("q" + std::to_string(q));
  m.initial = 0;
  TapeAlphabet tape;
  tape.blank = '_';
  tape.gamma.push_back('_');
  const char syms[] = {'1', '0', 'a', 'b'};
  for (int i = 0; i + 1 < num_symbols; ++i) {
    tape.gamma.push_back(syms[i]);
    tape.sigma.push_back(syms[i]);
  }
  m.tapes.push_back(tape);

  std::vector<Dir> entry_dir(num_states);
  for (int q = 0; q < num_states; ++q) entry_dir[q] = Dir(int(rng.below(3)) - 1);

  const int g = int(tape.gamma.size());
  const int dim = num_states * g;
  std::vector<std::vector<Complex>> rows(dim, std::vector<Complex>(dim));
  for (auto& row : rows)
    for (auto& a : row) a = Complex(rng.gaussian(), rng.gaussian());
  // Gram-Schmidt
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < i; ++j) {
      Complex proj = dot(rows[j], rows[i]);
      for (int c = 0; c < dim; ++c) rows[i][c] -= proj * rows[j][c];
    }
    double n = norm2(rows[i]);
    for (auto& a : rows[i]) a /= n;
  }

  m.delta.assign(std::size_t(dim), {});
  for (int q = 0; q < num_states; ++q) {
    for (int s = 0; s < g; ++s) {
      auto& row = m.delta[m.row_key(q, {s})];
      const auto& amps = rows[q * g + s];
      for (int tq = 0; tq < num_states; ++tq)
        for (int ts = 0; ts < g; ++ts) {
          Complex a = amps[tq * g + ts];
          if (std::abs(a) < 1e-14) continue;
          DeltaTarget t;
          t.state = tq;
          t.written = {ts};
          t.dirs = {entry_dir[tq]};
          t.amp = a;
          row.push_back(t);
        }
    }
  }
  return m;
}

inline MachineDescription perturb_table(const MachineDescription& valid, std::uint64_t seed) {
  Rng rng(seed);
  MachineDescription m = valid;
  const int rows = int(m.delta.size());
  int mode = int(rng.below(4));
  int target_row = int(rng.below(std::size_t(rows)));
  while (m.delta[target_row].empty()) target_row = (target_row + 1) % rows;
  auto& row = m.delta[target_row];
  double eps = 1e-4 + 0.3 * rng.uniform();
  switch (mode) {
    case 0:  // shift one amplitude
      row[rng.below(row.size())].amp += Complex(eps, eps / 2);
      break;
    case 1:  // rescale a whole row
      for (auto& t : row) t.amp *= (1.0 + eps);
      break;
    case 2: {  // duplicate a row over another source
      int other = (target_row + 1 + int(rng.below(std::size_t(rows - 1)))) % rows;
      m.delta[other] = row;
      break;
    }
    default: {  // redirect the heaviest entry
      std::size_t heaviest = 0;
      for (std::size_t i = 0; i < row.size(); ++i)
        if (std::abs(row[i].amp) > std::abs(row[heaviest].amp)) heaviest = i;
      Dir old = row[heaviest].dirs[0];
      row[heaviest].dirs[0] = old == Dir::L ? Dir::R : Dir::L;
      break;
    }
  }
  return m;
}

}  // namespace qtm
