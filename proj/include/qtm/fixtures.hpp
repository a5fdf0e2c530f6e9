#pragma once

#include <map>
#include <string>
#include <vector>

#include "qtm/common.hpp"
#include "qtm/evolution.hpp"
#include "qtm/machine.hpp"
#include "qtm/qopt.hpp"

namespace qtm {

// Authoring aid for reversible tables. Every state declares the directions
// its incoming transitions use, so rows live on the slot set (state, written
// symbols) and the table is valid exactly when the row matrix over those
// slots is orthonormal. Rows for (state, symbol) pairs the author never maps
// are completed automatically with vectors orthogonal to everything else;
// those pairs are unreachable on the documented input domain, so where the
// completion points is immaterial.
class MachineBuilder {
 public:
  struct Branch {
    std::string to;
    std::string write;
    Complex amp;
  };

  explicit MachineBuilder(std::vector<std::string> alphabets) {
    for (const auto& a : alphabets) {
      TapeAlphabet tape;
      tape.blank = a[0];
      for (char c : a) tape.gamma.push_back(c);
      for (std::size_t i = 1; i < a.size(); ++i) tape.sigma.push_back(a[i]);
      machine_.tapes.push_back(tape);
    }
  }

  // dirs: one of L/N/R per tape, the unique entry direction of the state
  MachineBuilder& state(const std::string& name, const std::string& dirs) {
    if (index_.count(name)) throw Error(errkind::kValidation, "duplicate state " + name);
    index_[name] = int(machine_.states.size());
    machine_.states.push_back(name);
    std::vector<Dir> dv;
    for (char c : dirs) dv.push_back(*dir_from_char(c));
    if (int(dv.size()) != machine_.tape_count())
      throw Error(errkind::kValidation, "one entry direction per tape required");
    entry_dirs_.push_back(dv);
    return *this;
  }

  MachineBuilder& initial(const std::string& name) {
    machine_.initial = index_.at(name);
    return *this;
  }

  MachineBuilder& final_state(const std::string& name) {
    machine_.finals.push_back(index_.at(name));
    return *this;
  }

  MachineBuilder& oracle_states(const std::string& pre, const std::string& post) {
    machine_.flags.oracle = true;
    machine_.pre_query = index_.at(pre);
    machine_.post_query = index_.at(post);
    return *this;
  }

  MachineBuilder& stationary(bool v = true) {
    machine_.flags.stationary = v;
    return *this;
  }

  MachineBuilder& map(const std::string& from, const std::string& scan, const std::string& to,
                      const std::string& write) {
    return row(from, scan, {{to, write, 1.0}});
  }

  MachineBuilder& row(const std::string& from, const std::string& scan, std::vector<Branch> branches) {
    rows_.push_back({index_.at(from), sym_indices(scan), std::move(branches)});
    return *this;
  }

  MachineDescription build() {
    MachineDescription& m = machine_;
    m.flags.normal_form = !m.finals.empty();
    const int g = m.sym_product();
    const int n = m.state_count();
    const int dim = n * g;

    auto slot = [&](int q, int code) { return q * g + code; };
    std::vector<std::vector<Complex>> dense;     // authored + synthesized rows
    std::vector<int> row_of(dim, -1);            // row key -> dense index, -1 empty

    for (const auto& r : rows_) {
      int key = slot(r.from, m.sym_code(r.scan));
      if (row_of[key] >= 0) throw Error(errkind::kValidation, "duplicate row for one source");
      std::vector<Complex> v(dim, 0.0);
      for (const auto& b : r.branches) {
        int q = index_.at(b.to);
        if (m.flags.oracle && q == m.post_query)
          throw Error(errkind::kValidation, "the oracle step owns entry to the post-query state");
        v[slot(q, m.sym_code(sym_indices(b.write)))] += b.amp;
      }
      row_of[key] = int(dense.size());
      dense.push_back(std::move(v));
    }
    // synthesized normal-form rows occupy the (initial, code) slots
    if (!m.finals.empty()) {
      for (Dir d : entry_dirs_[m.initial])
        if (d != Dir::N)
          throw Error(errkind::kValidation, "normal form requires N entry directions on the initial state");
      for (int q : m.finals)
        for (int code = 0; code < g; ++code) {
          int key = slot(q, code);
          if (row_of[key] >= 0) throw Error(errkind::kValidation, "explicit rows on a final state");
          std::vector<Complex> v(dim, 0.0);
          v[slot(m.initial, code)] = 1.0;
          row_of[key] = int(dense.size());
          dense.push_back(std::move(v));
        }
    }

    // complete the empty rows with an orthonormal remainder basis
    for (int q = 0; q < n; ++q) {
      if (m.flags.oracle && q == m.pre_query) continue;
      for (int code = 0; code < g; ++code) {
        int key = slot(q, code);
        if (row_of[key] >= 0) continue;
        std::vector<int> candidates{key};
        for (int s = 0; s < dim; ++s)
          if (s != key && !(m.flags.oracle && s / g == m.post_query)) candidates.push_back(s);
        bool done = false;
        for (double threshold : {0.25, 1e-8}) {
          for (int cand : candidates) {
            if (m.flags.oracle && cand / g == m.post_query) continue;
            std::vector<Complex> v(dim, 0.0);
            v[cand] = 1.0;
            for (const auto& r : dense) {
              Complex proj = dot(r, v);
              if (proj == Complex(0.0)) continue;
              for (int i = 0; i < dim; ++i) v[i] -= proj * r[i];
            }
            double nn = norm2(v);
            if (nn * nn > threshold) {
              for (auto& a : v) a /= nn;
              row_of[key] = int(dense.size());
              dense.push_back(std::move(v));
              done = true;
              break;
            }
          }
          if (done) break;
        }
        if (!done) throw Error(errkind::kValidation, "row completion failed; table is overconstrained");
      }
    }

    // materialize delta (synthesized final rows stay implicit)
    m.delta.assign(std::size_t(dim), {});
    for (int q = 0; q < n; ++q) {
      if (m.is_final(q) && m.flags.normal_form) continue;
      if (m.flags.oracle && q == m.pre_query) continue;
      for (int code = 0; code < g; ++code) {
        const auto& v = dense[row_of[slot(q, code)]];
        for (int s = 0; s < dim; ++s) {
          if (std::abs(v[s]) <= 1e-14) continue;
          DeltaTarget t;
          t.state = s / g;
          t.written = m.sym_decode(s % g);
          t.dirs = entry_dirs_[t.state];
          t.amp = v[s];
          m.delta[slot(q, code)].push_back(t);
        }
      }
    }
    return m;
  }

 private:
  struct RowSpec {
    int from;
    std::vector<int> scan;
    std::vector<Branch> branches;
  };

  std::vector<int> sym_indices(const std::string& chars) const {
    if (int(chars.size()) != machine_.tape_count())
      throw Error(errkind::kValidation, "one symbol per tape required: " + chars);
    std::vector<int> out(machine_.tape_count());
    for (int i = 0; i < machine_.tape_count(); ++i) {
      out[i] = machine_.tapes[i].index_of(chars[i]);
      if (out[i] < 0) throw Error(errkind::kValidation, std::string("symbol not in alphabet: ") + chars[i]);
    }
    return out;
  }

  MachineDescription machine_;
  std::map<std::string, int> index_;
  std::vector<std::vector<Dir>> entry_dirs_;
  std::vector<RowSpec> rows_;
};

// --- the corpus ----------------------------------------------------------------

struct ReferenceValue {
  std::string quantity;  // acceptance | lambdaMax
  std::string input;
  std::string oracle_members;  // for acceptance under an oracle
  int steps = -1;              // acceptance: run length
  double value = 0.0;
  std::string provenance;  // the generating oracle
  std::string command;     // regenerating CLI line
};

struct FixtureRecord {
  std::string name;
  MachineDescription machine;
  std::vector<int> windows;
  int halt_steps = -1;
  int index_size = 0;
  std::string witness_input;
  bool expect_well_formed = true;
  std::vector<ReferenceValue> references;

  bool is_witness() const { return index_size > 0; }

  OptProblem problem() const {
    InputRule rule;
    rule.windows = windows;
    rule.halt_steps = halt_steps;
    return OptProblem::for_machine(machine, index_size, rule);
  }
};

namespace fixtures {

inline MachineDescription identity_machine() {
  MachineBuilder b({"_01"});
  b.state("q0", "N").initial("q0").stationary();
  b.map("q0", "_", "q0", "_").map("q0", "0", "q0", "0").map("q0", "1", "q0", "1");
  return b.build();
}

inline MachineDescription always_accept() {
  MachineBuilder b({"_01"});
  b.state("q0", "N").state("qf", "N");
  b.initial("q0").final_state("qf").stationary();
  b.map("q0", "_", "qf", "1").map("q0", "1", "qf", "0").map("q0", "0", "qf", "_");
  return b.build();
}

inline MachineDescription coin_flip() {
  MachineBuilder b({"_01"});
  b.state("q0", "N").state("qf", "N");
  b.initial("q0").final_state("qf").stationary();
  b.row("q0", "_", {{"qf", "1", kInvSqrt2}, {"qf", "0", kInvSqrt2}});
  b.row("q0", "0", {{"qf", "1", kInvSqrt2}, {"qf", "0", -kInvSqrt2}});
  b.map("q0", "1", "qf", "_");
  return b.build();
}

inline MachineDescription two_tape_stash() {
  MachineBuilder b({"_1", "_1"});
  b.state("q0", "NN").state("qf", "NN");
  b.initial("q0").final_state("qf").stationary();
  b.map("q0", "__", "qf", "1_").map("q0", "1_", "qf", "11");
  return b.build();
}

// Writes the query string "0" and a zero answer bit on the query tape, asks
// the oracle, and accepts exactly when the answer bit came back flipped.
inline MachineDescription oracle_member() {
  MachineBuilder b({"_1", "_01"});
  b.state("q0", "NN").state("w1", "NR").state("qpre", "NN").state("qpost", "NN").state("qf", "NN");
  b.initial("q0").final_state("qf").oracle_states("qpre", "qpost");
  b.map("q0", "__", "w1", "_0").map("q0", "1_", "w1", "10");
  b.map("w1", "__", "qpre", "_0").map("w1", "1_", "qpre", "10");
  b.map("qpost", "_0", "qf", "_0").map("qpost", "10", "qf", "_1");
  b.map("qpost", "_1", "qf", "10").map("qpost", "11", "qf", "11");
  return b.build();
}

inline MachineDescription bad_separability() {
  MachineDescription m;
  m.states = {"A", "B"};
  m.initial = 0;
  TapeAlphabet tape;
  tape.blank = '_';
  tape.gamma = {'_', '1'};
  tape.sigma = {'1'};
  m.tapes.push_back(tape);
  m.delta.assign(4, {});
  for (int s = 0; s < 2; ++s) {
    DeltaTarget left{1, {s}, {Dir::L}, kInvSqrt2};
    DeltaTarget right{1, {s}, {Dir::R}, kInvSqrt2};
    m.delta[m.row_key(0, {s})] = {left, right};
    DeltaTarget back{0, {s}, {Dir::N}, 1.0};
    m.delta[m.row_key(1, {s})] = {back};
  }
  return m;
}

// Swaps the index qubit into the output cell: accepts exactly the basis
// index |1>.
inline MachineDescription projector_p1() {
  MachineBuilder b({"_01"});
  b.state("q0", "N");
  for (char s : {'_', '0', '1'}) {
    b.state(std::string("cA") + s, "R");
    b.state(std::string("cB") + s, "R");
    b.state(std::string("rL") + s, "L");
    b.state(std::string("rM") + s, "L");
  }
  b.state("qf", "N");
  b.initial("q0").final_state("qf").stationary();
  for (char x : {'_', '0', '1'}) {
    std::string xs(1, x);
    b.map("q0", xs, "cA" + xs, "_");
    for (char s : {'_', '0', '1'})
      b.map("cA" + xs, std::string(1, s), "cB" + xs, std::string(1, s));
    for (char t : {'_', '0', '1'})
      b.map("cB" + xs, std::string(1, t), "rL" + std::string(1, t), xs);
    for (char s : {'_', '0', '1'})
      b.map("rL" + xs, std::string(1, s), "rM" + xs, std::string(1, s));
    b.map("rM" + xs, "_", "qf", xs);
  }
  return b.build();
}

// Accepts the index state |phi> with probability |<+|phi>|^2: walks to the
// index cell, applies the balanced rotation there, and reports whether the
// rotated bit reads 0.
inline MachineDescription hadamard_sandwich_p1() {
  MachineBuilder b({"_01"});
  b.state("q0", "N").state("m1", "R").state("m2", "R");
  b.state("h0", "L").state("h1", "L").state("h_", "L");
  b.state("h20", "L").state("h21", "L").state("h2_", "L");
  b.state("wa", "R").state("wr", "R").state("wb", "R");
  b.state("wa2", "R").state("wr2", "R").state("wb2", "R");
  b.state("afin", "L").state("rfin", "L");
  b.state("afinM", "L").state("rfinM", "L");
  b.state("qf", "N");
  b.initial("q0").final_state("qf").stationary();

  for (char s : {'_', '0', '1'}) b.map("q0", std::string(1, s), "m1", std::string(1, s));
  for (char s : {'_', '0', '1'}) b.map("m1", std::string(1, s), "m2", std::string(1, s));
  b.row("m2", "0", {{"h0", "0", kInvSqrt2}, {"h1", "1", kInvSqrt2}});
  b.row("m2", "1", {{"h0", "0", kInvSqrt2}, {"h1", "1", -kInvSqrt2}});
  b.map("m2", "_", "h_", "_");
  for (std::string h : {"0", "1", "_"})
    for (char s : {'_', '0', '1'}) b.map("h" + h, std::string(1, s), "h2" + h, std::string(1, s));
  b.map("h20", "0", "wa", "1");
  b.map("h21", "0", "wr", "0");
  b.map("h2_", "0", "wb", "0");
  for (char s : {'_', '0', '1'}) {
    b.map("wa", std::string(1, s), "wa2", std::string(1, s));
    b.map("wr", std::string(1, s), "wr2", std::string(1, s));
    b.map("wb", std::string(1, s), "wb2", std::string(1, s));
  }
  b.map("wa2", "0", "afin", "0");
  b.map("wr2", "1", "rfin", "1");
  b.map("wb2", "_", "rfin", "_");
  for (char s : {'_', '0', '1'}) {
    b.map("afin", std::string(1, s), "afinM", std::string(1, s));
    b.map("rfin", std::string(1, s), "rfinM", std::string(1, s));
  }
  b.map("afinM", "1", "qf", "1");
  b.map("rfinM", "0", "qf", "0");
  return b.build();
}

// Ignores its index and accepts with the fixed probability c.
inline MachineDescription const_witness(double c) {
  MachineBuilder b({"_01"});
  b.state("q0", "N");
  for (char s : {'_', '0', '1'}) b.state(std::string("w") + s, "R");
  b.state("aR", "L").state("rR", "L").state("qf", "N");
  b.initial("q0").final_state("qf").stationary();
  double sa = std::sqrt(c), sr = std::sqrt(1.0 - c);
  for (char s : {'_', '0', '1'}) {
    std::string ss(1, s);
    b.map("q0", ss, "w" + ss, "_");
    b.row("w" + ss, "_", {{"aR", ss, sa}, {"rR", ss, sr}});
  }
  b.map("aR", "_", "qf", "1");
  b.map("rR", "_", "qf", "0");
  return b.build();
}

// Reads the dispatch bit y of the paired input "0y" and accepts with
// probability c0 or c1; the index is never touched.
inline MachineDescription two_point(double c0, double c1) {
  MachineBuilder b({"_01"});
  b.state("q0", "N").state("m1", "R");
  b.state("a20", "L").state("a21", "L").state("r20", "L").state("r21", "L").state("r2_", "L");
  b.state("a30", "R").state("a31", "R").state("r30", "R").state("r31", "R").state("r3_", "R");
  b.state("a4", "L").state("r4", "L").state("qf", "N");
  b.initial("q0").final_state("qf").stationary();

  for (char s : {'_', '0', '1'}) b.map("q0", std::string(1, s), "m1", std::string(1, s));
  b.row("m1", "0", {{"a20", "0", std::sqrt(c0)}, {"r20", "0", std::sqrt(1.0 - c0)}});
  b.row("m1", "1", {{"a21", "1", std::sqrt(c1)}, {"r21", "1", std::sqrt(1.0 - c1)}});
  b.map("m1", "_", "r2_", "_");
  for (std::string y : {"0", "1"}) {
    b.map("a2" + y, "0", "a3" + y, "1");  // write the accept bit over the pairing prefix
    b.map("r2" + y, "0", "r3" + y, "0");
    b.map("a3" + y, y, "a4", y);  // rejoin the carried dispatch bit with its tape copy
    b.map("r3" + y, y, "r4", y);
  }
  b.map("r2_", "0", "r3_", "0");
  b.map("r3_", "_", "r4", "_");
  b.map("a4", "1", "qf", "1");
  b.map("r4", "0", "qf", "0");
  return b.build();
}

// Two dispatch bits: input "0ab" selects one of four acceptance constants.
inline MachineDescription four_point(double c00, double c01, double c10, double c11) {
  MachineBuilder b({"_01"});
  b.state("q0", "N").state("m1", "R");
  b.state("m20", "R").state("m21", "R").state("m2_", "R");
  const char* bits2[] = {"00", "01", "10", "11"};
  for (const char* y : bits2) {
    b.state(std::string("a3") + y, "L");
    b.state(std::string("r3") + y, "L");
  }
  for (const char* y : {"0", "1"}) {
    b.state(std::string("a4") + y, "L");
    b.state(std::string("r4") + y, "L");
    b.state(std::string("a5") + y, "R");
    b.state(std::string("r5") + y, "R");
    b.state(std::string("a6") + y, "R");
    b.state(std::string("r6") + y, "R");
  }
  b.state("a7", "L").state("r7", "L").state("a8", "L").state("r8", "L").state("qf", "N");
  b.initial("q0").final_state("qf").stationary();

  double c[2][2] = {{c00, c01}, {c10, c11}};
  for (char s : {'_', '0', '1'}) b.map("q0", std::string(1, s), "m1", std::string(1, s));
  for (char y1 : {'0', '1'}) b.map("m1", std::string(1, y1), "m2" + std::string(1, y1), std::string(1, y1));
  b.map("m1", "_", "m2_", "_");
  for (char y1 : {'0', '1'})
    for (char y2 : {'0', '1'}) {
      std::string yy{y1, y2};
      double cv = c[y1 - '0'][y2 - '0'];
      b.row("m2" + std::string(1, y1), std::string(1, y2),
            {{"a3" + yy, std::string(1, y2), std::sqrt(cv)},
             {"r3" + yy, std::string(1, y2), std::sqrt(1.0 - cv)}});
    }
  for (char y1 : {'0', '1'})
    for (char y2 : {'0', '1'}) {
      std::string yy{y1, y2};
      b.map("a3" + yy, std::string(1, y1), "a4" + std::string(1, y2), std::string(1, y1));
      b.map("r3" + yy, std::string(1, y1), "r4" + std::string(1, y2), std::string(1, y1));
    }
  for (const char* y2 : {"0", "1"}) {
    b.map(std::string("a4") + y2, "0", std::string("a5") + y2, "1");
    b.map(std::string("r4") + y2, "0", std::string("r5") + y2, "0");
    for (char s : {'_', '0', '1'}) {
      b.map(std::string("a5") + y2, std::string(1, s), std::string("a6") + y2, std::string(1, s));
      b.map(std::string("r5") + y2, std::string(1, s), std::string("r6") + y2, std::string(1, s));
    }
    b.map(std::string("a6") + y2, y2, "a7", y2);
    b.map(std::string("r6") + y2, y2, "r7", y2);
  }
  for (char s : {'_', '0', '1'}) {
    b.map("a7", std::string(1, s), "a8", std::string(1, s));
    b.map("r7", std::string(1, s), "r8", std::string(1, s));
  }
  b.map("a8", "1", "qf", "1");
  b.map("r8", "0", "qf", "0");
  return b.build();
}

// Entangling two-qubit witness: accepts an index state with probability
// |<bell|phi>|^2 where bell = (|00> + |11>)/sqrt(2). The best product index
// reaches only 1/2.
inline MachineDescription bell_p2() {
  MachineBuilder b({"_01"});
  b.state("q0", "N").state("n1", "R").state("n2", "R");
  b.state("c0", "R").state("c1", "R").state("c_", "R");
  b.state("d0", "L").state("d1", "L").state("d_", "L");
  b.state("e", "N");
  b.state("h0", "R").state("h1", "R").state("h_", "R");
  const char* bits2[] = {"00", "01", "10", "11"};
  for (const char* g : bits2) b.state(std::string("g") + g, "L");
  b.state("k0T", "L").state("k0F", "L").state("k1T", "L").state("k1F", "L");
  b.state("l0T", "L").state("l0F", "L").state("l1T", "L").state("l1F", "L");
  b.state("wa", "R").state("r1", "R").state("r2", "R").state("r3", "R");
  b.state("wa2", "R").state("r1b", "R").state("r2b", "R").state("r3b", "R");
  b.state("wa3", "R").state("r1c", "R").state("r2c", "R").state("r3c", "R");
  b.state("wa4", "L").state("rj", "L");
  b.state("wa5", "L").state("rj2", "L");
  b.state("wa6", "L").state("rj3", "L");
  b.state("qf", "N");
  b.initial("q0").final_state("qf").stationary();

  for (char s : {'_', '0', '1'}) b.map("q0", std::string(1, s), "n1", std::string(1, s));
  for (char s : {'_', '0', '1'}) b.map("n1", std::string(1, s), "n2", std::string(1, s));
  for (char t : {'_', '0', '1'}) b.map("n2", std::string(1, t), "c" + std::string(1, t), std::string(1, t));
  // controlled flip of the second qubit
  for (char t : {'_', '0', '1'}) b.map("c0", std::string(1, t), "d0", std::string(1, t));
  b.map("c1", "0", "d1", "1");
  b.map("c1", "1", "d1", "0");
  b.map("c1", "_", "d1", "_");
  for (char t : {'_', '0', '1'}) b.map("c_", std::string(1, t), "d_", std::string(1, t));
  b.map("d0", "0", "e", "0");
  b.map("d1", "1", "e", "1");
  b.map("d_", "_", "e", "_");
  // balanced rotation on the first qubit
  b.row("e", "0", {{"h0", "0", kInvSqrt2}, {"h1", "1", kInvSqrt2}});
  b.row("e", "1", {{"h0", "0", kInvSqrt2}, {"h1", "1", -kInvSqrt2}});
  b.map("e", "_", "h_", "_");
  for (char t1 : {'0', '1'})
    for (char t2 : {'0', '1'})
      b.map("h" + std::string(1, t1), std::string(1, t2), std::string("g") + t1 + t2, std::string(1, t2));
  b.map("g00", "0", "k0T", "0");
  b.map("g10", "1", "k0F", "1");
  b.map("g01", "0", "k1T", "0");
  b.map("g11", "1", "k1F", "1");
  for (std::string k : {"0T", "0F", "1T", "1F"})
    for (char s : {'_', '0', '1'}) b.map("k" + k, std::string(1, s), "l" + k, std::string(1, s));
  b.map("l0T", "0", "wa", "1");
  b.map("l0F", "0", "r1", "0");
  b.map("l1T", "0", "r2", "0");
  b.map("l1F", "0", "r3", "0");
  for (char s : {'_', '0', '1'}) {
    b.map("wa", std::string(1, s), "wa2", std::string(1, s));
    b.map("r1", std::string(1, s), "r1b", std::string(1, s));
    b.map("r2", std::string(1, s), "r2b", std::string(1, s));
    b.map("r3", std::string(1, s), "r3b", std::string(1, s));
  }
  b.map("wa2", "0", "wa3", "0");
  b.map("r1b", "1", "r1c", "1");
  b.map("r2b", "0", "r2c", "0");
  b.map("r3b", "1", "r3c", "1");
  b.map("wa3", "0", "wa4", "0");
  b.map("r1c", "0", "rj", "_");  // scrambled rewrites keep the merge injective
  b.map("r2c", "1", "rj", "1");
  b.map("r3c", "1", "rj", "0");
  for (char s : {'_', '0', '1'}) {
    b.map("wa4", std::string(1, s), "wa5", std::string(1, s));
    b.map("rj", std::string(1, s), "rj2", std::string(1, s));
  }
  for (char s : {'_', '0', '1'}) {
    b.map("wa5", std::string(1, s), "wa6", std::string(1, s));
    b.map("rj2", std::string(1, s), "rj3", std::string(1, s));
  }
  b.map("wa6", "1", "qf", "1");
  b.map("rj3", "0", "qf", "0");
  return b.build();
}

// Clean one-qubit sources: the balanced state and the basis state |1>.
inline MachineDescription plus_source() {
  MachineBuilder b({"_01"});
  b.state("q0", "N").state("qf", "N");
  b.initial("q0").final_state("qf").stationary();
  b.row("q0", "_", {{"qf", "0", kInvSqrt2}, {"qf", "1", kInvSqrt2}});
  b.row("q0", "0", {{"qf", "0", kInvSqrt2}, {"qf", "1", -kInvSqrt2}});
  b.map("q0", "1", "qf", "_");
  return b.build();
}

inline MachineDescription one_source() {
  MachineBuilder b({"_01"});
  b.state("q0", "N").state("qf", "N");
  b.initial("q0").final_state("qf").stationary();
  b.map("q0", "_", "qf", "1").map("q0", "1", "qf", "_").map("q0", "0", "qf", "0");
  return b.build();
}

}  // namespace fixtures

inline std::vector<FixtureRecord> fixture_corpus() {
  using namespace fixtures;
  std::vector<FixtureRecord> out;
  auto add = [&](FixtureRecord r) { out.push_back(std::move(r)); };

  auto ref_acc = [](std::string input, int steps, double value, std::string provenance,
                    std::string command, std::string oracle = "") {
    ReferenceValue v;
    v.quantity = "acceptance";
    v.input = std::move(input);
    v.steps = steps;
    v.value = value;
    v.provenance = std::move(provenance);
    v.command = std::move(command);
    v.oracle_members = std::move(oracle);
    return v;
  };
  auto ref_lambda = [](std::string input, double value, std::string provenance, std::string command) {
    ReferenceValue v;
    v.quantity = "lambdaMax";
    v.input = std::move(input);
    v.value = value;
    v.provenance = std::move(provenance);
    v.command = std::move(command);
    return v;
  };

  {
    FixtureRecord r;
    r.name = "identity";
    r.machine = identity_machine();
    r.windows = {5};
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "always_accept";
    r.machine = always_accept();
    r.windows = {5};
    r.halt_steps = 1;
    r.references = {ref_acc("", 1, 1.0, "state-vector simulation",
                            "qtmlab run fixtures/always_accept.json --input '' --steps 1 --windows 5")};
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "coin_flip";
    r.machine = coin_flip();
    r.windows = {5};
    r.halt_steps = 1;
    r.references = {ref_acc("", 1, 0.5, "state-vector simulation",
                            "qtmlab run fixtures/coin_flip.json --input '' --steps 1 --windows 5")};
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "two_tape_stash";
    r.machine = two_tape_stash();
    r.windows = {5, 5};
    r.halt_steps = 1;
    r.references = {ref_acc("1", 1, 1.0, "state-vector simulation",
                            "qtmlab run fixtures/two_tape_stash.json --input 1 --steps 1 --windows 5,5")};
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "oracle_member";
    r.machine = oracle_member();
    r.windows = {5, 5};
    r.halt_steps = 4;
    r.references = {
        ref_acc("", 4, 1.0, "state-vector simulation with oracle {0}",
                "qtmlab run fixtures/oracle_member.json --input '' --steps 4 --windows 5,5 --oracle-members 0",
                "0"),
        ref_acc("", 4, 0.0, "state-vector simulation with empty oracle",
                "qtmlab run fixtures/oracle_member.json --input '' --steps 4 --windows 5,5")};
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "bad_separability";
    r.machine = bad_separability();
    r.windows = {5};
    r.expect_well_formed = false;
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "projector_p1";
    r.machine = projector_p1();
    r.windows = {5};
    r.halt_steps = 5;
    r.index_size = 1;
    r.witness_input = "0";
    r.references = {ref_lambda("0", 1.0, "eigensolver with sampling cross-check",
                               "qtmlab qopt solve fixtures/projector_p1.problem.json --input 0")};
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "hadamard_sandwich_p1";
    r.machine = hadamard_sandwich_p1();
    r.windows = {5};
    r.halt_steps = 9;
    r.index_size = 1;
    r.witness_input = "0";
    r.references = {ref_lambda("0", 1.0, "eigensolver with sampling cross-check",
                               "qtmlab qopt solve fixtures/hadamard_sandwich_p1.problem.json --input 0")};
    add(r);
  }
  const std::pair<const char*, double> consts[] = {{"const_q25", 0.25},
                                                   {"const_q36", 0.36},
                                                   {"const_q64", 0.64},
                                                   {"const_q90", 0.9},
                                                   {"const_third", 1.0 / 3.0}};
  for (auto [name, c] : consts) {
    FixtureRecord r;
    r.name = name;
    r.machine = const_witness(c);
    r.windows = {5};
    r.halt_steps = 3;
    r.index_size = 1;
    r.witness_input = "0";
    r.references = {ref_lambda("0", c, "eigensolver with sampling cross-check",
                               std::string("qtmlab qopt solve fixtures/") + name + ".problem.json --input 0")};
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "two_point";
    r.machine = two_point(0.2, 0.6);
    r.windows = {5};
    r.halt_steps = 5;
    r.index_size = 1;
    r.witness_input = pair_string("", "0");
    r.references = {
        ref_lambda(pair_string("", "0"), 0.2, "eigensolver with sampling cross-check",
                   "qtmlab qopt solve fixtures/two_point.problem.json --input 00"),
        ref_lambda(pair_string("", "1"), 0.6, "eigensolver with sampling cross-check",
                   "qtmlab qopt solve fixtures/two_point.problem.json --input 01")};
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "four_point";
    r.machine = four_point(0.9, 0.8, 0.7, 0.6);
    r.windows = {5};
    r.halt_steps = 9;
    r.index_size = 1;
    r.witness_input = pair_string("", "00");
    double values[] = {0.9, 0.8, 0.7, 0.6};
    const char* bits[] = {"00", "01", "10", "11"};
    for (int i = 0; i < 4; ++i)
      r.references.push_back(ref_lambda(pair_string("", bits[i]), values[i],
                                        "eigensolver with sampling cross-check",
                                        std::string("qtmlab qopt solve fixtures/four_point.problem.json --input 0") +
                                            bits[i]));
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "bell_p2";
    r.machine = bell_p2();
    r.windows = {5};
    r.halt_steps = 16;
    r.index_size = 2;
    r.witness_input = "0";
    r.references = {ref_lambda("0", 1.0, "eigensolver with sampling cross-check",
                               "qtmlab qopt solve fixtures/bell_p2.problem.json --input 0")};
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "plus_source";
    r.machine = plus_source();
    r.windows = {5};
    r.halt_steps = 1;
    add(r);
  }
  {
    FixtureRecord r;
    r.name = "one_source";
    r.machine = one_source();
    r.windows = {5};
    r.halt_steps = 1;
    add(r);
  }
  return out;
}

inline const FixtureRecord& find_fixture(const std::vector<FixtureRecord>& corpus, const std::string& name) {
  for (const auto& r : corpus)
    if (r.name == name) return r;
  throw Error(errkind::kValidation, "unknown fixture " + name);
}

// Recomputes every stored reference value with its generating oracle and
// reports drift beyond tolerance.
struct RegenReport {
  struct Line {
    std::string fixture;
    std::string quantity;
    std::string input;
    double stored;
    double regenerated;
    bool ok;
  };
  std::vector<Line> lines;
  bool passed = true;
};

inline double regenerate_reference(const FixtureRecord& r, const ReferenceValue& v) {
  if (v.quantity == "acceptance") {
    ConfigurationSpace space(r.machine, r.windows);
    OracleSet oracle;
    std::string members = v.oracle_members;
    std::size_t pos = 0;
    while (pos < members.size()) {
      std::size_t comma = members.find(',', pos);
      if (comma == std::string::npos) comma = members.size();
      oracle.members.insert(members.substr(pos, comma - pos));
      pos = comma + 1;
    }
    EvolutionOperator u(r.machine, space, oracle);
    return run(u, encode_input(space, v.input), v.steps).accept_probability;
  }
  if (v.quantity == "lambdaMax") return solve_opt(r.problem(), v.input);
  throw Error(errkind::kValidation, "unknown reference quantity " + v.quantity);
}

inline RegenReport regenerate(const std::vector<FixtureRecord>& corpus, double tolerance = 1e-9) {
  RegenReport report;
  for (const auto& r : corpus) {
    for (const auto& v : r.references) {
      double regen = regenerate_reference(r, v);
      bool ok = std::abs(regen - v.value) <= tolerance;
      report.lines.push_back({r.name, v.quantity, v.input, v.value, regen, ok});
      if (!ok) report.passed = false;
    }
  }
  return report;
}

}  // namespace qtm
