#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtm/common.hpp"

namespace qtm {

using Json = nlohmann::ordered_json;

// Tape alphabet. Symbols are single characters; the blank is a member and the
// input alphabet sigma is a subset.
struct TapeAlphabet {
  std::vector<char> gamma;
  std::vector<char> sigma;
  char blank = '_';

  int size() const { return int(gamma.size()); }
  int blank_index() const { return index_of(blank); }
  int index_of(char c) const {
    for (std::size_t i = 0; i < gamma.size(); ++i)
      if (gamma[i] == c) return int(i);
    return -1;
  }
};

enum class Dir : std::int8_t { L = -1, N = 0, R = 1 };

inline int head_shift(Dir d) { return int(d); }
inline char dir_char(Dir d) { return d == Dir::L ? 'L' : (d == Dir::N ? 'N' : 'R'); }
inline std::optional<Dir> dir_from_char(char c) {
  switch (c) {
    case 'L': return Dir::L;
    case 'N': return Dir::N;
    case 'R': return Dir::R;
    default: return std::nullopt;
  }
}

// One target of a transition row: successor state, written symbols, head
// directions, and the amplitude attached to this branch.
struct DeltaTarget {
  int state = 0;
  std::vector<int> written;  // per-tape symbol indices
  std::vector<Dir> dirs;
  Complex amp;
};

struct MachineFlags {
  bool normal_form = false;
  bool stationary = false;
  bool oracle = false;
};

class MachineDescription {
 public:
  std::vector<std::string> states;
  int initial = 0;
  std::vector<int> finals;
  std::vector<TapeAlphabet> tapes;
  MachineFlags flags;
  int pre_query = -1;
  int post_query = -1;

  // delta rows, keyed by row_key(state, scanned symbols); empty vectors for
  // rows owned by the normal-form rule or the query step.
  std::vector<std::vector<DeltaTarget>> delta;

  int tape_count() const { return int(tapes.size()); }
  int state_count() const { return int(states.size()); }

  bool is_final(int q) const {
    return std::find(finals.begin(), finals.end(), q) != finals.end();
  }

  // Mixed-radix code of a per-tape symbol-index tuple, tape 0 most significant.
  int sym_code(const std::vector<int>& syms) const {
    int code = 0;
    for (int i = 0; i < tape_count(); ++i) code = code * tapes[i].size() + syms[i];
    return code;
  }

  int sym_product() const {
    int p = 1;
    for (const auto& t : tapes) p *= t.size();
    return p;
  }

  std::vector<int> sym_decode(int code) const {
    std::vector<int> syms(tape_count());
    for (int i = tape_count() - 1; i >= 0; --i) {
      syms[i] = code % tapes[i].size();
      code /= tapes[i].size();
    }
    return syms;
  }

  int row_key(int q, const std::vector<int>& syms) const { return q * sym_product() + sym_code(syms); }

  const std::vector<DeltaTarget>& row(int q, const std::vector<int>& syms) const {
    return delta[row_key(q, syms)];
  }

  // Rows with the normal-form self-loops for final states filled in. A final
  // state rewrites nothing, keeps the heads still, and re-enters the initial
  // state; query-state rows stay empty (that step is the oracle map).
  std::vector<std::vector<DeltaTarget>> effective_delta() const {
    auto rows = delta;
    if (flags.normal_form) {
      for (int q : finals) {
        for (int code = 0; code < sym_product(); ++code) {
          DeltaTarget t;
          t.state = initial;
          t.written = sym_decode(code);
          t.dirs.assign(tape_count(), Dir::N);
          t.amp = 1.0;
          rows[q * sym_product() + code] = {t};
        }
      }
    }
    return rows;
  }

  // True for rows the table conditions must cover: everything except rows of
  // the pre-query state, whose single step is the oracle permutation.
  bool row_owned_by_table(int q) const { return !(flags.oracle && q == pre_query); }
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
  throw Error(errkind::kParse, where + ": " + what);
}

[[noreturn]] inline void validate_fail(const std::string& where, const std::string& what) {
  throw Error(errkind::kValidation, where + ": " + what);
}

inline char single_char(const Json& j, const std::string& where) {
  if (!j.is_string() || j.get<std::string>().size() != 1)
    parse_fail(where, "expected a single-character string");
  return j.get<std::string>()[0];
}

}  // namespace detail

// Machine file format, canonical key order:
//   {states, initial, finals, tapes:[{sigma,gamma,blank}],
//    delta:[{from:[q,[syms]], to:[q',[syms'],[dirs]], amp:{re,im}}],
//    flags:{normalForm,stationary,oracle}, oracleStates:{pre,post}}
inline MachineDescription parse_machine(const Json& doc) {
  using detail::parse_fail;
  using detail::validate_fail;
  MachineDescription m;

  if (!doc.is_object()) parse_fail("document", "expected an object");
  for (const char* key : {"states", "initial", "finals", "tapes", "delta"})
    if (!doc.contains(key)) parse_fail("document", std::string("missing field '") + key + "'");

  std::map<std::string, int> state_index;
  for (const auto& s : doc["states"]) {
    if (!s.is_string()) parse_fail("states", "expected strings");
    std::string name = s.get<std::string>();
    if (state_index.count(name)) validate_fail("states", "duplicate state '" + name + "'");
    state_index[name] = int(m.states.size());
    m.states.push_back(name);
  }
  if (m.states.empty()) validate_fail("states", "at least one state required");

  auto lookup_state = [&](const Json& j, const std::string& where) {
    if (!j.is_string()) parse_fail(where, "expected a state name");
    auto it = state_index.find(j.get<std::string>());
    if (it == state_index.end())
      validate_fail(where, "undeclared state '" + j.get<std::string>() + "'");
    return it->second;
  };

  m.initial = lookup_state(doc["initial"], "initial");
  for (const auto& f : doc["finals"]) m.finals.push_back(lookup_state(f, "finals"));

  for (std::size_t ti = 0; ti < doc["tapes"].size(); ++ti) {
    const Json& jt = doc["tapes"][ti];
    std::string where = "tapes[" + std::to_string(ti) + "]";
    TapeAlphabet tape;
    tape.blank = detail::single_char(jt.at("blank"), where + ".blank");
    for (const auto& g : jt.at("gamma")) tape.gamma.push_back(detail::single_char(g, where + ".gamma"));
    for (const auto& s : jt.at("sigma")) tape.sigma.push_back(detail::single_char(s, where + ".sigma"));
    if (tape.index_of(tape.blank) < 0) validate_fail(where, "blank symbol not in gamma");
    for (char c : tape.sigma)
      if (tape.index_of(c) < 0) validate_fail(where, std::string("sigma symbol '") + c + "' not in gamma");
    std::vector<char> seen;
    for (char c : tape.gamma) {
      if (std::find(seen.begin(), seen.end(), c) != seen.end())
        validate_fail(where, std::string("duplicate symbol '") + c + "' in gamma");
      seen.push_back(c);
    }
    m.tapes.push_back(tape);
  }
  if (m.tapes.empty()) validate_fail("tapes", "at least one tape required");

  if (doc.contains("flags")) {
    const Json& jf = doc["flags"];
    m.flags.normal_form = jf.value("normalForm", false);
    m.flags.stationary = jf.value("stationary", false);
    m.flags.oracle = jf.value("oracle", false);
  }
  if (m.flags.oracle) {
    if (!doc.contains("oracleStates")) parse_fail("oracleStates", "required when flags.oracle is set");
    m.pre_query = lookup_state(doc["oracleStates"].at("pre"), "oracleStates.pre");
    m.post_query = lookup_state(doc["oracleStates"].at("post"), "oracleStates.post");
  }

  auto parse_syms = [&](const Json& j, const std::string& where) {
    if (!j.is_array() || int(j.size()) != m.tape_count())
      parse_fail(where, "expected one symbol per tape");
    std::vector<int> syms(m.tape_count());
    for (int i = 0; i < m.tape_count(); ++i) {
      char c = detail::single_char(j[i], where);
      syms[i] = m.tapes[i].index_of(c);
      if (syms[i] < 0) validate_fail(where, std::string("undeclared symbol '") + c + "'");
    }
    return syms;
  };

  m.delta.assign(std::size_t(m.state_count()) * m.sym_product(), {});
  for (std::size_t ri = 0; ri < doc["delta"].size(); ++ri) {
    const Json& jr = doc["delta"][ri];
    std::string where = "delta[" + std::to_string(ri) + "]";
    int from_state = lookup_state(jr.at("from").at(0), where + ".from");
    std::vector<int> from_syms = parse_syms(jr.at("from").at(1), where + ".from");
    DeltaTarget t;
    t.state = lookup_state(jr.at("to").at(0), where + ".to");
    t.written = parse_syms(jr.at("to").at(1), where + ".to");
    const Json& jd = jr.at("to").at(2);
    if (!jd.is_array() || int(jd.size()) != m.tape_count())
      parse_fail(where + ".to", "expected one direction per tape");
    for (const auto& d : jd) {
      auto dir = dir_from_char(detail::single_char(d, where + ".to.dirs"));
      if (!dir) parse_fail(where + ".to.dirs", "directions are L, N, or R");
      t.dirs.push_back(*dir);
    }
    t.amp = Complex(jr.at("amp").at("re").get<double>(), jr.at("amp").at("im").get<double>());
    if (!is_finite(t.amp)) validate_fail(where + ".amp", "amplitude must be finite");

    if (m.flags.normal_form && m.is_final(from_state))
      validate_fail(where, "final-state rows are implicit under the normalForm flag");
    if (m.flags.oracle && from_state == m.pre_query)
      validate_fail(where, "pre-query rows are owned by the oracle step");
    m.delta[m.row_key(from_state, from_syms)].push_back(t);
  }

  // delta must be total on every table-owned, non-final row
  for (int q = 0; q < m.state_count(); ++q) {
    if (m.is_final(q) && m.flags.normal_form) continue;
    if (!m.row_owned_by_table(q)) continue;
    for (int code = 0; code < m.sym_product(); ++code) {
      if (m.delta[q * m.sym_product() + code].empty()) {
        auto syms = m.sym_decode(code);
        std::string tuple;
        for (int i = 0; i < m.tape_count(); ++i) tuple += m.tapes[i].gamma[syms[i]];
        validate_fail("delta", "no row for state '" + m.states[q] + "' scanning \"" + tuple + "\"");
      }
    }
  }
  return m;
}

inline MachineDescription parse_machine(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errkind::kParse, e.what());
  }
  return parse_machine(doc);
}

inline Json emit_machine(const MachineDescription& m) {
  Json doc;
  doc["states"] = m.states;
  doc["initial"] = m.states[m.initial];
  Json finals = Json::array();
  for (int f : m.finals) finals.push_back(m.states[f]);
  doc["finals"] = finals;
  Json tapes = Json::array();
  for (const auto& t : m.tapes) {
    Json jt;
    Json sigma = Json::array(), gamma = Json::array();
    for (char c : t.sigma) sigma.push_back(std::string(1, c));
    for (char c : t.gamma) gamma.push_back(std::string(1, c));
    jt["sigma"] = sigma;
    jt["gamma"] = gamma;
    jt["blank"] = std::string(1, t.blank);
    tapes.push_back(jt);
  }
  doc["tapes"] = tapes;

  Json delta = Json::array();
  for (int q = 0; q < m.state_count(); ++q) {
    for (int code = 0; code < m.sym_product(); ++code) {
      auto syms = m.sym_decode(code);
      for (const auto& t : m.delta[q * m.sym_product() + code]) {
        Json row;
        Json from_syms = Json::array(), to_syms = Json::array(), dirs = Json::array();
        for (int i = 0; i < m.tape_count(); ++i) from_syms.push_back(std::string(1, m.tapes[i].gamma[syms[i]]));
        for (int i = 0; i < m.tape_count(); ++i) to_syms.push_back(std::string(1, m.tapes[i].gamma[t.written[i]]));
        for (Dir d : t.dirs) dirs.push_back(std::string(1, dir_char(d)));
        row["from"] = Json::array({m.states[q], from_syms});
        row["to"] = Json::array({m.states[t.state], to_syms, dirs});
        row["amp"] = Json{{"re", t.amp.real()}, {"im", t.amp.imag()}};
        delta.push_back(row);
      }
    }
  }
  doc["delta"] = delta;
  doc["flags"] = Json{{"normalForm", m.flags.normal_form},
                      {"stationary", m.flags.stationary},
                      {"oracle", m.flags.oracle}};
  if (m.flags.oracle)
    doc["oracleStates"] = Json{{"pre", m.states[m.pre_query]}, {"post", m.states[m.post_query]}};
  return doc;
}

inline bool machines_equal(const MachineDescription& a, const MachineDescription& b) {
  return emit_machine(a) == emit_machine(b);
}

}  // namespace qtm
