#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtm/approx.hpp"
#include "qtm/constructions.hpp"
#include "qtm/decide.hpp"
#include "qtm/evolution.hpp"
#include "qtm/fixtures.hpp"
#include "qtm/machine.hpp"
#include "qtm/qopt.hpp"
#include "qtm/wellformedness.hpp"

namespace qtm::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCorpusEnv = "QTMLAB_CORPUS";

// exit-code contract: 0 pass/success, 1 check failure or promise violation,
// 2 usage error
enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2 };

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errkind::kUsage, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string dirname(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

inline MachineDescription load_machine(const std::string& path) {
  return parse_machine(read_file(path));
}

inline OracleSet parse_oracle_members(const std::string& csv) {
  OracleSet oracle;
  if (csv.empty()) return oracle;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    std::string member = csv.substr(pos, comma - pos);
    if (member == "@empty") member.clear();
    oracle.members.insert(member);
    pos = comma + 1;
  }
  return oracle;
}

inline OracleSet load_oracle(const std::string& path) {
  Json doc = Json::parse(read_file(path));
  OracleSet oracle;
  for (const auto& m : doc.at("members")) oracle.members.insert(m.get<std::string>());
  return oracle;
}

// problem.json: {machine: <object or file path>, indexSize, inputRule:{windows, haltSteps}}
inline OptProblem load_problem(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(errkind::kParse, e.what());
  }
  MachineDescription m;
  if (doc.at("machine").is_string()) {
    std::string mpath = doc["machine"].get<std::string>();
    if (!mpath.empty() && mpath[0] != '/') mpath = dirname(path) + "/" + mpath;
    m = load_machine(mpath);
  } else {
    m = parse_machine(doc["machine"]);
  }
  InputRule rule;
  if (doc.contains("inputRule")) {
    const Json& jr = doc["inputRule"];
    if (jr.contains("windows")) rule.windows = jr["windows"].get<std::vector<int>>();
    rule.halt_steps = jr.value("haltSteps", -1);
    if (jr.contains("spaceCap")) rule.space_cap = jr["spaceCap"].get<std::uint64_t>();
  }
  return OptProblem::for_machine(std::move(m), doc.at("indexSize").get<int>(), std::move(rule));
}

inline std::vector<int> parse_windows(const std::string& csv, int tapes) {
  if (csv.empty()) return std::vector<int>(tapes, kDefaultWindow);
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(std::stoi(csv.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (int(out.size()) == 1 && tapes > 1) out.assign(tapes, out[0]);
  if (int(out.size()) != tapes) throw Error(errkind::kUsage, "one window per tape required");
  return out;
}

inline Json check_report_json(const CheckReport& r) {
  Json j;
  j["name"] = r.name;
  j["pass"] = r.passed;
  j["worstViolation"] = r.worst;
  Json v = Json::array();
  for (const auto& viol : r.violations) v.push_back(Json{{"where", viol.where}, {"magnitude", viol.magnitude}});
  j["violations"] = v;
  return j;
}

inline Json qustring_json(const Qustring& q) {
  Json amps = Json::array();
  for (const Complex& a : q.amplitudes) amps.push_back(Json::array({a.real(), a.imag()}));
  return Json{{"size", q.size}, {"amplitudes", amps}};
}

}  // namespace detail

// The dispatcher: machine-readable JSON on standard output, a human summary
// plus the run manifest on standard error.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto started = std::chrono::steady_clock::now();

  CLI::App app{"desk-scale quantum Turing machine laboratory"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string machine_path, problem_path, input_x, windows_csv, oracle_path, oracle_csv, out_dir;
  std::string map_name = "identity", spec_path;
  int steps = 0, accuracy = 1, exponent = 2, bits = 8, qubits = 1, split = 1, index_size = -1;
  int classical_bits = 1, samples = 10000;
  std::uint64_t seed = 12345;
  bool verify = false, check_mode = false;

  auto* check = app.add_subcommand("check", "well-formedness conditions and global unitarity");
  check->add_option("machine", machine_path)->required();
  check->add_option("--windows", windows_csv);
  check->add_option("--oracle", oracle_path);
  check->add_option("--oracle-members", oracle_csv);

  auto* runcmd = app.add_subcommand("run", "evolve a machine and measure acceptance");
  runcmd->add_option("machine", machine_path)->required();
  runcmd->add_option("--input", input_x);
  runcmd->add_option("--steps", steps)->required();
  runcmd->add_option("--windows", windows_csv);
  runcmd->add_option("--oracle", oracle_path);
  runcmd->add_option("--oracle-members", oracle_csv);

  auto* qopt = app.add_subcommand("qopt", "quantum optimization");
  auto* solve = qopt->add_subcommand("solve", "maximal acceptance over quantum indices");
  solve->add_option("problem", problem_path)->required();
  solve->add_option("--input", input_x);
  solve->add_option("--samples", samples);
  solve->add_option("--seed", seed);

  auto* construct = app.add_subcommand("construct", "closure constructions with verification records");
  std::string op_name;
  construct->add_option("op", op_name)->required()->check(
      CLI::IsMember({"max", "convex", "product", "power", "square", "compose", "tensor", "sandwich"}));
  construct->add_option("problem", problem_path)->required();
  construct->add_option("--input", input_x);
  construct->add_option("--bits", classical_bits);
  construct->add_option("--source", machine_path);
  construct->add_option("--qubits", qubits);
  construct->add_option("--exponent", exponent);
  construct->add_option("--map", map_name);
  construct->add_option("--split", split);
  construct->add_option("--samples", samples);
  construct->add_option("--seed", seed);

  auto* qap = app.add_subcommand("qap", "acceptance of the simulated code at calibrated precision");
  qap->add_option("code", machine_path)->required();
  qap->add_option("--x", input_x);
  qap->add_option("-t,--steps", steps)->required();
  qap->add_option("-m,--accuracy", accuracy)->required();
  qap->add_option("--windows", windows_csv);

  auto* maxqtm = app.add_subcommand("maxqtm", "maximal acceptance of the simulated code");
  maxqtm->add_option("code", machine_path)->required();
  maxqtm->add_option("--x", input_x);
  maxqtm->add_option("-t,--steps", steps)->required();
  maxqtm->add_option("-m,--accuracy", accuracy)->required();
  maxqtm->add_option("--index-size", index_size);
  maxqtm->add_option("--windows", windows_csv);

  auto* decide = app.add_subcommand("decide", "decision predicates over optimization values");
  auto* qop_pred = decide->add_subcommand("qop", "compare dyadic floors of two problems");
  qop_pred->add_option("spec", spec_path)->required();
  qop_pred->add_option("--x", input_x);
  auto* search = decide->add_subcommand("search", "binary-search value extraction");
  search->add_option("--problem", problem_path)->required();
  search->add_option("--input", input_x);
  search->add_option("--bits", bits)->required();
  search->add_flag("--verify", verify);

  auto* fixtures_cmd = app.add_subcommand("fixtures", "bundled corpus maintenance");
  auto* regen = fixtures_cmd->add_subcommand("regen", "rewrite or verify the corpus");
  regen->add_option("--out", out_dir);
  regen->add_flag("--check", check_mode);

  std::vector<std::string> argv_copy = args;
  std::vector<char*> argv;
  std::string prog = "qtmlab";
  argv.push_back(prog.data());
  for (auto& a : argv_copy) argv.push_back(a.data());

  int exit_code = kOk;
  Json result;
  std::string summary;
  try {
    try {
      app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      std::stringstream help;
      if (e.get_exit_code() == 0) {  // --help / --version
        help << app.help();
        err << help.str();
        return kOk;
      }
      throw Error(errkind::kUsage, e.what());
    }

    if (*check) {
      MachineDescription m = detail::load_machine(machine_path);
      ConfigurationSpace space(m, detail::parse_windows(windows_csv, m.tape_count()));
      OracleSet oracle;
      if (!oracle_path.empty()) oracle = detail::load_oracle(oracle_path);
      if (!oracle_csv.empty()) oracle = detail::parse_oracle_members(oracle_csv);
      WellFormedReport r = well_formed_report(m, space, oracle);
      result["unitLength"] = detail::check_report_json(r.unit_length);
      result["orthogonality"] = detail::check_report_json(r.orthogonality);
      result["separability"] = detail::check_report_json(r.separability);
      result["globalUnitarity"] = detail::check_report_json(r.global_unitarity);
      result["locallyWellFormed"] = r.locally_well_formed;
      result["globallyUnitary"] = r.globally_unitary;
      bool ok = r.locally_well_formed && r.globally_unitary;
      result["wellFormed"] = ok;
      summary = std::string("well-formed: ") + (ok ? "yes" : "no");
      if (!ok) exit_code = kCheckFailed;
    } else if (*runcmd) {
      MachineDescription m = detail::load_machine(machine_path);
      ConfigurationSpace space(m, detail::parse_windows(windows_csv, m.tape_count()));
      OracleSet oracle;
      if (!oracle_path.empty()) oracle = detail::load_oracle(oracle_path);
      if (!oracle_csv.empty()) oracle = detail::parse_oracle_members(oracle_csv);
      EvolutionOperator u(m, space, oracle);
      RunResult r = run(u, encode_input(space, input_x), steps);
      result["input"] = input_x;
      result["steps"] = r.steps;
      result["halted"] = r.halted;
      result["acceptProbability"] = r.accept_probability;
      result["finalNorm"] = norm2(r.final_state);
      summary = "acceptance " + std::to_string(r.accept_probability);
    } else if (*solve) {
      OptProblem prob = detail::load_problem(problem_path);
      SolveResult sol = solve_opt_full(prob, input_x);
      SamplingReport sampling = sampling_lower_bound(prob, input_x, samples, seed, &sol.matrix);
      result["input"] = input_x;
      result["indexSize"] = prob.index_size();
      result["lambdaMax"] = sol.lambda_max;
      result["eigenvector"] = detail::qustring_json(sol.eigenvector);
      result["residuals"] = Json{{"invariants", sol.matrix.residual},
                                 {"eigenpair", sol.matrix.eigen_residual},
                                 {"rayleighGap", sol.rayleigh_gap}};
      result["samplingLowerBound"] = sampling.max_acceptance;
      result["samplingRefined"] = sampling.refined_max;
      result["samples"] = sampling.samples;
      result["seed"] = seed;
      summary = "lambdaMax " + std::to_string(sol.lambda_max);
    } else if (*construct) {
      OptProblem f = detail::load_problem(problem_path);
      result["op"] = op_name;
      result["input"] = input_x;
      if (op_name == "max") {
        OptProblem g = max_over_classical(f, classical_bits);
        double constructed = solve_opt(g, input_x);
        double analytic = analytic_max_value(f, input_x, classical_bits);
        result["constructedIndexSize"] = g.index_size();
        result["constructedValue"] = constructed;
        result["analyticValue"] = analytic;
        result["gap"] = std::abs(constructed - analytic);
      } else if (op_name == "convex") {
        QubitSource src{detail::load_machine(machine_path), qubits, {}};
        src.rule.windows = detail::parse_windows(windows_csv, src.generator.tape_count());
        OptProblem g = convex_combine(f, src);
        double constructed = solve_opt(g, input_x);
        double analytic = analytic_convex_value(f, src, input_x);
        result["constructedIndexSize"] = g.index_size();
        result["constructedValue"] = constructed;
        result["analyticValue"] = analytic;
        result["gap"] = std::abs(constructed - analytic);
      } else if (op_name == "product") {
        OptProblem g = product_over_all(f, classical_bits);
        double constructed = solve_opt(g, input_x);
        double analytic = analytic_product_value(f, input_x, classical_bits);
        result["constructedIndexSize"] = g.index_size();
        result["constructedValue"] = constructed;
        result["analyticValue"] = analytic;
        result["gap"] = std::abs(constructed - analytic);
      } else if (op_name == "power" || op_name == "square") {
        OptProblem g = op_name == "square" ? square_problem(f) : power_problem(f, exponent);
        int m = op_name == "square" ? 2 : exponent;
        double constructed = solve_opt(g, input_x);
        double analytic = std::pow(solve_opt(f, input_x), m);
        result["exponent"] = m;
        result["constructedIndexSize"] = g.index_size();
        result["constructedValue"] = constructed;
        result["analyticValue"] = analytic;
        result["gap"] = std::abs(constructed - analytic);
      } else if (op_name == "compose") {
        std::function<std::string(const std::string&)> k;
        if (map_name == "identity") {
          k = [](const std::string& s) { return s; };
        } else if (map_name == "flip") {
          k = [](const std::string& s) {
            std::string o = s;
            for (char& c : o) c = c == '0' ? '1' : (c == '1' ? '0' : c);
            return o;
          };
        } else if (map_name.rfind("const:", 0) == 0) {
          std::string c = map_name.substr(6);
          k = [c](const std::string&) { return c; };
        } else {
          throw Error(errkind::kUsage, "unknown map " + map_name);
        }
        OptProblem g = compose_with_fp(f, k);
        double constructed = solve_opt(g, input_x);
        double analytic = solve_opt(f, k(input_x));
        result["map"] = map_name;
        result["constructedValue"] = constructed;
        result["analyticValue"] = analytic;
        result["gap"] = std::abs(constructed - analytic);
      } else if (op_name == "tensor") {
        TensorIndexReport r = tensor_index_value(f, input_x, split, samples, seed);
        result["split"] = split;
        result["value"] = r.value;
        result["converged"] = r.converged;
        result["sweeps"] = r.sweeps;
        result["sampleMax"] = r.sample_max;
        result["lambdaMax"] = r.lambda_max;
        result["seed"] = seed;
        if (!r.converged) exit_code = kCheckFailed;
      } else if (op_name == "sandwich") {
        SandwichReport r = averaging_sandwich(f, input_x, exponent);
        result["exponent"] = exponent;
        result["average"] = r.average;
        result["powered"] = r.powered;
        result["scale"] = r.scale;
        result["lowerMargin"] = r.lower_margin;
        result["upperMargin"] = r.upper_margin;
        result["holds"] = r.holds;
      }
      summary = "construct " + op_name;
    } else if (*qap) {
      MachineDescription m = detail::load_machine(machine_path);
      ApproxEvalResult r =
          eval_qap(m, input_x, steps, accuracy, detail::parse_windows(windows_csv, m.tape_count()));
      result["value"] = r.value;
      result["bits"] = r.bits;
      result["errorBound"] = r.error_bound;
      result["wellFormed"] = r.well_formed;
      result["accuracy"] = accuracy;
      summary = "qap " + std::to_string(r.value);
    } else if (*maxqtm) {
      MachineDescription m = detail::load_machine(machine_path);
      int p = index_size >= 0 ? index_size : int(input_x.size());
      ApproxEvalResult r =
          eval_maxqtm(m, input_x, steps, accuracy, p, detail::parse_windows(windows_csv, m.tape_count()));
      result["value"] = r.value;
      result["bits"] = r.bits;
      result["errorBound"] = r.error_bound;
      result["wellFormed"] = r.well_formed;
      result["indexSize"] = p;
      result["accuracy"] = accuracy;
      summary = "maxqtm " + std::to_string(r.value);
    } else if (*qop_pred) {
      Json spec = Json::parse(detail::read_file(spec_path));
      auto resolve = [&](const Json& j) {
        std::string p = j.get<std::string>();
        if (!p.empty() && p[0] != '/') p = detail::dirname(spec_path) + "/" + p;
        return detail::load_problem(p);
      };
      OptProblem f = resolve(spec.at("f"));
      OptProblem g = resolve(spec.at("g"));
      int b = spec.at("selectorBits").get<int>();
      double fv = solve_opt(f, input_x);
      double gv = solve_opt(g, input_x);
      QopVerdict v = eval_qop_predicate_values(fv, gv, b);
      result["fValue"] = fv;
      result["gValue"] = gv;
      result["selectorBits"] = b;
      result["fFloor"] = v.f_floor;
      result["gFloor"] = v.g_floor;
      result["holds"] = v.holds;
      result["boundaryFlagged"] = v.boundary_flagged;
      if (v.boundary_flagged) exit_code = kCheckFailed;
      summary = std::string("qop predicate ") + (v.holds ? "holds" : "fails");
    } else if (*search) {
      OptProblem prob = detail::load_problem(problem_path);
      double value = solve_opt(prob, input_x);
      BinarySearchResult r = binary_search_value(
          [&](DyadicValue threshold) { return value >= threshold.value(); }, bits, verify);
      result["input"] = input_x;
      result["bits"] = bits;
      result["value"] = Json{{"numerator", r.value.numerator},
                             {"bits", r.value.bits},
                             {"value", r.value.value()}};
      result["oracleCalls"] = r.oracle_calls;
      result["solvedValue"] = value;
      summary = "search " + std::to_string(r.value.value());
    } else if (*regen) {
      auto corpus = fixture_corpus();
      std::string dir = out_dir;
      if (dir.empty()) {
        const char* env = std::getenv(kCorpusEnv);
        dir = env != nullptr ? env : "fixtures";
      }
      Json manifest;
      manifest["version"] = kVersion;
      Json entries = Json::array();
      bool drift = false;
      for (const auto& r : corpus) {
        Json doc = emit_machine(r.machine);
        std::string text = doc.dump(2) + "\n";
        std::string path = dir + "/" + r.name + ".json";
        if (check_mode) {
          std::string existing = detail::read_file(path);
          if (existing != text) drift = true;
        } else {
          std::ofstream of(path);
          of << text;
        }
        Json entry;
        entry["name"] = r.name;
        entry["file"] = r.name + ".json";
        entry["windows"] = r.windows;
        entry["haltSteps"] = r.halt_steps;
        entry["indexSize"] = r.index_size;
        entry["expectWellFormed"] = r.expect_well_formed;
        Json refs = Json::array();
        for (const auto& v : r.references) {
          double regen_value = regenerate_reference(r, v);
          if (std::abs(regen_value - v.value) > 1e-9) drift = true;
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.12g", v.value);
          refs.push_back(Json{{"quantity", v.quantity},
                              {"input", v.input},
                              {"oracleMembers", v.oracle_members},
                              {"steps", v.steps},
                              {"value", Json::parse(buf)},
                              {"provenance", v.provenance},
                              {"command", v.command}});
        }
        entry["references"] = refs;
        entries.push_back(entry);
        if (r.is_witness()) {
          Json pj;
          pj["machine"] = r.name + ".json";
          pj["indexSize"] = r.index_size;
          pj["inputRule"] = Json{{"windows", r.windows}, {"haltSteps", r.halt_steps}};
          std::string ptext = pj.dump(2) + "\n";
          std::string ppath = dir + "/" + r.name + ".problem.json";
          if (check_mode) {
            if (detail::read_file(ppath) != ptext) drift = true;
          } else {
            std::ofstream of(ppath);
            of << ptext;
          }
        }
      }
      manifest["fixtures"] = entries;
      std::string mtext = manifest.dump(2) + "\n";
      if (check_mode) {
        if (detail::read_file(dir + "/manifest.json") != mtext) drift = true;
      } else {
        std::ofstream of(dir + "/manifest.json");
        of << mtext;
      }
      result["fixtures"] = int(corpus.size());
      result["directory"] = dir;
      result["mode"] = check_mode ? "check" : "write";
      result["clean"] = !drift;
      if (drift) exit_code = kCheckFailed;
      summary = check_mode ? (drift ? "corpus drift detected" : "corpus clean") : "corpus written";
    }
  } catch (const Error& e) {
    result = Json{{"error", Json{{"kind", e.kind}, {"message", e.what()}}}};
    out << result.dump(2) << "\n";
    err << "error (" << e.kind << "): " << e.what() << "\n";
    return e.kind == std::string(errkind::kUsage) ? kUsage : kCheckFailed;
  }

  out << result.dump(2) << "\n";

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - started)
                     .count();
  Json manifest;
  manifest["command"] = args.empty() ? "" : args[0];
  manifest["arguments"] = args;
  manifest["seed"] = seed;
  manifest["toolVersion"] = kVersion;
  manifest["wallTimeMs"] = elapsed;
  manifest["exit"] = exit_code;
  err << summary << "\n" << manifest.dump() << "\n";
  return exit_code;
}

}  // namespace qtm::cli
