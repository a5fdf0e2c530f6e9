#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qtm/cli.hpp"

using namespace qtm;

namespace {

struct CliRun {
  int exit;
  std::string out;
  std::string err;
};

CliRun invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("check reports well-formedness with the exit-code contract") {
  CliRun good = invoke({"check", "fixtures/coin_flip.json", "--windows", "5"});
  CHECK(good.exit == 0);
  Json j = Json::parse(good.out);
  CHECK(j["wellFormed"] == true);
  CHECK(j["unitLength"]["pass"] == true);

  CliRun bad = invoke({"check", "fixtures/bad_separability.json", "--windows", "5"});
  CHECK(bad.exit == 1);
  Json jb = Json::parse(bad.out);
  CHECK(jb["separability"]["pass"] == false);
  CHECK(jb["unitLength"]["pass"] == true);
  CHECK(jb["globalUnitarity"]["pass"] == false);
}

TEST_CASE("run emits the acceptance record") {
  CliRun r = invoke({"run", "fixtures/coin_flip.json", "--input", "", "--steps", "1", "--windows", "5"});
  REQUIRE(r.exit == 0);
  Json j = Json::parse(r.out);
  CHECK(j["halted"] == true);
  CHECK(j["acceptProbability"].get<double>() == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("solve emits the eigenvalue with residuals and the sampling bound") {
  CliRun r = invoke({"qopt", "solve", "fixtures/projector_p1.problem.json", "--input", "0",
                     "--samples", "500", "--seed", "9"});
  REQUIRE(r.exit == 0);
  Json j = Json::parse(r.out);
  CHECK(j["lambdaMax"].get<double>() == Catch::Approx(1.0));
  CHECK(j["samplingLowerBound"].get<double>() <= 1.0 + 1e-9);
  CHECK(j["residuals"]["eigenpair"].get<double>() <= 1e-8);
}

TEST_CASE("reruns with the same seed are byte-identical") {
  std::vector<std::vector<std::string>> invocations = {
      {"qopt", "solve", "fixtures/const_q64.problem.json", "--input", "0", "--samples", "200", "--seed",
       "71"},
      {"construct", "tensor", "fixtures/bell_p2.problem.json", "--input", "0", "--split", "1",
       "--samples", "100", "--seed", "3"},
      {"check", "fixtures/coin_flip.json", "--windows", "5"},
      {"maxqtm", "fixtures/const_third.json", "--x", "0", "-t", "3", "-m", "8", "--index-size", "1",
       "--windows", "5"},
  };
  for (const auto& args : invocations) {
    CliRun first = invoke(args);
    CliRun second = invoke(args);
    INFO(args[0]);
    REQUIRE(first.exit == second.exit);
    REQUIRE(first.out == second.out);
  }
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(invoke({"frobnicate"}).exit == 2);
  CHECK(invoke({"run", "fixtures/coin_flip.json"}).exit == 2);  // missing --steps
  CHECK(invoke({"check", "no/such/file.json"}).exit == 2);
}

TEST_CASE("construct subcommands emit verification records") {
  CliRun r = invoke({"construct", "product", "fixtures/four_point.problem.json", "--input", "",
                     "--bits", "2"});
  REQUIRE(r.exit == 0);
  Json j = Json::parse(r.out);
  CHECK(j["constructedValue"].get<double>() == Catch::Approx(0.3024).margin(1e-6));
  CHECK(j["gap"].get<double>() <= 1e-6);

  CliRun s = invoke({"construct", "sandwich", "fixtures/const_q25.problem.json", "--input", "0",
                     "--exponent", "3"});
  REQUIRE(s.exit == 0);
  CHECK(Json::parse(s.out)["holds"] == true);
}

TEST_CASE("search extracts the dyadic floor of the solved value") {
  CliRun r = invoke({"decide", "search", "--problem", "fixtures/const_q64.problem.json", "--input",
                     "0", "--bits", "10"});
  REQUIRE(r.exit == 0);
  Json j = Json::parse(r.out);
  CHECK(j["value"]["numerator"].get<int>() == 655);  // floor(1024 * 0.64)
  CHECK(j["oracleCalls"].get<int>() == 10);
}

TEST_CASE("the manifest lands on standard error, never on standard output") {
  CliRun r = invoke({"run", "fixtures/coin_flip.json", "--input", "", "--steps", "1", "--windows", "5"});
  CHECK(r.out.find("wallTimeMs") == std::string::npos);
  CHECK(r.err.find("wallTimeMs") != std::string::npos);
  CHECK(r.err.find("toolVersion") != std::string::npos);
}

TEST_CASE("corpus check mode detects cleanliness") {
  CliRun r = invoke({"fixtures", "regen", "--check"});
  REQUIRE(r.exit == 0);
  CHECK(Json::parse(r.out)["clean"] == true);
}
