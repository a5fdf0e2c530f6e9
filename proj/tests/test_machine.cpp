#include <catch2/catch_amalgamated.hpp>

#include "qtm/fixtures.hpp"
#include "qtm/machine.hpp"

using namespace qtm;

namespace {

const char* kMinimalDoc = R"({
  "states": ["q0", "qf"],
  "initial": "q0",
  "finals": ["qf"],
  "tapes": [{"sigma": ["0", "1"], "gamma": ["_", "0", "1"], "blank": "_"}],
  "delta": [
    {"from": ["q0", ["_"]], "to": ["qf", ["1"], ["N"]], "amp": {"re": 1.0, "im": 0.0}},
    {"from": ["q0", ["1"]], "to": ["qf", ["0"], ["N"]], "amp": {"re": 1.0, "im": 0.0}},
    {"from": ["q0", ["0"]], "to": ["qf", ["_"], ["N"]], "amp": {"re": 1.0, "im": 0.0}}
  ],
  "flags": {"normalForm": true, "stationary": true, "oracle": false}
})";

}  // namespace

TEST_CASE("minimal always-accept document parses") {
  MachineDescription m = parse_machine(std::string(kMinimalDoc));
  CHECK(m.state_count() == 2);
  CHECK(m.tape_count() == 1);
  CHECK(m.finals.size() == 1);
  CHECK(m.flags.normal_form);
}

TEST_CASE("missing delta row is a validation error") {
  Json doc = Json::parse(kMinimalDoc);
  doc["delta"].erase(1);
  try {
    parse_machine(doc);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind == errkind::kValidation);
    CHECK(std::string(e.what()).find("no row") != std::string::npos);
  }
}

TEST_CASE("syntax and reference errors carry a locus") {
  CHECK_THROWS_AS(parse_machine(std::string("{ not json")), Error);
  Json doc = Json::parse(kMinimalDoc);
  doc["delta"][0]["to"][0] = "nowhere";
  try {
    parse_machine(doc);
    FAIL("expected undeclared-state error");
  } catch (const Error& e) {
    CHECK(e.kind == errkind::kValidation);
    CHECK(std::string(e.what()).find("delta[0]") != std::string::npos);
  }
  doc = Json::parse(kMinimalDoc);
  doc["delta"][0]["to"][1][0] = "x";
  try {
    parse_machine(doc);
    FAIL("expected undeclared-symbol error");
  } catch (const Error& e) {
    CHECK(e.kind == errkind::kValidation);
    CHECK(std::string(e.what()).find("undeclared symbol") != std::string::npos);
  }
}

TEST_CASE("coin-flip fixture carries the balanced rows") {
  MachineDescription m = fixtures::coin_flip();
  const auto& row = m.row(0, {m.tapes[0].blank_index()});
  REQUIRE(row.size() == 2);
  for (const auto& t : row) CHECK(std::abs(std::abs(t.amp.real()) - kInvSqrt2) < 1e-15);
}

TEST_CASE("parse-emit round trip is the identity on the corpus") {
  for (const auto& r : fixture_corpus()) {
    Json doc = emit_machine(r.machine);
    MachineDescription back = parse_machine(doc);
    CHECK(machines_equal(back, r.machine));
    CHECK(emit_machine(back) == doc);  // canonical emission is stable
  }
}

TEST_CASE("final-state rows are rejected under normal form") {
  Json doc = Json::parse(kMinimalDoc);
  doc["delta"].push_back(Json::parse(
      R"({"from": ["qf", ["_"]], "to": ["q0", ["_"], ["N"]], "amp": {"re": 1.0, "im": 0.0}})"));
  CHECK_THROWS_AS(parse_machine(doc), Error);
}

TEST_CASE("oracle machines declare their query states") {
  MachineDescription m = fixtures::oracle_member();
  CHECK(m.flags.oracle);
  CHECK(m.pre_query >= 0);
  CHECK(m.post_query >= 0);
  Json doc = emit_machine(m);
  CHECK(doc.contains("oracleStates"));
  CHECK(machines_equal(parse_machine(doc), m));
}
