#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qtm/fixtures.hpp"

using namespace qtm;

namespace {

std::string corpus_dir() {
  const char* env = std::getenv("QTMLAB_CORPUS");
  return env != nullptr ? env : "fixtures";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("the corpus covers the required machine shapes") {
  auto corpus = fixture_corpus();
  for (const char* name : {"identity", "always_accept", "coin_flip", "projector_p1",
                           "hadamard_sandwich_p1", "const_q25", "const_q36", "const_q64",
                           "two_tape_stash", "oracle_member", "bad_separability", "bell_p2"})
    CHECK_NOTHROW(find_fixture(corpus, name));
  CHECK_THROWS_AS(find_fixture(corpus, "missing"), Error);
}

TEST_CASE("every fixture matches its well-formedness expectation") {
  for (const auto& r : fixture_corpus()) {
    INFO(r.name);
    CHECK(locally_well_formed(r.machine) == r.expect_well_formed);
  }
}

TEST_CASE("a fresh regeneration matches every stored value") {
  RegenReport rep = regenerate(fixture_corpus());
  CHECK(rep.passed);
  for (const auto& line : rep.lines) {
    INFO(line.fixture << " " << line.quantity << " " << line.input);
    CHECK(line.ok);
    CHECK(std::abs(line.stored - line.regenerated) <= 1e-9);
  }
}

TEST_CASE("a perturbed stored value is reported as drift") {
  auto corpus = fixture_corpus();
  for (auto& r : corpus) {
    if (r.references.empty()) continue;
    r.references[0].value += 1e-5;
    break;
  }
  RegenReport rep = regenerate(corpus);
  CHECK_FALSE(rep.passed);
  int bad = 0;
  for (const auto& line : rep.lines) bad += !line.ok;
  CHECK(bad == 1);
}

TEST_CASE("the shipped corpus files match the builders") {
  auto corpus = fixture_corpus();
  for (const auto& r : corpus) {
    std::string text = slurp(corpus_dir() + "/" + r.name + ".json");
    MachineDescription disk = parse_machine(text);
    INFO(r.name);
    CHECK(machines_equal(disk, r.machine));
    CHECK(emit_machine(r.machine).dump(2) + "\n" == text);
  }
}

TEST_CASE("the builder rejects malformed authoring") {
  SECTION("duplicate rows") {
    MachineBuilder b({"_1"});
    b.state("q0", "N").initial("q0");
    b.map("q0", "_", "q0", "_");
    b.map("q0", "_", "q0", "1");
    CHECK_THROWS_AS(b.build(), Error);
  }
  SECTION("initial state must be entered without movement under normal form") {
    MachineBuilder b({"_1"});
    b.state("q0", "R").state("qf", "N");
    b.initial("q0").final_state("qf");
    b.map("q0", "_", "qf", "1").map("q0", "1", "qf", "_");
    CHECK_THROWS_AS(b.build(), Error);
  }
  SECTION("symbols must belong to the alphabet") {
    MachineBuilder b({"_1"});
    b.state("q0", "N").initial("q0");
    CHECK_THROWS_AS(b.map("q0", "x", "q0", "_"), Error);
  }
}

TEST_CASE("builder completions keep tables orthonormal") {
  // a sparse authored machine leaves many rows to the completion pass
  MachineBuilder b({"_01"});
  b.state("q0", "N").state("mid", "R").state("qf", "N");
  b.initial("q0").final_state("qf").stationary(false);
  b.map("q0", "_", "mid", "1");
  MachineDescription m = b.build();
  CHECK(locally_well_formed(m));
}
