#include "doctest.h"
#include "qpa/error.hpp"
#include "qpa/verify.hpp"

using namespace qpa;

namespace {

const VerifyCheck* find(const VerifyReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("library tables pass every check") {
  const auto r = run_verification();
  CHECK(r.passed());
  CHECK(r.checks.size() == 8);
  for (const auto& c : r.checks) {
    CAPTURE(c.name);
    CHECK(c.passed);
  }
  CHECK(r.to_json()["passed"] == true);
}

TEST_CASE("a mutated flag-table entry is named") {
  auto t = ProtocolTables::from_json(nlohmann::json::parse(
      R"({"flag_table": [["00","00","00","10"],["00","01","11","00"],["00","01","01","00"],["10","00","00","00"]]})"));
  VerifyOptions fast;
  fast.random_instances = 2;
  const auto r = run_verification(t, fast);
  CHECK_FALSE(r.passed());
  const auto* c = find(r, "flag_table_published");
  REQUIRE(c);
  CHECK_FALSE(c->passed);
  CHECK(c->detail.find("(row 10, column 01)") != std::string::npos);
}

TEST_CASE("a swapped bcnot entry fails the bijection check") {
  auto t = ProtocolTables::library();
  t.bcnot[1] = t.bcnot[0];
  VerifyOptions fast;
  fast.random_instances = 2;
  const auto r = run_verification(t, fast);
  const auto* c = find(r, "bcnot_bijection");
  REQUIRE(c);
  CHECK_FALSE(c->passed);
  CHECK_FALSE(find(r, "bcnot_vs_oracle")->passed);
}

TEST_CASE("a wrong rotation entry is caught") {
  auto t = ProtocolTables::library();
  t.rotation[2] = kPhiMinus;
  VerifyOptions fast;
  fast.random_instances = 2;
  const auto r = run_verification(t, fast);
  CHECK_FALSE(find(r, "rotation_vs_oracle")->passed);
}

TEST_CASE("malformed table documents") {
  CHECK_THROWS_AS(ProtocolTables::from_json(nlohmann::json::parse(R"({"flag_table": [["00"]]})")), Error);
  CHECK_THROWS_AS(ProtocolTables::from_json(nlohmann::json::parse(R"({"bogus": 1})")), Error);
  CHECK_THROWS_AS(ProtocolTables::from_json(nlohmann::json::parse(R"({"rotation": ["00","01","12","11"]})")), Error);
}
