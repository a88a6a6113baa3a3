#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qpa/error.hpp"
#include "qpa/experiment.hpp"

using namespace qpa;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qpa_test_experiment_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_fig1() {
  auto cfg = preset_config("fig1");
  cfg.pairs = 20'000;
  cfg.rounds = 4;
  return cfg;
}

}  // namespace

TEST_CASE("trajectory columns") {
  const auto cols = trajectory_columns(false);
  REQUIRE(cols.size() == 20);
  CHECK(cols[0] == "round");
  CHECK(cols[1] == "F");
  CHECK(cols[2] == "F_cond");
  CHECK(cols[3] == "keep_prob");
  CHECK(cols[4] == "A00");
  CHECK(cols[7] == "A11");
  CHECK(cols[8] == "B00");
  CHECK(cols[19] == "D11");
  CHECK(trajectory_columns(true).back() == "sample_stddev_F");
}

TEST_CASE("iterate writes a csv table with a metadata sidecar") {
  const auto dir = fresh_dir("iterate");
  const auto summary = run_iterate(preset_config("fig1"), {dir, true});
  const auto csv = slurp(dir / "trajectory.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("round,F,F_cond,keep_prob,A00", 0) == 0);
  int rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  CHECK(rows == 11);

  const auto meta = nlohmann::json::parse(slurp(dir / "trajectory.meta.json"));
  CHECK(meta["command"] == "iterate");
  CHECK(meta["config"]["preset"] == "fig1");
  CHECK_FALSE(meta.contains("timestamp"));
  CHECK(summary["convergence"]["rounds"] == 10);
}

TEST_CASE("json format embeds the configuration") {
  const auto dir = fresh_dir("json");
  auto cfg = small_fig1();
  cfg.format = OutputFormat::Json;
  run_mc(cfg, {dir, false});
  const auto doc = nlohmann::json::parse(slurp(dir / "mc_trajectory.json"));
  CHECK(doc["metadata"]["config"]["pairs"] == 20'000);
  CHECK(doc["metadata"].contains("timestamp"));
  CHECK(doc["rows"].size() == 5);
}

TEST_CASE("deterministic runs are byte identical") {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  run_mc(small_fig1(), {a, true});
  run_mc(small_fig1(), {b, true});
  CHECK(slurp(a / "mc_trajectory.csv") == slurp(b / "mc_trajectory.csv"));
  CHECK(slurp(a / "mc_trajectory.meta.json") == slurp(b / "mc_trajectory.meta.json"));
}

TEST_CASE("two pairs halt after one round") {
  const auto dir = fresh_dir("halt");
  auto cfg = small_fig1();
  cfg.pairs = 2;
  const auto s = run_mc(cfg, {dir, true});
  CHECK(s["halted"] == true);
  CHECK(s["rounds"] == 1);
}

TEST_CASE("scan without a threshold still writes its report") {
  const auto dir = fresh_dir("scan");
  auto cfg = preset_config("thresholds");
  cfg.scan.lo = 0.99;
  cfg.scan.hi = 1.0;
  cfg.scan.werner_grid = {};
  try {
    run_scan(cfg, {dir, true});
    FAIL("expected NoThreshold");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoThreshold);
  }
  const auto doc = nlohmann::json::parse(slurp(dir / "scan.json"));
  CHECK(doc["report"]["no_threshold"] == true);
}

TEST_CASE("verify with fixture tables") {
  const auto dir = fresh_dir("verify");
  CHECK(run_verify(std::nullopt, {dir, true})["passed"] == true);
  const std::string fixture = slurp(fs::path(QPA_TEST_FIXTURES) / "mutated_flag_table.json");
  try {
    run_verify(fixture, {dir, true});
    FAIL("expected a verification failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Verification);
    CHECK(std::string(e.what()).find("(row") != std::string::npos);
  }
  CHECK(nlohmann::json::parse(slurp(dir / "verify.json"))["passed"] == false);
}

TEST_CASE("uniform-residual family has its own thresholds") {
  const auto dir = fresh_dir("scan_uniform");
  auto cfg = preset_config("thresholds");
  cfg.scan.family = NoiseFamily::Uniform;
  cfg.scan.lo = 0.80;
  cfg.scan.hi = 0.95;
  cfg.scan.grid_points = 0;
  cfg.scan.werner_grid = {};
  const auto s = run_scan(cfg, {dir, true});
  CHECK(s["report"]["f_purify"].get<double>() == doctest::Approx(0.8729).epsilon(2e-4));
  CHECK(s["report"]["f_secure"].get<double>() > s["report"]["f_purify"].get<double>());
}

TEST_CASE("threshold preset writes a regime table") {
  const auto dir = fresh_dir("scan_points");
  auto cfg = preset_config("thresholds");
  cfg.scan.werner_grid = {};
  const auto s = run_scan(cfg, {dir, true});
  CHECK(fs::exists(dir / "scan_points.csv"));
  const auto& points = s["report"]["points"];
  REQUIRE(points.size() == 9);
  CHECK(points[0]["regime"] == "NO_PURIFICATION");
  CHECK(points[8]["regime"] == "PURIFY_SECURE");
}
