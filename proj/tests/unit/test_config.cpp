#include "doctest.h"
#include "qpa/error.hpp"
#include "qpa/experiment.hpp"

using namespace qpa;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  FAIL("expected a configuration error");
  return {};
}

}  // namespace

TEST_CASE("presets") {
  const auto fig1 = preset_config("fig1");
  CHECK(fig1.noise.family() == NoiseFamily::Uniform);
  CHECK(fig1.noise.parameter() == 0.97);
  CHECK(fig1.initial_bell[0] == 0.85);
  CHECK(fig1.pairs == 10'000'000);
  CHECK(fig1.rounds == 10);
  CHECK(fig1.seed == 1);

  const auto th = preset_config("thresholds");
  CHECK(th.scan.family == NoiseFamily::OneSided);
  CHECK(th.scan.lo == 0.88);
  CHECK(th.scan.hi == 0.92);

  CHECK_THROWS_AS(preset_config("nope"), Error);
  CHECK(preset_names().size() == 2);
}

TEST_CASE("full document") {
  const auto cfg = parse_config(R"({
    "noise": {"family": "product", "f0": 0.95},
    "initial_state": {"werner": 0.8, "flag_mode": "random"},
    "placement": "before_bcnot",
    "rounds": 7,
    "pairs": 5000,
    "seed": 12345678901234,
    "chunks": 4,
    "format": "json",
    "scan": {"family": "uniform", "range": [0.8, 0.99], "werner_grid": [0.9], "max_rounds": 1000}
  })",
                                "cfg.json");
  CHECK(cfg.noise.family() == NoiseFamily::Product);
  CHECK(cfg.initial_bell[0] == 0.8);
  CHECK(cfg.flag_mode == FlagMode::Random);
  CHECK(cfg.placement == NoisePlacement::BeforeBcnot);
  CHECK(cfg.rounds == 7);
  CHECK(cfg.pairs == 5000);
  CHECK(cfg.seed == 12345678901234ull);
  CHECK(cfg.chunks == 4);
  CHECK(cfg.format == OutputFormat::Json);
  CHECK(cfg.scan.family == NoiseFamily::Uniform);
  CHECK(cfg.scan.hi == 0.99);
  CHECK(cfg.scan.werner_grid == std::vector<double>{0.9});
  CHECK(cfg.scan.regime.max_rounds == 1000);
}

TEST_CASE("preset inside a document, then overrides") {
  const auto cfg = parse_config(R"({"preset": "fig1", "pairs": 1000})", "cfg.json");
  CHECK(cfg.preset == "fig1");
  CHECK(cfg.pairs == 1000);
  CHECK(cfg.noise.parameter() == 0.97);
}

TEST_CASE("emitted configuration parses back to itself") {
  const auto cfg = preset_config("fig1");
  const auto again = parse_config(cfg.to_json().dump(), "roundtrip");
  CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("errors carry line and column") {
  CHECK(config_error("{\n  \"rounds\": 3,\n  \"pairs\": ,\n}").rfind("cfg.json:3:", 0) == 0);
  CHECK(config_error("{\n  \"rounds\": 3,\n  \"colour\": 1\n}").rfind("cfg.json:3:3: unknown key 'colour'", 0) == 0);
  CHECK(config_error("{\n\"initial_state\": {\n  \"werner\": 1.5}}").rfind("cfg.json:3:3:", 0) == 0);
  CHECK(config_error("{\"noise\": {\"family\": \"product\"}}").find("requires key 'f0'") != std::string::npos);
  CHECK(config_error("{\"pairs\": 1}").find("at least 2") != std::string::npos);
  CHECK(config_error("{\"rounds\": -1}").find("nonnegative integer") != std::string::npos);
  CHECK(config_error("[1, 2]").find("JSON object") != std::string::npos);
  CHECK(config_error("{\"scan\": {\"range\": [0.9, 0.8]}}").find("lo < hi") != std::string::npos);
  CHECK(config_error("{\"format\": \"xml\"}").find("csv") != std::string::npos);
  CHECK(config_error("{\"preset\": \"fig9\"}").find("unknown preset") != std::string::npos);
}
