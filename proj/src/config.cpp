#include <algorithm>
#include <cmath>
#include <sstream>

#include "qpa/error.hpp"
#include "qpa/experiment.hpp"
#include "qpa/noise_json.hpp"

namespace qpa {
namespace {

using nlohmann::json;

/// Maps byte offsets and key names back to "line:column" in the source text.
class Locator {
 public:
  Locator(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  std::string at_offset(std::size_t offset) const {
    offset = std::min(offset, text_.size());
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < offset; ++k) {
      if (text_[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream out;
    out << source_ << ":" << line << ":" << col << ": ";
    return out.str();
  }

  /// Position of the quoted key, searched after its parent key when given.
  std::string at_key(std::string_view key, std::string_view parent = {}) const {
    std::size_t from = 0;
    if (!parent.empty()) {
      const auto p = text_.find("\"" + std::string(parent) + "\"");
      if (p != std::string_view::npos) from = p;
    }
    const auto pos = text_.find("\"" + std::string(key) + "\"", from);
    return at_offset(pos == std::string_view::npos ? 0 : pos);
  }

 private:
  std::string_view text_;
  std::string_view source_;
};

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  fail(ErrorCode::Config, where + what);
}

double number(const json& v, const std::string& where, const std::string& key) {
  if (!v.is_number()) config_error(where, "'" + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t count(const json& v, const std::string& where, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    config_error(where, "'" + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string text(const json& v, const std::string& where, const std::string& key) {
  if (!v.is_string()) config_error(where, "'" + key + "' must be a string");
  return v.get<std::string>();
}

void apply_initial_state(const json& doc, const Locator& loc, ExperimentConfig& cfg) {
  const std::string here = loc.at_key("initial_state");
  if (!doc.is_object()) config_error(here, "'initial_state' must be an object");
  if (doc.contains("bell") && doc.contains("werner")) {
    config_error(here, "'initial_state' takes either 'bell' or 'werner', not both");
  }
  for (const auto& [key, value] : doc.items()) {
    const std::string where = loc.at_key(key, "initial_state");
    if (key == "bell") {
      if (!value.is_array() || value.size() != 4) config_error(where, "'bell' must be an array of 4 probabilities");
      double sum = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        cfg.initial_bell[k] = number(value[k], where, "bell");
        if (cfg.initial_bell[k] < 0.0) config_error(where, "'bell' entries must be nonnegative");
        sum += cfg.initial_bell[k];
      }
      if (std::abs(sum - 1.0) > 1e-12) config_error(where, "'bell' probabilities must sum to 1");
    } else if (key == "werner") {
      const double f = number(value, where, key);
      if (!(f >= 0.0 && f <= 1.0)) config_error(where, "'werner' must lie in [0, 1]");
      cfg.initial_bell = werner_bell(f);
    } else if (key == "flag_mode") {
      try {
        cfg.flag_mode = flag_mode_from_string(text(value, where, key));
      } catch (const Error& e) {
        config_error(where, e.what());
      }
    } else {
      config_error(where, "unknown key 'initial_state." + key + "'");
    }
  }
}

void apply_scan(const json& doc, const Locator& loc, ScanConfig& scan) {
  if (!doc.is_object()) config_error(loc.at_key("scan"), "'scan' must be an object");
  for (const auto& [key, value] : doc.items()) {
    const std::string where = loc.at_key(key, "scan");
    if (key == "family") {
      try {
        scan.family = noise_family_from_string(text(value, where, key));
      } catch (const Error& e) {
        config_error(where, e.what());
      }
      if (scan.family == NoiseFamily::Explicit) config_error(where, "scans need a parameterized family");
    } else if (key == "range") {
      if (!value.is_array() || value.size() != 2) config_error(where, "'range' must be [lo, hi]");
      scan.lo = number(value[0], where, key);
      scan.hi = number(value[1], where, key);
      if (!(scan.lo >= 0.0 && scan.hi <= 1.0 && scan.lo < scan.hi)) {
        config_error(where, "'range' must satisfy 0 <= lo < hi <= 1");
      }
    } else if (key == "bisect_tol") {
      scan.bisect_tol = number(value, where, key);
      if (!(scan.bisect_tol > 0.0)) config_error(where, "'bisect_tol' must be positive");
    } else if (key == "grid_points") {
      scan.grid_points = count(value, where, key);
    } else if (key == "werner_grid") {
      if (!value.is_array()) config_error(where, "'werner_grid' must be an array");
      scan.werner_grid.clear();
      for (const auto& v : value) {
        const double f = number(v, where, key);
        if (!(f >= 0.0 && f <= 1.0)) config_error(where, "'werner_grid' entries must lie in [0, 1]");
        scan.werner_grid.push_back(f);
      }
    } else if (key == "secure_tol") {
      scan.regime.secure_tol = number(value, where, key);
    } else if (key == "purify_fidelity") {
      scan.regime.purify_fidelity = number(value, where, key);
    } else if (key == "max_rounds") {
      scan.regime.max_rounds = count(value, where, key);
    } else if (key == "fixpoint_tol") {
      scan.regime.fixpoint_tol = number(value, where, key);
    } else {
      config_error(where, "unknown key 'scan." + key + "'");
    }
  }
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig1", "thresholds"}; }

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig cfg;
  if (name == "fig1") {
    cfg.preset = "fig1";
    cfg.noise = NoiseModel::uniform_residual(0.97);
    cfg.initial_bell = werner_bell(0.85);
    cfg.flag_mode = FlagMode::Fixed;
    cfg.seed = 1;
    cfg.pairs = 10'000'000;
    cfg.rounds = 10;
    return cfg;
  }
  if (name == "thresholds") {
    cfg.preset = "thresholds";
    cfg.noise = NoiseModel::one_sided_depolarizing(0.9);
    cfg.scan.family = NoiseFamily::OneSided;
    cfg.scan.lo = 0.88;
    cfg.scan.hi = 0.92;
    cfg.scan.grid_points = 9;
    return cfg;
  }
  fail(ErrorCode::Config, "unknown preset '" + std::string(name) + "'");
}

ExperimentConfig parse_config(std::string_view source_text, std::string_view source_name, ExperimentConfig base) {
  const Locator loc(source_text, source_name);
  json doc;
  try {
    doc = json::parse(source_text.begin(), source_text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    std::string what = e.what();
    const auto cut = what.find("syntax error");
    config_error(loc.at_offset(byte), cut == std::string::npos ? what : what.substr(cut));
  }
  if (!doc.is_object()) config_error(loc.at_offset(0), "configuration must be a JSON object");

  ExperimentConfig cfg = std::move(base);
  if (doc.contains("preset") && !doc["preset"].is_null()) {
    const std::string where = loc.at_key("preset");
    try {
      cfg = preset_config(text(doc["preset"], where, "preset"));
    } catch (const Error& e) {
      config_error(where, e.what());
    }
  }
  for (const auto& [key, value] : doc.items()) {
    const std::string where = loc.at_key(key);
    if (key == "preset") continue;
    if (key == "noise") {
      try {
        cfg.noise = noise_from_json(value);
      } catch (const Error& e) {
        config_error(where, e.what());
      }
    } else if (key == "initial_state") {
      apply_initial_state(value, loc, cfg);
    } else if (key == "placement") {
      try {
        cfg.placement = placement_from_string(text(value, where, key));
      } catch (const Error& e) {
        config_error(where, e.what());
      }
    } else if (key == "rounds") {
      cfg.rounds = count(value, where, key);
    } else if (key == "fixpoint_tol") {
      cfg.fixpoint_tol = number(value, where, key);
      if (!(cfg.fixpoint_tol > 0.0)) config_error(where, "'fixpoint_tol' must be positive");
    } else if (key == "pairs") {
      cfg.pairs = count(value, where, key);
      if (cfg.pairs < 2) config_error(where, "'pairs' must be at least 2");
    } else if (key == "seed") {
      cfg.seed = count(value, where, key);
    } else if (key == "chunks") {
      cfg.chunks = count(value, where, key);
      if (cfg.chunks < 1) config_error(where, "'chunks' must be at least 1");
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(count(value, where, key));
    } else if (key == "format") {
      const std::string f = text(value, where, key);
      if (f == "csv") cfg.format = OutputFormat::Csv;
      else if (f == "json") cfg.format = OutputFormat::Json;
      else config_error(where, "'format' must be \"csv\" or \"json\"");
    } else if (key == "scan") {
      apply_scan(value, loc, cfg.scan);
    } else {
      config_error(where, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  json doc;
  doc["preset"] = preset.empty() ? json(nullptr) : json(preset);
  doc["noise"] = noise_to_json(noise);
  doc["initial_state"] = {{"bell", std::vector<double>(initial_bell.begin(), initial_bell.end())},
                          {"flag_mode", to_string(flag_mode)}};
  doc["placement"] = to_string(placement);
  doc["rounds"] = rounds;
  doc["fixpoint_tol"] = fixpoint_tol;
  doc["pairs"] = pairs;
  doc["seed"] = seed;
  doc["chunks"] = chunks;
  doc["threads"] = threads;
  doc["format"] = format == OutputFormat::Csv ? "csv" : "json";
  doc["scan"] = {{"family", to_string(scan.family)},
                 {"range", {scan.lo, scan.hi}},
                 {"bisect_tol", scan.bisect_tol},
                 {"grid_points", scan.grid_points},
                 {"werner_grid", scan.werner_grid},
                 {"secure_tol", scan.regime.secure_tol},
                 {"purify_fidelity", scan.regime.purify_fidelity},
                 {"max_rounds", scan.regime.max_rounds},
                 {"fixpoint_tol", scan.regime.fixpoint_tol}};
  return doc;
}

}  // namespace qpa
