#include "qpa/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <future>
#include <sstream>

#include "qpa/error.hpp"
#include "qpa/monte_carlo.hpp"
#include "qpa/noise_json.hpp"
#include "qpa/verify.hpp"

namespace qpa {
namespace {

using nlohmann::json;

// Coefficient letters: A = Phi+, B = Psi-, C = Psi+, D = Phi-; digits = flag.
constexpr std::array<char, 4> kLetters{'A', 'B', 'C', 'D'};
constexpr std::array<unsigned, 4> kLetterBell{0, 3, 1, 2};

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> ordered_coefficients(const std::array<double, 16>& p) {
  std::vector<double> out;
  for (unsigned letter = 0; letter < 4; ++letter)
    for (unsigned flag = 0; flag < 4; ++flag) out.push_back(p[flag * 4 + kLetterBell[letter]]);
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json metadata(const std::string& command, const ExperimentConfig& config, const RunOptions& options) {
  json meta;
  meta["tool"] = "qpa";
  meta["version"] = version();
  meta["command"] = command;
  meta["config"] = config.to_json();
  const auto& f = config.noise.probabilities();
  meta["noise_probabilities"] = std::vector<double>(f.begin(), f.end());
  meta["deterministic"] = options.deterministic;
  if (!options.deterministic) meta["timestamp"] = utc_timestamp();
  return meta;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) fail(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

using Rows = std::vector<std::vector<double>>;

std::string to_csv(const std::vector<std::string>& columns, const Rows& rows) {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << "\n";
  }
  return out.str();
}

/// Writes `stem`.csv + `stem`.meta.json, or a single `stem`.json.
json write_table(const RunOptions& options, OutputFormat format, const std::string& stem,
                 const std::vector<std::string>& columns, const Rows& rows, json meta) {
  json files = json::array();
  if (format == OutputFormat::Csv) {
    const auto csv = options.out_dir / (stem + ".csv");
    const auto side = options.out_dir / (stem + ".meta.json");
    meta["data_file"] = stem + ".csv";
    meta["columns"] = columns;
    write_file(csv, to_csv(columns, rows));
    write_file(side, meta.dump(2) + "\n");
    files.push_back(csv.string());
    files.push_back(side.string());
  } else {
    json doc;
    doc["metadata"] = std::move(meta);
    doc["columns"] = columns;
    doc["rows"] = rows;
    const auto path = options.out_dir / (stem + ".json");
    write_file(path, doc.dump(2) + "\n");
    files.push_back(path.string());
  }
  return files;
}

json bracket_json(const std::optional<Bracket>& b) {
  if (!b) return nullptr;
  return json::array({b->lo, b->hi});
}

json midpoint_json(const std::optional<Bracket>& b) {
  if (!b) return nullptr;
  return b->midpoint();
}

json threshold_json(const ThresholdReport& r) {
  return {{"f_purify", midpoint_json(r.purify)},
          {"f_secure", midpoint_json(r.secure)},
          {"brackets", {{"purify", bracket_json(r.purify)}, {"secure", bracket_json(r.secure)}}},
          {"regime_at_lo", to_string(r.regime_at_lo)},
          {"regime_at_hi", to_string(r.regime_at_hi)}};
}

}  // namespace

const char* version() noexcept { return "0.1.0"; }

std::vector<std::string> trajectory_columns(bool monte_carlo) {
  std::vector<std::string> cols{"round", "F", "F_cond", "keep_prob"};
  for (char letter : kLetters)
    for (unsigned flag = 0; flag < 4; ++flag)
      cols.push_back(std::string(1, letter) + static_cast<char>('0' + (flag >> 1)) + static_cast<char>('0' + (flag & 1)));
  if (monte_carlo) {
    cols.push_back("survivors");
    cols.push_back("sample_stddev_F");
  }
  return cols;
}

json run_iterate(const ExperimentConfig& config, const RunOptions& options) {
  const auto initial = SubensembleState::from_bell(config.initial_bell, config.flag_mode);
  const Trajectory t = iterate(initial, config.noise, config.placement, {config.rounds, config.fixpoint_tol});

  Rows rows;
  for (const auto& r : t.records) {
    std::vector<double> row{static_cast<double>(r.round), r.fidelity, r.conditional_fidelity, r.keep_probability};
    const auto c = ordered_coefficients(r.state.coefficients());
    row.insert(row.end(), c.begin(), c.end());
    rows.push_back(std::move(row));
  }

  json convergence{{"converged", t.converged},
                   {"rounds", t.records.size() - 1},
                   {"last_change", t.last_change},
                   {"F_max", t.max_fidelity()},
                   {"F_cond_limit", t.final().conditional_fidelity}};
  try {
    const auto ex = convergence_exponents(t);
    convergence["exponents"] = {{"rate_F", ex.fidelity.rate},
                                {"rate_F_cond", ex.conditional.rate},
                                {"residual_F", ex.fidelity.residual_rms},
                                {"residual_F_cond", ex.conditional.residual_rms}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientTail) throw;
    convergence["exponents"] = nullptr;
  }

  json meta = metadata("iterate", config, options);
  meta["convergence"] = convergence;
  json summary;
  summary["command"] = "iterate";
  summary["convergence"] = convergence;
  summary["files"] = write_table(options, config.format, "trajectory", trajectory_columns(false), rows, meta);
  return summary;
}

json run_mc(const ExperimentConfig& config, const RunOptions& options) {
  auto ensemble = mc::Ensemble::create(config.initial_bell, config.pairs, config.flag_mode, config.seed, config.chunks);
  const mc::McTrajectory t = mc::run_protocol(ensemble, config.noise, config.rounds, config.placement, config.threads);

  Rows rows;
  json survivors = json::array();
  for (const auto& s : t.rounds) {
    std::vector<double> row{static_cast<double>(s.round), s.fidelity, s.conditional_fidelity, s.keep_fraction};
    std::array<double, 16> freq{};
    for (std::size_t k = 0; k < 16; ++k) {
      freq[k] = s.survivors ? static_cast<double>(s.histogram[k]) / static_cast<double>(s.survivors) : 0.0;
    }
    const auto c = ordered_coefficients(freq);
    row.insert(row.end(), c.begin(), c.end());
    row.push_back(static_cast<double>(s.survivors));
    row.push_back(s.stddev_fidelity);
    rows.push_back(std::move(row));
    survivors.push_back(s.survivors);
  }

  json meta = metadata("mc", config, options);
  meta["halted"] = t.halted;
  meta["survivors"] = survivors;
  json summary;
  summary["command"] = "mc";
  summary["halted"] = t.halted;
  summary["rounds"] = t.rounds.size() - 1;
  summary["survivors"] = survivors;
  summary["files"] = write_table(options, config.format, "mc_trajectory", trajectory_columns(true), rows, meta);
  return summary;
}

json run_scan(const ExperimentConfig& config, const RunOptions& options) {
  const ScanConfig& scan = config.scan;
  ThresholdOptions topt;
  topt.lo = scan.lo;
  topt.hi = scan.hi;
  topt.bisect_tol = scan.bisect_tol;
  topt.placement = config.placement;
  topt.regime = scan.regime;

  const auto initial = SubensembleState::from_bell(config.initial_bell, config.flag_mode);

  // Grid entries are independent: one task each.
  std::vector<std::future<json>> grid_jobs;
  for (double f : scan.werner_grid) {
    grid_jobs.push_back(std::async(config.threads == 1 ? std::launch::deferred : std::launch::async, [&, f] {
      json entry{{"werner", f}};
      try {
        const auto r = find_thresholds(scan.family, SubensembleState::werner(f, config.flag_mode), topt);
        entry.update(threshold_json(r));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoThreshold) throw;
        entry["no_threshold"] = true;
        entry["f_purify"] = nullptr;
        entry["f_secure"] = nullptr;
      }
      return entry;
    }));
  }

  json report;
  report["family"] = to_string(scan.family);
  report["range"] = {scan.lo, scan.hi};
  report["initial_state"] = {{"bell", std::vector<double>(config.initial_bell.begin(), config.initial_bell.end())},
                             {"flag_mode", to_string(config.flag_mode)}};
  bool no_threshold = false;
  std::string no_threshold_message;
  try {
    report.update(threshold_json(find_thresholds(scan.family, initial, topt)));
    report["no_threshold"] = false;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoThreshold) throw;
    no_threshold = true;
    no_threshold_message = e.what();
    report["no_threshold"] = true;
    report["f_purify"] = nullptr;
    report["f_secure"] = nullptr;
    report["message"] = e.what();
  }

  json grid = json::array();
  auto extreme = [](const json& acc, const json& v, bool take_max) {
    if (v.is_null()) return acc;
    if (acc.is_null()) return v;
    return take_max ? json(std::max(acc.get<double>(), v.get<double>())) : json(std::min(acc.get<double>(), v.get<double>()));
  };
  json pmin, pmax, smin, smax;
  for (auto& job : grid_jobs) {
    json entry = job.get();
    pmin = extreme(pmin, entry["f_purify"], false);
    pmax = extreme(pmax, entry["f_purify"], true);
    smin = extreme(smin, entry["f_secure"], false);
    smax = extreme(smax, entry["f_secure"], true);
    grid.push_back(std::move(entry));
  }
  report["werner_grid"] = grid;
  report["grid_extremes"] = {{"f_purify_min", pmin}, {"f_purify_max", pmax}, {"f_secure_min", smin}, {"f_secure_max", smax}};

  json files = json::array();
  if (scan.grid_points > 0) {
    Rows rows;
    json points = json::array();
    for (std::size_t k = 0; k < scan.grid_points; ++k) {
      const double x = scan.grid_points == 1 ? scan.lo
                                             : scan.lo + (scan.hi - scan.lo) * static_cast<double>(k) /
                                                             static_cast<double>(scan.grid_points - 1);
      const auto r = classify_regime(NoiseModel::from_family(scan.family, x), initial, config.placement, scan.regime);
      rows.push_back({x, static_cast<double>(r.regime), r.max_fidelity, r.conditional_limit, static_cast<double>(r.rounds)});
      points.push_back({{"parameter", x}, {"regime", to_string(r.regime)}, {"F_limit", r.max_fidelity},
                        {"F_cond_limit", r.conditional_limit}, {"rounds", r.rounds}});
    }
    report["points"] = points;
    json meta = metadata("scan", config, options);
    meta["regime_codes"] = {"NO_PURIFICATION", "PURIFY_INSECURE", "PURIFY_SECURE"};
    const auto written = write_table(options, OutputFormat::Csv, "scan_points",
                                     {"parameter", "regime", "F_limit", "F_cond_limit", "rounds"}, rows, meta);
    for (const auto& f : written) files.push_back(f);
  }

  json doc = metadata("scan", config, options);
  doc["report"] = report;
  const auto path = options.out_dir / "scan.json";
  write_file(path, doc.dump(2) + "\n");
  files.push_back(path.string());

  if (no_threshold) fail(ErrorCode::NoThreshold, no_threshold_message);
  json summary;
  summary["command"] = "scan";
  summary["report"] = report;
  summary["files"] = files;
  return summary;
}

json run_verify(const std::optional<std::string>& tables_json, const RunOptions& options) {
  ProtocolTables tables = ProtocolTables::library();
  if (tables_json) {
    json doc;
    try {
      doc = json::parse(*tables_json);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::Config, std::string("tables: ") + e.what());
    }
    tables = ProtocolTables::from_json(doc);
  }
  const VerifyReport report = run_verification(tables);
  json doc;
  doc["tool"] = "qpa";
  doc["version"] = version();
  doc["command"] = "verify";
  doc["custom_tables"] = tables_json.has_value();
  doc.update(report.to_json());
  const auto path = options.out_dir / "verify.json";
  write_file(path, doc.dump(2) + "\n");

  json summary = report.to_json();
  summary["command"] = "verify";
  summary["files"] = json::array({path.string()});
  if (!report.passed()) {
    std::ostringstream msg;
    for (const auto& c : report.checks) {
      if (!c.passed) msg << c.name << ": " << c.detail << "\n";
    }
    fail(ErrorCode::Verification, msg.str());
  }
  return summary;
}

}  // namespace qpa
