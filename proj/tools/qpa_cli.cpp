// qpa: command-line front end over the C interface.
//
//   qpa iterate|mc|scan|verify [--config PATH] [--preset NAME] [--seed U64]
//       [--out DIR] [--format csv|json] [--deterministic]
//
// Exit codes: 0 ok, 1 verification failure, 2 configuration or I/O error,
// 3 degenerate round, 4 no threshold in the scanned range.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpa/qpa.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitNoThreshold = 4;

int exit_code(qpa_status s) {
  switch (s) {
    case QPA_OK: return kExitOk;
    case QPA_ERR_VERIFICATION: return kExitVerification;
    case QPA_ERR_DEGENERATE: return kExitDegenerate;
    case QPA_ERR_NO_THRESHOLD: return kExitNoThreshold;
    case QPA_ERR_CONFIG:
    case QPA_ERR_INVALID_ARGUMENT:
    case QPA_ERR_IO: return kExitConfig;
    default: return kExitVerification;
  }
}

int report_failure(qpa_status s) {
  std::cerr << "qpa: " << qpa_status_name(s) << ": " << qpa_last_error() << "\n";
  return exit_code(s);
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct StringDeleter {
  void operator()(char* s) const { qpa_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ExperimentDeleter {
  void operator()(qpa_experiment* x) const { qpa_experiment_free(x); }
};

std::string fmt(const nlohmann::json& v) {
  if (v.is_null()) return "none";
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
    return buf;
  }
  return v.dump();
}

void print_files(const nlohmann::json& s) {
  for (const auto& f : s.value("files", nlohmann::json::array())) std::cout << "wrote " << f.get<std::string>() << "\n";
}

void print_summary(const std::string& command, const nlohmann::json& s) {
  if (command == "iterate") {
    const auto& c = s["convergence"];
    std::cout << "rounds " << c["rounds"] << (c["converged"].get<bool>() ? " (converged)" : "") << "\n"
              << "F      " << fmt(c["F_max"]) << "\n"
              << "F_cond " << fmt(c["F_cond_limit"]) << "\n";
    if (!c["exponents"].is_null()) {
      std::cout << "rate F      " << fmt(c["exponents"]["rate_F"]) << "\n"
                << "rate F_cond " << fmt(c["exponents"]["rate_F_cond"]) << "\n";
    }
  } else if (command == "mc") {
    std::cout << "rounds " << s["rounds"] << (s["halted"].get<bool>() ? " (halted: fewer than two pairs)" : "")
              << "\nsurvivors " << s["survivors"].dump() << "\n";
  } else if (command == "scan") {
    const auto& r = s["report"];
    std::cout << "family " << r["family"].get<std::string>() << "\n"
              << "f_purify " << fmt(r["f_purify"]) << "\n"
              << "f_secure " << fmt(r["f_secure"]) << "\n";
    for (const auto& g : r.value("werner_grid", nlohmann::json::array())) {
      std::cout << "  werner " << fmt(g["werner"]) << ": f_purify " << fmt(g["f_purify"]) << ", f_secure "
                << fmt(g["f_secure"]) << "\n";
    }
  } else if (command == "verify") {
    for (const auto& c : s["checks"]) {
      std::cout << (c["passed"].get<bool>() ? "ok   " : "FAIL ") << c["name"].get<std::string>() << "\n";
    }
  }
  print_files(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy entanglement purification simulator"};
  app.set_version_flag("--version", std::string(qpa_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format;
  bool deterministic = false;
  std::string tables_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--preset", preset, "Named configuration (fig1, thresholds)");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--deterministic", deterministic, "Omit timestamps from output files");
  };

  auto* iterate = app.add_subcommand("iterate", "Deterministic recurrence trajectory");
  auto* mc = app.add_subcommand("mc", "Monte Carlo protocol run");
  auto* scan = app.add_subcommand("scan", "Threshold search over a noise family");
  auto* verify = app.add_subcommand("verify", "Check the label tables against the dense reference");
  for (auto* sub : {iterate, mc, scan, verify}) add_common(sub);
  verify->add_option("--tables", tables_path, "JSON overrides for the tables under test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "qpa: cannot create output directory " << out_dir << ": " << ec.message() << "\n";
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  char* raw = nullptr;
  qpa_status status = QPA_OK;

  if (command == "verify") {
    std::optional<std::string> tables;
    if (!tables_path.empty()) {
      tables = read_file(tables_path);
      if (!tables) {
        std::cerr << "qpa: cannot read " << tables_path << "\n";
        return kExitConfig;
      }
    }
    status = qpa_verify(tables ? tables->c_str() : nullptr, out_dir.c_str(), &raw);
  } else {
    qpa_experiment* handle = nullptr;
    if (qpa_experiment_create(&handle) != QPA_OK) return report_failure(QPA_ERR_INTERNAL);
    std::unique_ptr<qpa_experiment, ExperimentDeleter> x(handle);

    if (!preset.empty() && (status = qpa_experiment_load_preset(x.get(), preset.c_str())) != QPA_OK) {
      return report_failure(status);
    }
    if (!config_path.empty()) {
      const auto text = read_file(config_path);
      if (!text) {
        std::cerr << "qpa: cannot read " << config_path << "\n";
        return kExitConfig;
      }
      if ((status = qpa_experiment_load_config(x.get(), text->c_str(), config_path.c_str())) != QPA_OK) {
        return report_failure(status);
      }
    }
    if (seed) qpa_experiment_set_seed(x.get(), *seed);
    if (!format.empty() && (status = qpa_experiment_set_format(x.get(), format.c_str())) != QPA_OK) {
      return report_failure(status);
    }
    qpa_experiment_set_output_dir(x.get(), out_dir.c_str());
    qpa_experiment_set_deterministic(x.get(), deterministic ? 1 : 0);
    status = qpa_experiment_run(x.get(), command.c_str(), &raw);
  }

  OwnedString summary(raw);
  if (status != QPA_OK) return report_failure(status);
  print_summary(command, nlohmann::json::parse(summary.get()));
  return kExitOk;
}
