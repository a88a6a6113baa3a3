#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpa/bell_algebra.hpp"
#include "qpa/lab_demon.hpp"

namespace qpa {

/// The label tables under test. Defaults to the library's own maps; tests
/// and the `verify --tables` option substitute mutated copies.
struct ProtocolTables {
  FlagTable flag_table = kFlagTable;
  std::array<BellLabel, 4> rotation{};
  std::array<BellPair, 16> bcnot{};  // index source * 4 + target

  static ProtocolTables library();
  /// Overrides from {"flag_table": [[4 x "ij"] x 4], "bcnot": [["st","tt"] x 16],
  /// "rotation": ["ij" x 4]}; absent keys keep library values.
  static ProtocolTables from_json(const nlohmann::json& doc);
};

struct VerifyCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
  nlohmann::json to_json() const;
};

struct VerifyOptions {
  std::size_t random_instances = 20;
  double round_tolerance = 1e-10;
  std::uint64_t seed = 20240601;
};

VerifyReport run_verification(const ProtocolTables& tables = ProtocolTables::library(), const VerifyOptions& options = {});

}  // namespace qpa
