#include "qpa/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qpa/dense_oracle.hpp"
#include "qpa/error.hpp"
#include "qpa/recurrence.hpp"

namespace qpa {
namespace {

// The published flag-combination table, transcribed as text.
constexpr const char* kPublishedFlagTable[4][4] = {
    {"00", "00", "00", "10"},
    {"00", "01", "11", "00"},
    {"00", "11", "01", "00"},
    {"10", "00", "00", "00"},
};

std::string bits(unsigned index) {
  return std::string{static_cast<char>('0' + ((index >> 1) & 1u)), static_cast<char>('0' + (index & 1u))};
}

unsigned parse_bits(const nlohmann::json& v, const char* what) {
  if (!v.is_string()) fail(ErrorCode::Config, std::string(what) + ": expected a two-bit string such as \"01\"");
  const std::string s = v.get<std::string>();
  if (s.size() != 2 || (s[0] != '0' && s[0] != '1') || (s[1] != '0' && s[1] != '1')) {
    fail(ErrorCode::Config, std::string(what) + ": bad two-bit string '" + s + "'");
  }
  return static_cast<unsigned>((s[0] - '0') << 1 | (s[1] - '0'));
}

VerifyCheck published_table_check(const FlagTable& table) {
  std::ostringstream detail;
  bool ok = true;
  for (unsigned r = 0; r < 4; ++r) {
    for (unsigned c = 0; c < 4; ++c) {
      const std::string got = bits(table[r][c]);
      if (got != kPublishedFlagTable[r][c]) {
        ok = false;
        detail << "entry (row " << bits(r) << ", column " << bits(c) << ") is (" << got << "), published ("
               << kPublishedFlagTable[r][c] << "); ";
      }
    }
  }
  return {"flag_table_published", ok, ok ? "all 16 entries match" : detail.str()};
}

VerifyCheck derived_table_check(const FlagTable& table) {
  const auto derived = oracle::derive_flag_table();
  std::ostringstream detail;
  bool ok = true;
  std::size_t kept_entries = 0;
  for (unsigned r = 0; r < 4; ++r) {
    for (unsigned c = 0; c < 4; ++c) {
      const auto& d = derived[r * 4 + c];
      // Flag pairs that predict a discard never reach the table in a
      // consistent history; the published table sets them to (00).
      const unsigned expected = d ? d->index() : 0u;
      if (d) ++kept_entries;
      if (table[r][c] != expected) {
        ok = false;
        detail << "entry (row " << bits(r) << ", column " << bits(c) << ") is (" << bits(table[r][c])
               << "), dense derivation gives (" << bits(expected) << ")" << (d ? "" : " [discard]") << "; ";
      }
    }
  }
  if (ok) detail << kept_entries << " kept entries derived, the rest are (00)";
  return {"flag_table_derived", ok, detail.str()};
}

VerifyCheck bcnot_bijection_check(const std::array<BellPair, 16>& bcnot) {
  std::set<unsigned> seen;
  std::ostringstream detail;
  for (unsigned k = 0; k < 16; ++k) {
    const unsigned image = bcnot[k].source.index() * 4 + bcnot[k].target.index();
    if (!seen.insert(image).second) {
      detail << "input (" << bits(k >> 2) << "," << bits(k & 3u) << ") maps to an already used image ("
             << bits(image >> 2) << "," << bits(image & 3u) << "); ";
    }
  }
  const bool ok = seen.size() == 16;
  return {"bcnot_bijection", ok, ok ? "permutation of the 16 label pairs" : detail.str()};
}

VerifyCheck rotation_involution_check(const std::array<BellLabel, 4>& rotation) {
  std::ostringstream detail;
  bool ok = true;
  for (unsigned k = 0; k < 4; ++k) {
    if (rotation[rotation[k].index()].index() != k) {
      ok = false;
      detail << "rotation twice does not return " << bits(k) << "; ";
    }
  }
  return {"rotation_involution", ok, ok ? "rotation squared is the identity on labels" : detail.str()};
}

}  // namespace

ProtocolTables ProtocolTables::library() {
  ProtocolTables t;
  t.flag_table = kFlagTable;
  for (unsigned k = 0; k < 4; ++k) t.rotation[k] = rotate(BellLabel::from_index(k));
  for (unsigned s = 0; s < 4; ++s)
    for (unsigned g = 0; g < 4; ++g) t.bcnot[s * 4 + g] = qpa::bcnot(BellLabel::from_index(s), BellLabel::from_index(g));
  return t;
}

ProtocolTables ProtocolTables::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::Config, "tables: expected an object");
  ProtocolTables t = library();
  for (const auto& [key, value] : doc.items()) {
    if (key == "flag_table") {
      if (!value.is_array() || value.size() != 4) fail(ErrorCode::Config, "flag_table: expected 4 rows");
      for (unsigned r = 0; r < 4; ++r) {
        if (!value[r].is_array() || value[r].size() != 4) fail(ErrorCode::Config, "flag_table: expected 4 columns");
        for (unsigned c = 0; c < 4; ++c) t.flag_table[r][c] = static_cast<unsigned char>(parse_bits(value[r][c], "flag_table"));
      }
    } else if (key == "rotation") {
      if (!value.is_array() || value.size() != 4) fail(ErrorCode::Config, "rotation: expected 4 entries");
      for (unsigned k = 0; k < 4; ++k) t.rotation[k] = BellLabel::from_index(parse_bits(value[k], "rotation"));
    } else if (key == "bcnot") {
      if (!value.is_array() || value.size() != 16) fail(ErrorCode::Config, "bcnot: expected 16 entries");
      for (unsigned k = 0; k < 16; ++k) {
        if (!value[k].is_array() || value[k].size() != 2) fail(ErrorCode::Config, "bcnot: entries are [source, target]");
        t.bcnot[k] = BellPair{BellLabel::from_index(parse_bits(value[k][0], "bcnot")),
                              BellLabel::from_index(parse_bits(value[k][1], "bcnot"))};
      }
    } else {
      fail(ErrorCode::Config, "tables: unknown key '" + key + "'");
    }
  }
  return t;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json doc;
  doc["passed"] = passed();
  doc["checks"] = nlohmann::json::array();
  for (const auto& c : checks) doc["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return doc;
}

VerifyReport run_verification(const ProtocolTables& tables, const VerifyOptions& options) {
  VerifyReport report;
  report.checks.push_back(published_table_check(tables.flag_table));
  report.checks.push_back(derived_table_check(tables.flag_table));

  const oracle::LabelMaps maps = oracle::derive_label_maps();

  {
    std::ostringstream detail;
    bool ok = true;
    for (unsigned k = 0; k < 4; ++k) {
      if (tables.rotation[k] != maps.rotation[k]) {
        ok = false;
        detail << bits(k) << " -> " << bits(tables.rotation[k].index()) << ", oracle gives "
               << bits(maps.rotation[k].index()) << "; ";
      }
    }
    report.checks.push_back({"rotation_vs_oracle", ok, ok ? "4 entries match" : detail.str()});
  }
  report.checks.push_back(rotation_involution_check(tables.rotation));
  report.checks.push_back(bcnot_bijection_check(tables.bcnot));
  {
    std::ostringstream detail;
    bool ok = true;
    for (unsigned k = 0; k < 16; ++k) {
      if (tables.bcnot[k] != maps.bcnot[k]) {
        ok = false;
        detail << "(" << bits(k >> 2) << "," << bits(k & 3u) << ") -> (" << bits(tables.bcnot[k].source.index()) << ","
               << bits(tables.bcnot[k].target.index()) << "), oracle gives (" << bits(maps.bcnot[k].source.index())
               << "," << bits(maps.bcnot[k].target.index()) << "); ";
      }
    }
    report.checks.push_back({"bcnot_vs_oracle", ok, ok ? "16 entries match" : detail.str()});
  }
  {
    std::ostringstream detail;
    bool ok = true;
    for (unsigned b = 0; b < 4; ++b) {
      for (Pauli a : kAllPaulis) {
        for (Pauli c : kAllPaulis) {
          const BellLabel mine = apply_two_sided_pauli(BellLabel::from_index(b), a, c);
          const BellLabel ref = maps.two_sided[b * 16 + static_cast<unsigned>(a) * 4 + static_cast<unsigned>(c)];
          if (mine != ref) {
            ok = false;
            detail << bits(b) << " under (" << static_cast<unsigned>(a) << "," << static_cast<unsigned>(c) << "); ";
          }
        }
      }
      if (coincides(BellLabel::from_index(b)) != maps.coincides[b]) {
        ok = false;
        detail << "coincidence of " << bits(b) << "; ";
      }
    }
    report.checks.push_back({"pauli_and_measurement_vs_oracle", ok, ok ? "64 shifts and 4 outcomes match" : detail.str()});
  }

  {
    // Engine vs dense oracle on random states and noise.
    Rng rng(options.seed);
    std::gamma_distribution<double> gamma(1.0, 1.0);
    double worst = 0.0;
    double worst_off = 0.0;
    for (std::size_t n = 0; n < options.random_instances; ++n) {
      std::array<double, 16> p{};
      std::array<double, 16> f{};
      double sp = 0.0, sf = 0.0;
      for (auto& x : p) sp += (x = gamma(rng));
      for (auto& x : f) sf += (x = gamma(rng));
      for (auto& x : p) x /= sp;
      for (auto& x : f) x /= sf;
      const auto state = SubensembleState::from_coefficients(p);
      const auto noise = NoiseModel::from_probabilities(f);
      const auto placement = n % 2 == 0 ? NoisePlacement::BeforeRotation : NoisePlacement::BeforeBcnot;
      const RoundResult engine = one_round(state, noise, placement);
      const oracle::OracleRound dense = oracle::oracle_one_round(state, noise, placement, tables.flag_table);
      worst = std::max(worst, engine.state.max_abs_difference(dense.state));
      worst = std::max(worst, std::abs(engine.keep_probability - dense.keep_probability));
      worst_off = std::max(worst_off, dense.max_off_diagonal);
    }
    std::ostringstream detail;
    detail << options.random_instances << " instances, max deviation " << worst << ", max off-diagonal " << worst_off;
    report.checks.push_back({"round_vs_oracle", worst <= options.round_tolerance && worst_off <= 1e-12, detail.str()});
  }
  return report;
}

}  // namespace qpa
