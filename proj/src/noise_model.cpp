#include "qpa/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "qpa/error.hpp"
#include "qpa/noise_json.hpp"

namespace qpa {
namespace {

constexpr double kSumTolerance = 1e-12;

void require_probability(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << what << " must lie in [0, 1], got " << x;
    fail(ErrorCode::InvalidArgument, msg.str());
  }
}

std::array<double, 4> one_qubit_depolarizing(double f0) {
  const double r = (1.0 - f0) / 3.0;
  return {f0, r, r, r};
}

}  // namespace

const char* to_string(NoiseFamily family) noexcept {
  switch (family) {
    case NoiseFamily::Product: return "product";
    case NoiseFamily::OneSided: return "one_sided";
    case NoiseFamily::Uniform: return "uniform";
    case NoiseFamily::Explicit: return "explicit";
  }
  return "explicit";
}

NoiseFamily noise_family_from_string(std::string_view name) {
  if (name == "product") return NoiseFamily::Product;
  if (name == "one_sided") return NoiseFamily::OneSided;
  if (name == "uniform") return NoiseFamily::Uniform;
  if (name == "explicit") return NoiseFamily::Explicit;
  fail(ErrorCode::InvalidArgument, "unknown noise family '" + std::string(name) + "'");
}

NoiseModel::NoiseModel(const std::array<double, 16>& f, NoiseFamily family, double parameter)
    : f_(f), family_(family), parameter_(parameter) {
  double sum = 0.0;
  for (double x : f_) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      fail(ErrorCode::InvalidArgument, "noise probabilities must be finite and nonnegative");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "noise probabilities sum to " << sum << ", expected 1";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < f_.size(); ++k) {
    acc += f_[k];
    cumulative_[k] = acc;
  }
}

NoiseModel NoiseModel::identity() { return uniform_residual(1.0); }

NoiseModel NoiseModel::product_depolarizing(double f0) {
  require_probability(f0, "f0");
  const auto g = one_qubit_depolarizing(f0);
  std::array<double, 16> f{};
  for (unsigned a = 0; a < 4; ++a)
    for (unsigned b = 0; b < 4; ++b) f[a * 4 + b] = g[a] * g[b];
  return NoiseModel(f, NoiseFamily::Product, f0);
}

NoiseModel NoiseModel::one_sided_depolarizing(double f0) {
  require_probability(f0, "f0");
  const auto g = one_qubit_depolarizing(f0);
  std::array<double, 16> f{};
  for (unsigned a = 0; a < 4; ++a) f[a * 4] = g[a];
  return NoiseModel(f, NoiseFamily::OneSided, f0);
}

NoiseModel NoiseModel::uniform_residual(double f00) {
  require_probability(f00, "f00");
  std::array<double, 16> f{};
  f.fill((1.0 - f00) / 15.0);
  f[0] = f00;
  return NoiseModel(f, NoiseFamily::Uniform, f00);
}

NoiseModel NoiseModel::from_probabilities(const std::array<double, 16>& f) {
  return NoiseModel(f, NoiseFamily::Explicit, std::numeric_limits<double>::quiet_NaN());
}

NoiseModel NoiseModel::from_family(NoiseFamily family, double parameter) {
  switch (family) {
    case NoiseFamily::Product: return product_depolarizing(parameter);
    case NoiseFamily::OneSided: return one_sided_depolarizing(parameter);
    case NoiseFamily::Uniform: return uniform_residual(parameter);
    case NoiseFamily::Explicit: break;
  }
  fail(ErrorCode::InvalidArgument, "the explicit noise family has no scalar parameter");
}

std::array<double, 4> NoiseModel::label_shift_distribution() const {
  std::array<double, 4> d{};
  for (Pauli a : kAllPaulis)
    for (Pauli b : kAllPaulis) d[two_sided_shift(a, b).index()] += probability(a, b);
  return d;
}

std::pair<Pauli, Pauli> NoiseModel::sample(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
  if (k >= f_.size()) {
    // u landed above a cumulative sum that rounded below 1.
    k = f_.size() - 1;
    while (k > 0 && f_[k] == 0.0) --k;
  }
  return {pauli_from_index(static_cast<unsigned>(k / 4)), pauli_from_index(static_cast<unsigned>(k % 4))};
}

// ---------------------------------------------------------------------------

nlohmann::json noise_to_json(const NoiseModel& model) {
  nlohmann::json doc;
  doc["family"] = to_string(model.family());
  switch (model.family()) {
    case NoiseFamily::Product:
    case NoiseFamily::OneSided: doc["f0"] = model.parameter(); break;
    case NoiseFamily::Uniform: doc["f00"] = model.parameter(); break;
    case NoiseFamily::Explicit: {
      const auto& f = model.probabilities();
      doc["f"] = std::vector<double>(f.begin(), f.end());
      break;
    }
  }
  return doc;
}

NoiseModel noise_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::Config, "noise: expected an object");
  if (!doc.contains("family") || !doc["family"].is_string()) {
    fail(ErrorCode::Config, "noise: missing string key 'family'");
  }
  const std::string name = doc["family"].get<std::string>();
  NoiseFamily family;
  try {
    family = noise_family_from_string(name);
  } catch (const Error& e) {
    fail(ErrorCode::Config, std::string("noise: ") + e.what());
  }
  const char* value_key = family == NoiseFamily::Uniform    ? "f00"
                          : family == NoiseFamily::Explicit ? "f"
                                                            : "f0";
  for (const auto& [key, _] : doc.items()) {
    if (key != "family" && key != value_key) {
      fail(ErrorCode::Config, "noise: unknown key '" + key + "' for family '" + name + "'");
    }
  }
  if (!doc.contains(value_key)) {
    fail(ErrorCode::Config, "noise: family '" + name + "' requires key '" + value_key + "'");
  }
  const auto& value = doc[value_key];
  try {
    if (family == NoiseFamily::Explicit) {
      if (!value.is_array() || value.size() != 16) {
        fail(ErrorCode::Config, "noise: 'f' must be an array of 16 numbers");
      }
      std::array<double, 16> f{};
      for (std::size_t k = 0; k < 16; ++k) {
        if (!value[k].is_number()) fail(ErrorCode::Config, "noise: 'f' must contain numbers");
        f[k] = value[k].get<double>();
      }
      return NoiseModel::from_probabilities(f);
    }
    if (!value.is_number()) {
      fail(ErrorCode::Config, std::string("noise: '") + value_key + "' must be a number");
    }
    return NoiseModel::from_family(family, value.get<double>());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    fail(ErrorCode::Config, std::string("noise: ") + e.what());
  }
}

}  // namespace qpa
