#pragma once

#include "json.hpp"
#include "qpa/noise_model.hpp"

namespace qpa {

/// {"family": "product", "f0": x} | {"family": "one_sided", "f0": x} |
/// {"family": "uniform", "f00": x} | {"family": "explicit", "f": [16 numbers]}
nlohmann::json noise_to_json(const NoiseModel& model);

/// Throws Error(Config) on unknown families, unknown keys or bad values.
NoiseModel noise_from_json(const nlohmann::json& doc);

}  // namespace qpa
