#pragma once

#include <array>
#include <random>
#include <string_view>
#include <utility>

#include "qpa/bell_algebra.hpp"

namespace qpa {

using Rng = std::mt19937_64;

enum class NoiseFamily {
  Product,   // independent one-qubit depolarizing on both qubits of a pair
  OneSided,  // one-qubit depolarizing on Alice's qubit only
  Uniform,   // f00 fixed, the 15 error terms share the rest equally
  Explicit,  // all 16 probabilities given
};

const char* to_string(NoiseFamily family) noexcept;
NoiseFamily noise_family_from_string(std::string_view name);

/// Joint distribution f[mu][nu] of the Pauli pair (s_mu on Alice's qubit,
/// s_nu on Bob's qubit) applied to a pair once per purification round.
/// Immutable after construction.
class NoiseModel {
 public:
  static NoiseModel identity();
  static NoiseModel product_depolarizing(double f0);
  static NoiseModel one_sided_depolarizing(double f0);
  static NoiseModel uniform_residual(double f00);
  static NoiseModel from_probabilities(const std::array<double, 16>& f);
  /// Parameterized families only; Explicit is rejected.
  static NoiseModel from_family(NoiseFamily family, double parameter);

  NoiseFamily family() const { return family_; }
  /// f0 / f00 of the constructing family; NaN for Explicit.
  double parameter() const { return parameter_; }

  double probability(Pauli alice, Pauli bob) const {
    return f_[static_cast<unsigned>(alice) * 4 + static_cast<unsigned>(bob)];
  }
  /// Row-major over (alice, bob).
  const std::array<double, 16>& probabilities() const { return f_; }

  /// Probability of each combined Bell-label shift, indexed by LabelShift::index().
  std::array<double, 4> label_shift_distribution() const;

  std::pair<Pauli, Pauli> sample(Rng& rng) const;

 private:
  NoiseModel(const std::array<double, 16>& f, NoiseFamily family, double parameter);

  std::array<double, 16> f_{};
  std::array<double, 16> cumulative_{};
  NoiseFamily family_ = NoiseFamily::Explicit;
  double parameter_ = 0.0;
};

}  // namespace qpa
