#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qpa/bell_algebra.hpp"
#include "qpa/noise_model.hpp"

namespace qpa {

enum class NoisePlacement { BeforeRotation, BeforeBcnot };

const char* to_string(NoisePlacement placement) noexcept;
NoisePlacement placement_from_string(std::string_view name);

enum class FlagMode { Fixed, Random };

const char* to_string(FlagMode mode) noexcept;
FlagMode flag_mode_from_string(std::string_view name);

/// Weights of the 16 (flag, Bell) categories; entry (f, b) is the
/// coefficient of |B_b><B_b| in subensemble f. Index is f * 4 + b.
class SubensembleState {
 public:
  /// Validates nonnegativity and unit sum (1e-12).
  static SubensembleState from_coefficients(const std::array<double, 16>& p);
  /// Bell probabilities in label-index order (Phi+, Psi+, Phi-, Psi-).
  static SubensembleState from_bell(const std::array<double, 4>& bell, FlagMode mode = FlagMode::Fixed);
  /// Fidelity F on Phi+, the remaining weight spread evenly.
  static SubensembleState werner(double fidelity, FlagMode mode = FlagMode::Fixed);

  double operator()(ErrorFlag f, BellLabel b) const { return p_[f.index() * 4 + b.index()]; }
  const std::array<double, 16>& coefficients() const { return p_; }

  /// Summed over flags; label-index order.
  std::array<double, 4> bell_marginals() const;
  /// Weight on Phi+ (A_n).
  double fidelity() const;
  /// Sum over flags f of the weight of subensemble f on Bell state B_f.
  double conditional_fidelity() const;

  double max_abs_difference(const SubensembleState& other) const;

 private:
  explicit SubensembleState(const std::array<double, 16>& p) : p_(p) {}
  std::array<double, 16> p_{};
};

/// Werner-like Bell probabilities (F, (1-F)/3, (1-F)/3, (1-F)/3).
std::array<double, 4> werner_bell(double fidelity);

struct RoundResult {
  SubensembleState state;
  double keep_probability;
};

inline constexpr double kDegenerateKeepProbability = 1e-9;

/// One purification round over the product ensemble P (x) P, by exhaustive
/// enumeration of categories and noise outcomes. Throws Error(Degenerate)
/// when the keep probability falls below 1e-9.
RoundResult one_round(const SubensembleState& p, const NoiseModel& noise,
                      NoisePlacement placement = NoisePlacement::BeforeRotation);

/// Same map without flags: Bell probabilities in, Bell probabilities out.
std::array<double, 4> one_round_bell(const std::array<double, 4>& bell, const NoiseModel& noise,
                                     NoisePlacement placement, double* keep_probability = nullptr);

struct RoundRecord {
  std::size_t round;
  double fidelity;
  double conditional_fidelity;
  double keep_probability;  // 1 for round 0
  SubensembleState state;
};

struct StopCriteria {
  std::size_t max_rounds = 500;
  double fixpoint_tol = 1e-12;  // sup-norm change between rounds
};

struct Trajectory {
  std::vector<RoundRecord> records;  // records[0] is the initial state
  bool converged = false;
  double last_change = 0.0;

  const RoundRecord& final() const { return records.back(); }
  /// Limiting fidelity, read from the final state.
  double max_fidelity() const { return final().fidelity; }
};

Trajectory iterate(const SubensembleState& initial, const NoiseModel& noise,
                   NoisePlacement placement = NoisePlacement::BeforeRotation, StopCriteria stop = {});

// ---------------------------------------------------------------------------
// Regimes and thresholds

enum class Regime { NoPurification, PurifyInsecure, PurifySecure };

const char* to_string(Regime regime) noexcept;

struct RegimeTolerances {
  double secure_tol = 1e-6;        // secure iff 1 - F_cond_limit < secure_tol
  double purify_fidelity = 0.5;    // purifying iff F_limit > purify_fidelity
  std::size_t max_rounds = 2'000'000;
  double fixpoint_tol = 1e-14;
};

struct RegimeReport {
  Regime regime;
  double max_fidelity;
  double conditional_limit;
  std::size_t rounds;
  bool converged;
};

/// A Degenerate round is reported as NoPurification.
RegimeReport classify_regime(const NoiseModel& noise, const SubensembleState& initial,
                             NoisePlacement placement = NoisePlacement::BeforeRotation,
                             const RegimeTolerances& tol = {});

struct Bracket {
  double lo;
  double hi;
  double midpoint() const { return 0.5 * (lo + hi); }
};

struct ThresholdOptions {
  double lo = 0.0;
  double hi = 1.0;
  double bisect_tol = 1e-5;
  NoisePlacement placement = NoisePlacement::BeforeRotation;
  RegimeTolerances regime{};
};

struct ThresholdReport {
  NoiseFamily family;
  Regime regime_at_lo;
  Regime regime_at_hi;
  /// Infimum parameter with a purifying regime; empty if not inside [lo, hi].
  std::optional<Bracket> purify;
  /// Infimum parameter with the secure regime; empty if not inside [lo, hi].
  std::optional<Bracket> secure;
};

/// Bisection on a family that is monotone in its parameter. Throws
/// Error(NoThreshold) when both ends of the range share a regime.
ThresholdReport find_thresholds(NoiseFamily family, const SubensembleState& initial,
                                const ThresholdOptions& options = {});

// ---------------------------------------------------------------------------
// Convergence exponents

struct ExponentOptions {
  double floor = 1e-14;        // smaller distances are dropped
  double tail_ceiling = 1e-3;  // larger distances are treated as transient
  std::size_t min_tail = 6;
};

struct ExponentFit {
  double rate;          // decay per round, -slope of log(distance)
  double intercept;
  double residual_rms;  // of the log-linear fit
  std::size_t points;
  std::size_t first_round;
  double slope_drift;   // |slope(second half) - slope(first half)| / |slope|
  bool constant_slope;  // slope_drift < 0.1
};

struct ConvergenceExponents {
  ExponentFit fidelity;     // log(F_inf - F_n)
  ExponentFit conditional;  // log(1 - F_cond_n)
};

/// Throws Error(InsufficientTail) when either series has fewer than
/// `min_tail` usable points.
ConvergenceExponents convergence_exponents(const Trajectory& t, const ExponentOptions& options = {});

/// Log-linear least squares over the usable points of `distance`.
ExponentFit fit_exponent(const std::vector<double>& distance, const ExponentOptions& options,
                         double extra_floor = 0.0);

}  // namespace qpa
