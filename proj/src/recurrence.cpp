#include "qpa/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "qpa/error.hpp"
#include "qpa/lab_demon.hpp"

namespace qpa {

const char* to_string(NoisePlacement placement) noexcept {
  return placement == NoisePlacement::BeforeRotation ? "before_rotation" : "before_bcnot";
}

NoisePlacement placement_from_string(std::string_view name) {
  if (name == "before_rotation") return NoisePlacement::BeforeRotation;
  if (name == "before_bcnot") return NoisePlacement::BeforeBcnot;
  fail(ErrorCode::InvalidArgument, "unknown noise placement '" + std::string(name) + "'");
}

const char* to_string(FlagMode mode) noexcept { return mode == FlagMode::Fixed ? "fixed" : "random"; }

FlagMode flag_mode_from_string(std::string_view name) {
  if (name == "fixed") return FlagMode::Fixed;
  if (name == "random") return FlagMode::Random;
  fail(ErrorCode::InvalidArgument, "unknown flag mode '" + std::string(name) + "'");
}

const char* to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::NoPurification: return "NO_PURIFICATION";
    case Regime::PurifyInsecure: return "PURIFY_INSECURE";
    case Regime::PurifySecure: return "PURIFY_SECURE";
  }
  return "NO_PURIFICATION";
}

// ---------------------------------------------------------------------------

SubensembleState SubensembleState::from_coefficients(const std::array<double, 16>& p) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      fail(ErrorCode::InvalidArgument, "subensemble coefficients must be finite and nonnegative");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "subensemble coefficients sum to " << sum << ", expected 1";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  return SubensembleState(p);
}

SubensembleState SubensembleState::from_bell(const std::array<double, 4>& bell, FlagMode mode) {
  std::array<double, 16> p{};
  if (mode == FlagMode::Fixed) {
    std::copy(bell.begin(), bell.end(), p.begin());
  } else {
    for (unsigned f = 0; f < 4; ++f)
      for (unsigned b = 0; b < 4; ++b) p[f * 4 + b] = bell[b] / 4.0;
  }
  return from_coefficients(p);
}

std::array<double, 4> werner_bell(double fidelity) {
  require(fidelity >= 0.0 && fidelity <= 1.0, "Werner fidelity must lie in [0, 1]");
  const double r = (1.0 - fidelity) / 3.0;
  return {fidelity, r, r, r};
}

SubensembleState SubensembleState::werner(double fidelity, FlagMode mode) {
  return from_bell(werner_bell(fidelity), mode);
}

std::array<double, 4> SubensembleState::bell_marginals() const {
  std::array<double, 4> m{};
  for (unsigned f = 0; f < 4; ++f)
    for (unsigned b = 0; b < 4; ++b) m[b] += p_[f * 4 + b];
  return m;
}

double SubensembleState::fidelity() const { return bell_marginals()[kPhiPlus.index()]; }

double SubensembleState::conditional_fidelity() const {
  double sum = 0.0;
  for (unsigned f = 0; f < 4; ++f) sum += p_[f * 4 + f];
  return sum;
}

double SubensembleState::max_abs_difference(const SubensembleState& other) const {
  double d = 0.0;
  for (std::size_t k = 0; k < p_.size(); ++k) d = std::max(d, std::abs(p_[k] - other.p_[k]));
  return d;
}

// ---------------------------------------------------------------------------

namespace {

BellLabel noisy_rotation(BellLabel b, Pauli alice, Pauli bob, NoisePlacement placement) {
  return placement == NoisePlacement::BeforeRotation ? rotate(apply_two_sided_pauli(b, alice, bob))
                                                     : apply_two_sided_pauli(rotate(b), alice, bob);
}

void check_keep(double keep) {
  if (!(keep >= kDegenerateKeepProbability)) {
    std::ostringstream msg;
    msg << "keep probability " << keep << " is below " << kDegenerateKeepProbability;
    fail(ErrorCode::Degenerate, msg.str());
  }
}

}  // namespace

RoundResult one_round(const SubensembleState& p, const NoiseModel& noise, NoisePlacement placement) {
  // Noise acts independently on control and target, so the sum over
  // (category1, noise1, category2, noise2) factors through the per-pair
  // distribution of categories after noise and rotation.
  std::array<double, 16> after{};
  for (unsigned f = 0; f < 4; ++f) {
    for (unsigned b = 0; b < 4; ++b) {
      const double w = p.coefficients()[f * 4 + b];
      if (w == 0.0) continue;
      for (Pauli alice : kAllPaulis) {
        for (Pauli bob : kAllPaulis) {
          const double fw = noise.probability(alice, bob);
          if (fw == 0.0) continue;
          const ErrorFlag flag = record_two_sided(ErrorFlag::from_index(f), alice, bob);
          const BellLabel bell = noisy_rotation(BellLabel::from_index(b), alice, bob, placement);
          after[flag.index() * 4 + bell.index()] += w * fw;
        }
      }
    }
  }

  std::array<double, 16> out{};
  double keep = 0.0;
  for (unsigned c1 = 0; c1 < 16; ++c1) {
    if (after[c1] == 0.0) continue;
    const ErrorFlag f1 = ErrorFlag::from_index(c1 >> 2);
    const BellLabel b1 = BellLabel::from_index(c1 & 3u);
    for (unsigned c2 = 0; c2 < 16; ++c2) {
      const double w = after[c1] * after[c2];
      if (w == 0.0) continue;
      const BellPair pair = bcnot(b1, BellLabel::from_index(c2 & 3u));
      if (!coincides(pair.target)) continue;
      const ErrorFlag flag = flag_update(f1, ErrorFlag::from_index(c2 >> 2));
      out[flag.index() * 4 + pair.source.index()] += w;
      keep += w;
    }
  }
  check_keep(keep);
  for (double& x : out) x /= keep;
  return {SubensembleState::from_coefficients(out), keep};
}

std::array<double, 4> one_round_bell(const std::array<double, 4>& bell, const NoiseModel& noise,
                                     NoisePlacement placement, double* keep_probability) {
  std::array<double, 4> after{};
  for (unsigned b = 0; b < 4; ++b)
    for (Pauli alice : kAllPaulis)
      for (Pauli bob : kAllPaulis)
        after[noisy_rotation(BellLabel::from_index(b), alice, bob, placement).index()] +=
            bell[b] * noise.probability(alice, bob);

  std::array<double, 4> out{};
  double keep = 0.0;
  for (unsigned b1 = 0; b1 < 4; ++b1) {
    for (unsigned b2 = 0; b2 < 4; ++b2) {
      const BellPair pair = bcnot(BellLabel::from_index(b1), BellLabel::from_index(b2));
      if (!coincides(pair.target)) continue;
      out[pair.source.index()] += after[b1] * after[b2];
      keep += after[b1] * after[b2];
    }
  }
  check_keep(keep);
  for (double& x : out) x /= keep;
  if (keep_probability) *keep_probability = keep;
  return out;
}

Trajectory iterate(const SubensembleState& initial, const NoiseModel& noise, NoisePlacement placement,
                   StopCriteria stop) {
  Trajectory t;
  t.records.push_back({0, initial.fidelity(), initial.conditional_fidelity(), 1.0, initial});
  for (std::size_t n = 1; n <= stop.max_rounds; ++n) {
    const SubensembleState& prev = t.records.back().state;
    RoundResult r = one_round(prev, noise, placement);
    t.last_change = r.state.max_abs_difference(prev);
    t.records.push_back({n, r.state.fidelity(), r.state.conditional_fidelity(), r.keep_probability, r.state});
    if (t.last_change < stop.fixpoint_tol) {
      t.converged = true;
      break;
    }
  }
  return t;
}

RegimeReport classify_regime(const NoiseModel& noise, const SubensembleState& initial, NoisePlacement placement,
                             const RegimeTolerances& tol) {
  SubensembleState state = initial;
  std::size_t rounds = 0;
  bool converged = false;
  try {
    while (rounds < tol.max_rounds) {
      RoundResult r = one_round(state, noise, placement);
      ++rounds;
      const double change = r.state.max_abs_difference(state);
      state = r.state;
      if (change < tol.fixpoint_tol) {
        converged = true;
        break;
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Degenerate) throw;
    return {Regime::NoPurification, state.fidelity(), state.conditional_fidelity(), rounds, false};
  }
  const double f = state.fidelity();
  const double fc = state.conditional_fidelity();
  Regime regime = Regime::NoPurification;
  if (f > tol.purify_fidelity) {
    regime = (1.0 - fc < tol.secure_tol) ? Regime::PurifySecure : Regime::PurifyInsecure;
  }
  return {regime, f, fc, rounds, converged};
}

}  // namespace qpa
