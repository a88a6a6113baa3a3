#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qpa/bell_algebra.hpp"
#include "qpa/noise_model.hpp"
#include "qpa/recurrence.hpp"

namespace qpa::mc {

/// One pair: Bell label in the low two bits, error flag in the next two.
class PairRecord {
 public:
  constexpr PairRecord() = default;
  constexpr PairRecord(BellLabel bell, ErrorFlag flag)
      : packed_(static_cast<std::uint8_t>(flag.index() << 2 | bell.index())) {}

  constexpr BellLabel bell() const { return BellLabel::from_index(packed_ & 3u); }
  constexpr ErrorFlag flag() const { return ErrorFlag::from_index(packed_ >> 2); }
  /// flag * 4 + bell, the SubensembleState index.
  constexpr unsigned category() const { return packed_; }

  friend constexpr bool operator==(PairRecord, PairRecord) = default;

 private:
  std::uint8_t packed_ = 0;
};

struct RoundStats {
  std::size_t round;
  std::size_t input_pairs;   // population entering the round (survivors for round 0)
  std::size_t survivors;
  double keep_fraction;      // survivors / floor(input_pairs / 2); 1 for round 0
  double fidelity;
  double conditional_fidelity;
  double stddev_fidelity;    // binomial sqrt(F (1 - F) / survivors)
  double stddev_conditional;
  std::array<std::size_t, 16> histogram;
};

struct MinimumFidelityCheck {
  bool passed;
  std::size_t sampled;
  std::size_t successes;
  double estimate;
  double lower;  // Clopper-Pearson 99%
  double upper;
};

/// A finite population of pairs with its random streams. Results are
/// bit-identical for a fixed (seed, chunk count), whatever the thread count.
class Ensemble {
 public:
  /// `bell` in label-index order; `pairs` >= 2.
  static Ensemble create(const std::array<double, 4>& bell, std::size_t pairs, FlagMode mode, std::uint64_t seed,
                         std::size_t chunks = 8);
  static Ensemble from_records(std::vector<PairRecord> records, std::uint64_t seed, std::size_t chunks = 8);

  std::size_t size() const { return pairs_.size(); }
  std::span<const PairRecord> pairs() const { return pairs_; }
  std::size_t round() const { return round_; }
  std::size_t chunks() const { return chunks_; }

  std::array<std::size_t, 16> histogram() const;
  /// Statistics of the current population, labelled with the current round.
  RoundStats snapshot() const;

  /// Noise, rotation, shuffle, pairing, BCNOT and post-selection. Throws
  /// Error(Halt) with fewer than two pairs.
  RoundStats run_round(const NoiseModel& noise, NoisePlacement placement = NoisePlacement::BeforeRotation,
                       unsigned threads = 0);

  /// Removes round(fraction * size) uniformly chosen pairs and tests the
  /// Phi+ fraction among them against `f_min`.
  MinimumFidelityCheck check_minimum_fidelity(double sacrifice_fraction, double f_min);

 private:
  Ensemble(std::vector<PairRecord> pairs, std::uint64_t seed, std::size_t chunks);

  std::vector<PairRecord> pairs_;
  std::uint64_t seed_;
  std::size_t chunks_;
  std::size_t round_ = 0;
  Rng shuffle_rng_;
};

struct McTrajectory {
  std::vector<RoundStats> rounds;  // rounds[0] describes the initial population
  bool halted = false;
};

McTrajectory run_protocol(Ensemble& ensemble, const NoiseModel& noise, std::size_t rounds,
                          NoisePlacement placement = NoisePlacement::BeforeRotation, unsigned threads = 0);

/// Total-variation distance between an empirical histogram and a state.
double total_variation(const std::array<std::size_t, 16>& histogram, const SubensembleState& state);

}  // namespace qpa::mc
