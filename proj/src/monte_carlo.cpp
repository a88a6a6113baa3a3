#include "qpa/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/math/distributions/binomial.hpp>

#include "qpa/error.hpp"
#include "qpa/lab_demon.hpp"

namespace qpa::mc {
namespace {

enum class Stage : std::uint32_t { Init = 1, Noise = 2, Shuffle = 3 };

Rng make_stream(std::uint64_t seed, Stage stage, std::uint64_t round, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage), static_cast<std::uint32_t>(round),
                    static_cast<std::uint32_t>(chunk)};
  return Rng(seq);
}

struct ChunkRange {
  std::size_t begin;
  std::size_t end;
};

/// Splits [0, n) into `chunks` contiguous ranges with even boundaries, so
/// adjacent (control, target) pairs never straddle two chunks.
std::vector<ChunkRange> split(std::size_t n, std::size_t chunks) {
  std::size_t per = (n + chunks - 1) / chunks;
  per += per % 2;
  std::vector<ChunkRange> out;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t b = std::min(n, c * per);
    const std::size_t e = std::min(n, b + per);
    out.push_back({b, e});
  }
  return out;
}

template <class Fn>
void for_each_chunk(std::size_t chunks, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t c = t; c < chunks; c += threads) fn(c);
    });
  }
  for (auto& th : pool) th.join();
}

RoundStats stats_of(std::span<const PairRecord> pairs, std::size_t round, std::size_t input, double keep_fraction) {
  RoundStats s{};
  s.round = round;
  s.input_pairs = input;
  s.survivors = pairs.size();
  s.keep_fraction = keep_fraction;
  s.histogram.fill(0);
  for (PairRecord r : pairs) ++s.histogram[r.category()];
  std::size_t phi = 0;
  std::size_t matched = 0;
  for (unsigned f = 0; f < 4; ++f) {
    phi += s.histogram[f * 4 + kPhiPlus.index()];
    matched += s.histogram[f * 4 + f];
  }
  if (s.survivors > 0) {
    const double n = static_cast<double>(s.survivors);
    s.fidelity = static_cast<double>(phi) / n;
    s.conditional_fidelity = static_cast<double>(matched) / n;
    s.stddev_fidelity = std::sqrt(s.fidelity * (1.0 - s.fidelity) / n);
    s.stddev_conditional = std::sqrt(s.conditional_fidelity * (1.0 - s.conditional_fidelity) / n);
  }
  return s;
}

}  // namespace

Ensemble::Ensemble(std::vector<PairRecord> pairs, std::uint64_t seed, std::size_t chunks)
    : pairs_(std::move(pairs)), seed_(seed), chunks_(chunks), shuffle_rng_(make_stream(seed, Stage::Shuffle, 0, 0)) {}

Ensemble Ensemble::create(const std::array<double, 4>& bell, std::size_t pairs, FlagMode mode, std::uint64_t seed,
                          std::size_t chunks) {
  require(pairs >= 2, "an ensemble needs at least two pairs");
  require(chunks >= 1, "chunk count must be positive");
  double sum = 0.0;
  for (double p : bell) {
    require(p >= 0.0 && std::isfinite(p), "Bell probabilities must be finite and nonnegative");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-12, "Bell probabilities must sum to 1");

  std::vector<PairRecord> records(pairs);
  const auto ranges = split(pairs, chunks);
  for_each_chunk(chunks, 0, [&](std::size_t c) {
    Rng rng = make_stream(seed, Stage::Init, 0, c);
    std::discrete_distribution<unsigned> pick_bell(bell.begin(), bell.end());
    std::uniform_int_distribution<unsigned> pick_flag(0, 3);
    for (std::size_t k = ranges[c].begin; k < ranges[c].end; ++k) {
      const BellLabel b = BellLabel::from_index(pick_bell(rng));
      const ErrorFlag f = mode == FlagMode::Fixed ? ErrorFlag{} : ErrorFlag::from_index(pick_flag(rng));
      records[k] = PairRecord(b, f);
    }
  });
  return Ensemble(std::move(records), seed, chunks);
}

Ensemble Ensemble::from_records(std::vector<PairRecord> records, std::uint64_t seed, std::size_t chunks) {
  require(chunks >= 1, "chunk count must be positive");
  return Ensemble(std::move(records), seed, chunks);
}

std::array<std::size_t, 16> Ensemble::histogram() const {
  std::array<std::size_t, 16> h{};
  for (PairRecord r : pairs_) ++h[r.category()];
  return h;
}

RoundStats Ensemble::snapshot() const { return stats_of(pairs_, round_, pairs_.size(), 1.0); }

RoundStats Ensemble::run_round(const NoiseModel& noise, NoisePlacement placement, unsigned threads) {
  if (pairs_.size() < 2) {
    std::ostringstream msg;
    msg << "cannot run round " << round_ + 1 << " with " << pairs_.size() << " pair(s)";
    fail(ErrorCode::Halt, msg.str());
  }
  const std::size_t round = round_ + 1;
  const std::size_t input = pairs_.size();

  // Noise and rotation, recorded on bell and flag alike.
  auto ranges = split(pairs_.size(), chunks_);
  for_each_chunk(chunks_, threads, [&](std::size_t c) {
    Rng rng = make_stream(seed_, Stage::Noise, round, c);
    for (std::size_t k = ranges[c].begin; k < ranges[c].end; ++k) {
      const auto [alice, bob] = noise.sample(rng);
      const BellLabel b = pairs_[k].bell();
      const BellLabel nb = placement == NoisePlacement::BeforeRotation ? rotate(apply_two_sided_pauli(b, alice, bob))
                                                                       : apply_two_sided_pauli(rotate(b), alice, bob);
      pairs_[k] = PairRecord(nb, record_two_sided(pairs_[k].flag(), alice, bob));
    }
  });

  std::shuffle(pairs_.begin(), pairs_.end(), shuffle_rng_);

  // Adjacent records form (control, target); an odd leftover is dropped.
  pairs_.resize(pairs_.size() - pairs_.size() % 2);
  ranges = split(pairs_.size(), chunks_);
  std::vector<std::vector<PairRecord>> kept(chunks_);
  for_each_chunk(chunks_, threads, [&](std::size_t c) {
    auto& out = kept[c];
    out.reserve((ranges[c].end - ranges[c].begin) / 2);
    for (std::size_t k = ranges[c].begin; k + 1 < ranges[c].end; k += 2) {
      const PairRecord control = pairs_[k];
      const PairRecord target = pairs_[k + 1];
      const BellPair after = bcnot(control.bell(), target.bell());
      if (!coincides(after.target)) continue;
      out.emplace_back(after.source, flag_update(control.flag(), target.flag()));
    }
  });

  const std::size_t attempts = pairs_.size() / 2;
  pairs_.clear();
  for (const auto& part : kept) pairs_.insert(pairs_.end(), part.begin(), part.end());
  round_ = round;
  return stats_of(pairs_, round, input, static_cast<double>(pairs_.size()) / static_cast<double>(attempts));
}

MinimumFidelityCheck Ensemble::check_minimum_fidelity(double sacrifice_fraction, double f_min) {
  require(sacrifice_fraction > 0.0 && sacrifice_fraction < 1.0, "sacrifice fraction must lie in (0, 1)");
  const auto k = static_cast<std::size_t>(std::llround(sacrifice_fraction * static_cast<double>(pairs_.size())));
  require(k > 0, "sacrifice set is empty");

  // Partial Fisher-Yates: move k random records to the tail, then drop them.
  const std::size_t n = pairs_.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1 - i);
    std::swap(pairs_[pick(shuffle_rng_)], pairs_[n - 1 - i]);
  }
  std::size_t successes = 0;
  for (std::size_t i = n - k; i < n; ++i) successes += pairs_[i].bell() == kPhiPlus ? 1 : 0;
  pairs_.resize(n - k);

  using boost::math::binomial_distribution;
  const double trials = static_cast<double>(k);
  const double hits = static_cast<double>(successes);
  const double alpha = 0.01 / 2.0;
  MinimumFidelityCheck check{};
  check.sampled = k;
  check.successes = successes;
  check.estimate = hits / trials;
  check.lower = binomial_distribution<>::find_lower_bound_on_p(trials, hits, alpha);
  check.upper = binomial_distribution<>::find_upper_bound_on_p(trials, hits, alpha);
  check.passed = check.lower > f_min;
  return check;
}

McTrajectory run_protocol(Ensemble& ensemble, const NoiseModel& noise, std::size_t rounds, NoisePlacement placement,
                          unsigned threads) {
  McTrajectory t;
  t.rounds.push_back(ensemble.snapshot());
  for (std::size_t n = 0; n < rounds; ++n) {
    if (ensemble.size() < 2) {
      t.halted = true;
      break;
    }
    t.rounds.push_back(ensemble.run_round(noise, placement, threads));
  }
  return t;
}

double total_variation(const std::array<std::size_t, 16>& histogram, const SubensembleState& state) {
  const double n = static_cast<double>(std::accumulate(histogram.begin(), histogram.end(), std::size_t{0}));
  require(n > 0, "empty histogram");
  double tv = 0.0;
  for (std::size_t k = 0; k < 16; ++k) tv += std::abs(static_cast<double>(histogram[k]) / n - state.coefficients()[k]);
  return 0.5 * tv;
}

}  // namespace qpa::mc
