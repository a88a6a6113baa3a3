#include <cmath>

#include "doctest.h"
#include "qpa/error.hpp"
#include "qpa/monte_carlo.hpp"

using namespace qpa;
using namespace qpa::mc;

TEST_CASE("initial ensembles") {
  const auto pure = Ensemble::create({1, 0, 0, 0}, 10, FlagMode::Fixed, 1);
  CHECK(pure.size() == 10);
  for (const auto& p : pure.pairs()) CHECK(p == PairRecord(kPhiPlus, ErrorFlag{0, 0}));

  constexpr std::size_t n = 1'000'000;
  const auto bell = werner_bell(0.85);
  const auto e = Ensemble::create(bell, n, FlagMode::Fixed, 99);
  const auto h = e.histogram();
  for (unsigned b = 0; b < 4; ++b) {
    const double sigma = std::sqrt(bell[b] * (1 - bell[b]) / n);
    CHECK(std::abs(h[b] / double(n) - bell[b]) < 5 * sigma);
    for (unsigned f = 1; f < 4; ++f) CHECK(h[f * 4 + b] == 0);
  }

  const auto again = Ensemble::create(bell, n, FlagMode::Fixed, 99);
  CHECK(std::equal(e.pairs().begin(), e.pairs().end(), again.pairs().begin()));
  const auto other = Ensemble::create(bell, n, FlagMode::Fixed, 100);
  CHECK_FALSE(std::equal(e.pairs().begin(), e.pairs().end(), other.pairs().begin()));

  CHECK_THROWS_AS(Ensemble::create(bell, 1, FlagMode::Fixed, 1), Error);
}

TEST_CASE("random flags are uniform and independent of bells") {
  constexpr std::size_t n = 400'000;
  const auto e = Ensemble::create(werner_bell(0.85), n, FlagMode::Random, 5);
  const auto h = e.histogram();
  for (unsigned f = 0; f < 4; ++f) {
    const double p = 0.85 / 4;
    CHECK(std::abs(h[f * 4] / double(n) - p) < 5 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("packed records") {
  const PairRecord r(kPsiMinus, ErrorFlag{1, 0});
  CHECK(r.bell() == kPsiMinus);
  CHECK(r.flag() == ErrorFlag{1, 0});
  CHECK(r.category() == 2 * 4 + 3);
}

TEST_CASE("minimum fidelity check") {
  auto pure = Ensemble::create({1, 0, 0, 0}, 100'000, FlagMode::Fixed, 1);
  const auto c = pure.check_minimum_fidelity(0.1, 0.99);
  CHECK(c.passed);
  CHECK(c.estimate == 1.0);
  CHECK(c.sampled == 10'000);
  CHECK(pure.size() == 90'000);

  auto above = Ensemble::create(werner_bell(0.55), 1'000'000, FlagMode::Fixed, 2);
  const auto a = above.check_minimum_fidelity(0.1, 0.5);
  CHECK(a.passed);
  CHECK(a.lower < 0.55);
  CHECK(a.upper > 0.55);

  auto below = Ensemble::create(werner_bell(0.45), 1'000'000, FlagMode::Fixed, 3);
  CHECK_FALSE(below.check_minimum_fidelity(0.1, 0.5).passed);

  CHECK_THROWS_AS(pure.check_minimum_fidelity(0.0, 0.5), Error);
}

TEST_CASE("noiseless perfect pairs survive intact") {
  auto e = Ensemble::create({1, 0, 0, 0}, 1000, FlagMode::Fixed, 4);
  const auto s = e.run_round(NoiseModel::identity());
  CHECK(s.survivors == 500);
  CHECK(s.keep_fraction == 1.0);
  CHECK(s.fidelity == 1.0);
  CHECK(s.conditional_fidelity == 1.0);
  CHECK(s.histogram[0] == 500);
  CHECK(e.round() == 1);
}

TEST_CASE("tiny populations halt") {
  auto e = Ensemble::create({1, 0, 0, 0}, 2, FlagMode::Fixed, 1);
  const auto t = run_protocol(e, NoiseModel::identity(), 5);
  CHECK(t.halted);
  CHECK(t.rounds.size() == 2);
  try {
    e.run_round(NoiseModel::identity());
    FAIL("expected Halt");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::Halt);
  }
}

TEST_CASE("results do not depend on the thread count") {
  const auto noise = NoiseModel::uniform_residual(0.97);
  auto a = Ensemble::create(werner_bell(0.85), 200'000, FlagMode::Fixed, 17, 8);
  auto b = Ensemble::create(werner_bell(0.85), 200'000, FlagMode::Fixed, 17, 8);
  const auto ta = run_protocol(a, noise, 4, NoisePlacement::BeforeRotation, 1);
  const auto tb = run_protocol(b, noise, 4, NoisePlacement::BeforeRotation, 4);
  REQUIRE(ta.rounds.size() == tb.rounds.size());
  for (std::size_t n = 0; n < ta.rounds.size(); ++n) CHECK(ta.rounds[n].histogram == tb.rounds[n].histogram);
  CHECK(std::equal(a.pairs().begin(), a.pairs().end(), b.pairs().begin(), b.pairs().end()));
}

TEST_CASE("one round agrees with the recurrence in distribution") {
  const auto noise = NoiseModel::uniform_residual(0.97);
  const auto initial = SubensembleState::werner(0.85);
  const auto exact = one_round(initial, noise);
  auto e = Ensemble::create(werner_bell(0.85), 1'000'000, FlagMode::Fixed, 8);
  const auto s = e.run_round(noise);
  const double n = static_cast<double>(s.survivors);
  for (std::size_t k = 0; k < 16; ++k) {
    const double p = exact.state.coefficients()[k];
    CHECK(std::abs(s.histogram[k] / n - p) <= 5 * std::sqrt(p * (1 - p) / n) + 1e-12);
  }
  const double pairs = 500'000;
  const double sd_keep = std::sqrt(exact.keep_probability * (1 - exact.keep_probability) / pairs);
  CHECK(std::abs(s.keep_fraction - exact.keep_probability) < 5 * sd_keep);
  CHECK(total_variation(s.histogram, exact.state) < 5e-3);
}

TEST_CASE("total variation") {
  std::array<std::size_t, 16> h{};
  h[0] = 3;
  h[5] = 1;
  std::array<double, 16> p{};
  p[0] = 1.0;
  CHECK(total_variation(h, SubensembleState::from_coefficients(p)) == doctest::Approx(0.25));
}

TEST_CASE("ten million pairs: population decays, fidelity reaches the engine's") {
  const auto noise = NoiseModel::uniform_residual(0.97);
  auto e = Ensemble::create(werner_bell(0.85), 10'000'000, FlagMode::Fixed, 1);
  const auto t = run_protocol(e, noise, 10);
  REQUIRE(t.rounds.size() == 11);
  for (std::size_t n = 1; n < t.rounds.size(); ++n) {
    CHECK(t.rounds[n].survivors < t.rounds[n - 1].survivors);
    // Each round keeps at most half the population.
    CHECK(t.rounds[n].survivors <= t.rounds[n - 1].survivors / 2);
  }
  const auto engine = iterate(SubensembleState::werner(0.85), noise, NoisePlacement::BeforeRotation, {10, 0.0});
  const auto& last = t.rounds.back();
  CHECK(std::abs(last.fidelity - engine.final().fidelity) < 4 * last.stddev_fidelity);
}
