#include <algorithm>
#include <cmath>
#include <sstream>

#include "qpa/error.hpp"
#include "qpa/recurrence.hpp"

namespace qpa {
namespace {

struct LineFit {
  double slope;
  double intercept;
  double residual_rms;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y, std::size_t begin,
                      std::size_t end) {
  const double n = static_cast<double>(end - begin);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = begin; k < end; ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    const double r = y[k] - (intercept + slope * x[k]);
    ss += r * r;
  }
  return {slope, intercept, std::sqrt(ss / n)};
}

}  // namespace

ExponentFit fit_exponent(const std::vector<double>& distance, const ExponentOptions& options, double extra_floor) {
  const double floor = std::max(options.floor, extra_floor);
  std::size_t first = distance.size();
  for (std::size_t n = 0; n < distance.size(); ++n) {
    if (distance[n] <= options.tail_ceiling && distance[n] > floor) {
      first = n;
      break;
    }
  }
  std::vector<double> rounds;
  std::vector<double> logs;
  for (std::size_t n = first; n < distance.size() && distance[n] > floor; ++n) {
    rounds.push_back(static_cast<double>(n));
    logs.push_back(std::log(distance[n]));
  }
  if (rounds.size() < std::max<std::size_t>(options.min_tail, 2)) {
    std::ostringstream msg;
    msg << "only " << rounds.size() << " tail points in (" << floor << ", " << options.tail_ceiling
        << "], need " << options.min_tail;
    fail(ErrorCode::InsufficientTail, msg.str());
  }
  const LineFit all = least_squares(rounds, logs, 0, rounds.size());
  ExponentFit fit{-all.slope, all.intercept, all.residual_rms, rounds.size(), first, 0.0, true};
  const std::size_t half = rounds.size() / 2;
  if (half >= 2 && rounds.size() - half >= 2) {
    const double s1 = least_squares(rounds, logs, 0, half).slope;
    const double s2 = least_squares(rounds, logs, half, rounds.size()).slope;
    fit.slope_drift = std::abs(s2 - s1) / std::max(std::abs(all.slope), 1e-300);
  }
  fit.constant_slope = fit.slope_drift < 0.1;
  return fit;
}

ConvergenceExponents convergence_exponents(const Trajectory& t, const ExponentOptions& options) {
  if (t.records.size() < 2) fail(ErrorCode::InsufficientTail, "trajectory has fewer than two records");
  const double f_inf = t.final().fidelity;
  std::vector<double> df;
  std::vector<double> dc;
  // The last record defines F_inf and is left out of the fidelity series.
  for (std::size_t n = 0; n + 1 < t.records.size(); ++n) {
    df.push_back(std::abs(f_inf - t.records[n].fidelity));
  }
  for (const auto& r : t.records) dc.push_back(1.0 - r.conditional_fidelity);
  // F_inf is only known to about the last per-round change.
  return {fit_exponent(df, options, 100.0 * t.last_change), fit_exponent(dc, options)};
}

}  // namespace qpa
