#include <algorithm>
#include <sstream>

#include "qpa/error.hpp"
#include "qpa/recurrence.hpp"

namespace qpa {

ThresholdReport find_thresholds(NoiseFamily family, const SubensembleState& initial,
                                const ThresholdOptions& options) {
  require(family != NoiseFamily::Explicit, "threshold scans need a parameterized noise family");
  require(options.lo >= 0.0 && options.hi <= 1.0 && options.lo < options.hi,
          "threshold range must satisfy 0 <= lo < hi <= 1");
  require(options.bisect_tol > 0.0, "bisect_tol must be positive");

  auto regime_at = [&](double x) {
    return classify_regime(NoiseModel::from_family(family, x), initial, options.placement, options.regime).regime;
  };

  ThresholdReport report{family, regime_at(options.lo), regime_at(options.hi), std::nullopt, std::nullopt};
  if (report.regime_at_lo == report.regime_at_hi) {
    std::ostringstream msg;
    msg << "regime is " << to_string(report.regime_at_lo) << " at both ends of [" << options.lo << ", "
        << options.hi << "]";
    fail(ErrorCode::NoThreshold, msg.str());
  }

  // Every evaluated point narrows the secure bracket too.
  double secure_lo = options.lo;
  double secure_hi = options.hi;
  auto note = [&](double x, Regime r) {
    if (r == Regime::PurifySecure) secure_hi = std::min(secure_hi, x);
    else secure_lo = std::max(secure_lo, x);
  };

  if (report.regime_at_lo == Regime::NoPurification) {
    double lo = options.lo;
    double hi = options.hi;
    while (hi - lo > options.bisect_tol) {
      const double mid = 0.5 * (lo + hi);
      const Regime r = regime_at(mid);
      note(mid, r);
      if (r == Regime::NoPurification) lo = mid;
      else hi = mid;
    }
    report.purify = Bracket{lo, hi};
  }

  if (report.regime_at_lo != Regime::PurifySecure && report.regime_at_hi == Regime::PurifySecure) {
    double lo = secure_lo;
    double hi = secure_hi;
    while (hi - lo > options.bisect_tol) {
      const double mid = 0.5 * (lo + hi);
      if (regime_at(mid) == Regime::PurifySecure) hi = mid;
      else lo = mid;
    }
    report.secure = Bracket{lo, hi};
  }
  return report;
}

}  // namespace qpa
