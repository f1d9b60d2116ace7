#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "retvol/series.hpp"

namespace retvol::estimators {

enum class CurveKind { leverage, autocorrelation, persistence_below, persistence_above };

struct LagCurve {
  int max_lag = 0;
  std::vector<double> values;        // indexed by lag-1, t = 1..max_lag
  std::vector<std::int64_t> counts;  // samples entering each lag
  std::vector<double> stderrs;       // standard error of each value (plumbing, see README)
  CurveKind kind = CurveKind::leverage;
};

enum class Side { positive, negative };

struct TailHistogram {
  Side side = Side::positive;
  std::vector<double> bin_edges;          // log-spaced, strictly increasing, size = bins+1
  std::vector<double> densities;          // count / (total_count * bin_width)
  std::vector<std::int64_t> bin_counts;
  std::int64_t total_count = 0;           // full series length (both sides)
  std::vector<double> centers() const;    // geometric bin midpoints
};

struct TailFit {
  double exponent = 0.0;  // minus the log-log slope
  double stderr_ = 0.0;
  double range_lo = 0.0, range_hi = 0.0;
  int n_points_used = 0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// L(t) = <r(t') |r(t'+t)|^2> / Z, Z = <|r|^2>^2 over the full series.
// Throws LagTooLarge (max_lag < 1, max_lag >= N, or N - max_lag < 2).
LagCurve leverage_curve(const series::ReturnSeries& r, int max_lag);

// Same, but the t' average (and by default the Z-defining set) is restricted to
// |r(t')| < threshold. global_z keeps Z over the full series instead.
// threshold = kInf reproduces leverage_curve bitwise. Throws EmptyCondition.
LagCurve leverage_curve_conditional(const series::ReturnSeries& r, int max_lag,
                                    double threshold, bool global_z = false);

// A(t) = [<|r(t')||r(t'+t)|> - <|r|>^2] / A0, A0 = <|r|^2> - <|r|>^2.
// Throws ZeroVariance when |r| is constant.
LagCurve volatility_autocorrelation(const series::ReturnSeries& r, int max_lag);

// P(t): fraction of starts t' whose next t volatilities all stay strictly
// below (side below) or strictly above (side above) |r(t')|. Ties fail.
enum class PersistSide { below, above };
LagCurve persistence_curve(const series::ReturnSeries& r, int max_lag, PersistSide side);

// centered boxcar over the lag axis, truncated at the edges; counts propagate
// as the window minimum, stderrs as the window mean. window must be odd.
LagCurve smooth_lag_window(const LagCurve& c, int window);

// log-spaced histogram of r > 0 (positive side) or -r for r < 0 (negative side).
// Zeros belong to neither side. Throws EmptySide.
TailHistogram tail_histogram(const series::ReturnSeries& r, Side side, int bins_per_decade = 20);

// least squares on (log x, log y); non-positive y inside the range are skipped,
// InsufficientPoints if fewer than 3 remain. exponent = -slope.
TailFit fit_power_law_xy(const std::vector<double>& x, const std::vector<double>& y,
                         double range_lo, double range_hi);
TailFit fit_power_law(const LagCurve& c, double range_lo, double range_hi);
TailFit fit_power_law(const TailHistogram& h, double range_lo, double range_hi);

}  // namespace retvol::estimators
