#include "retvol/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "retvol/errors.hpp"

namespace retvol::estimators {

namespace {

void check_lag_args(std::size_t n, int max_lag, bool need_two_left) {
  if (max_lag < 1) throw LagTooLarge("max_lag must be >= 1");
  if (static_cast<std::size_t>(max_lag) >= n)
    throw LagTooLarge("max_lag must be < series length");
  if (need_two_left && n - static_cast<std::size_t>(max_lag) < 2)
    throw LagTooLarge("series leaves fewer than 2 samples at max_lag");
}

double pop_std_of_summands(const double* s, std::size_t n, double mean) {
  long double ss = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = static_cast<long double>(s[i]) - mean;
    ss += d * d;
  }
  return std::sqrt(static_cast<double>(ss / static_cast<long double>(n)));
}

}  // namespace

std::vector<double> TailHistogram::centers() const {
  std::vector<double> c(bin_counts.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = std::sqrt(bin_edges[i] * bin_edges[i + 1]);
  return c;
}

LagCurve leverage_curve_conditional(const series::ReturnSeries& r, int max_lag,
                                    double threshold, bool global_z) {
  const auto& v = r.values;
  const std::size_t n = v.size();
  check_lag_args(n, max_lag, true);
  if (!(threshold > 0.0)) throw BadParameters("threshold must be > 0");

  std::vector<char> admit(n);
  for (std::size_t i = 0; i < n; ++i) admit[i] = std::fabs(v[i]) < threshold ? 1 : 0;

  // Z = <|r|^2>^2 over the admitted set (or the full series with global_z)
  long double zsum = 0.0L;
  std::size_t zcount = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (global_z || admit[i]) {
      zsum += static_cast<long double>(v[i]) * v[i];
      ++zcount;
    }
  }
  if (zcount == 0) throw EmptyCondition("no samples pass the threshold");
  const double z_mean = static_cast<double>(zsum / static_cast<long double>(zcount));
  const double Z = z_mean * z_mean;

  LagCurve out;
  out.max_lag = max_lag;
  out.kind = CurveKind::leverage;
  out.values.resize(max_lag);
  out.counts.resize(max_lag);
  out.stderrs.resize(max_lag);
  std::vector<double> summands;
  summands.reserve(n);
  for (int t = 1; t <= max_lag; ++t) {
    summands.clear();
    long double acc = 0.0L;
    for (std::size_t i = 0; i + t < n; ++i) {
      if (!admit[i]) continue;
      const double s = v[i] * v[i + t] * v[i + t] / Z;
      acc += s;
      summands.push_back(s);
    }
    if (summands.empty()) throw EmptyCondition("no admissible starts at lag " + std::to_string(t));
    const std::size_t cnt = summands.size();
    const double mean = static_cast<double>(acc / static_cast<long double>(cnt));
    out.values[t - 1] = mean;
    out.counts[t - 1] = static_cast<std::int64_t>(cnt);
    out.stderrs[t - 1] =
        pop_std_of_summands(summands.data(), cnt, mean) / std::sqrt(static_cast<double>(cnt));
  }
  return out;
}

LagCurve leverage_curve(const series::ReturnSeries& r, int max_lag) {
  return leverage_curve_conditional(r, max_lag, kInf, false);
}

LagCurve volatility_autocorrelation(const series::ReturnSeries& r, int max_lag) {
  const auto& v = r.values;
  const std::size_t n = v.size();
  check_lag_args(n, max_lag, true);

  long double s1 = 0.0L, s2 = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double a = std::fabs(v[i]);
    s1 += a;
    s2 += a * a;
  }
  const double m1 = static_cast<double>(s1 / static_cast<long double>(n));
  const double m2 = static_cast<double>(s2 / static_cast<long double>(n));
  const double a0 = m2 - m1 * m1;
  if (!(a0 > 0.0)) throw ZeroVariance("constant |r|, autocorrelation undefined");

  LagCurve out;
  out.max_lag = max_lag;
  out.kind = CurveKind::autocorrelation;
  out.values.resize(max_lag);
  out.counts.resize(max_lag);
  out.stderrs.resize(max_lag);
  std::vector<double> summands(n);
  for (int t = 1; t <= max_lag; ++t) {
    const std::size_t cnt = n - t;
    long double acc = 0.0L;
    for (std::size_t i = 0; i + t < n; ++i) {
      const double s = (std::fabs(v[i]) * std::fabs(v[i + t]) - m1 * m1) / a0;
      acc += s;
      summands[i] = s;
    }
    const double mean = static_cast<double>(acc / static_cast<long double>(cnt));
    out.values[t - 1] = mean;
    out.counts[t - 1] = static_cast<std::int64_t>(cnt);
    out.stderrs[t - 1] =
        pop_std_of_summands(summands.data(), cnt, mean) / std::sqrt(static_cast<double>(cnt));
  }
  return out;
}

LagCurve persistence_curve(const series::ReturnSeries& r, int max_lag, PersistSide side) {
  const auto& v = r.values;
  const std::size_t n = v.size();
  if (max_lag < 1) throw LagTooLarge("max_lag must be >= 1");
  if (static_cast<std::size_t>(max_lag) >= n)
    throw LagTooLarge("max_lag must be < series length");

  LagCurve out;
  out.max_lag = max_lag;
  out.kind = side == PersistSide::below ? CurveKind::persistence_below
                                        : CurveKind::persistence_above;
  out.values.resize(max_lag);
  out.counts.resize(max_lag);
  out.stderrs.resize(max_lag);

  // alive[i]: |r| stayed strictly on the requested side of |r(i)| so far
  std::vector<char> alive(n, 1);
  for (int t = 1; t <= max_lag; ++t) {
    const std::size_t cnt = n - t;
    std::size_t survivors = 0;
    for (std::size_t i = 0; i < cnt; ++i) {
      if (alive[i]) {
        const double ref = std::fabs(v[i]);
        const double cur = std::fabs(v[i + t]);
        const bool ok = side == PersistSide::below ? cur < ref : cur > ref;
        if (!ok) alive[i] = 0;
      }
      survivors += alive[i];
    }
    const double p = static_cast<double>(survivors) / static_cast<double>(cnt);
    out.values[t - 1] = p;
    out.counts[t - 1] = static_cast<std::int64_t>(cnt);
    out.stderrs[t - 1] = std::sqrt(p * (1.0 - p) / static_cast<double>(cnt));
  }
  return out;
}

LagCurve smooth_lag_window(const LagCurve& c, int window) {
  if (window < 1 || window % 2 == 0) throw BadParameters("window must be a positive odd integer");
  if (window > c.max_lag) throw WindowTooLarge("window exceeds max_lag");
  LagCurve out = c;
  const int n = c.max_lag;
  const int h = window / 2;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - h);
    const int hi = std::min(n - 1, i + h);  // truncated at the edges
    long double acc = 0.0L, eacc = 0.0L;
    std::int64_t cmin = c.counts[lo];
    for (int j = lo; j <= hi; ++j) {
      acc += c.values[j];
      eacc += c.stderrs[j];
      cmin = std::min(cmin, c.counts[j]);
    }
    const double w = static_cast<double>(hi - lo + 1);
    out.values[i] = static_cast<double>(acc) / w;
    out.stderrs[i] = static_cast<double>(eacc) / w;
    out.counts[i] = cmin;
  }
  return out;
}

TailHistogram tail_histogram(const series::ReturnSeries& r, Side side, int bins_per_decade) {
  if (bins_per_decade < 1) throw BadParameters("bins_per_decade must be >= 1");
  const auto& rv = r.values;
  std::vector<double> v;
  v.reserve(rv.size());
  for (double x : rv) {
    if (side == Side::positive && x > 0.0) v.push_back(x);
    if (side == Side::negative && x < 0.0) v.push_back(-x);
  }
  if (v.empty()) throw EmptySide("no samples on the requested side");

  const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
  const double vmin = *mn_it, vmax = *mx_it;

  TailHistogram h;
  h.side = side;
  h.total_count = static_cast<std::int64_t>(rv.size());
  if (vmin == vmax) {
    // single distinct magnitude: one bin of one nominal bin-width around it
    const double f = std::pow(10.0, 0.5 / bins_per_decade);
    h.bin_edges = {vmin / f, vmin * f};
  } else {
    const double span = std::log10(vmax / vmin);
    const int nb = std::max(1, static_cast<int>(std::ceil(span * bins_per_decade - 1e-9)));
    h.bin_edges.resize(nb + 1);
    for (int i = 0; i <= nb; ++i)
      h.bin_edges[i] = vmin * std::pow(vmax / vmin, static_cast<double>(i) / nb);
    h.bin_edges.front() = vmin;
    h.bin_edges.back() = vmax;
  }
  const std::size_t nb = h.bin_edges.size() - 1;
  h.bin_counts.assign(nb, 0);
  for (double x : v) {
    auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), x);
    std::size_t idx = static_cast<std::size_t>(std::distance(h.bin_edges.begin(), it));
    idx = idx == 0 ? 0 : idx - 1;
    if (idx >= nb) idx = nb - 1;  // top edge closed
    ++h.bin_counts[idx];
  }
  h.densities.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const double width = h.bin_edges[i + 1] - h.bin_edges[i];
    h.densities[i] = static_cast<double>(h.bin_counts[i]) /
                     (static_cast<double>(h.total_count) * width);
  }
  return h;
}

TailFit fit_power_law_xy(const std::vector<double>& x, const std::vector<double>& y,
                         double range_lo, double range_hi) {
  if (!(range_lo < range_hi)) throw BadParameters("fit range must satisfy lo < hi");
  if (x.size() != y.size()) throw BadParameters("x/y size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < range_lo || x[i] > range_hi) continue;
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;  // non-positive points are skipped
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const std::size_t n = lx.size();
  if (n < 3) throw InsufficientPoints("fewer than 3 positive points in fit range");

  long double sx = 0.0L, sy = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = static_cast<double>(sx / static_cast<long double>(n));
  const double my = static_cast<double>(sy / static_cast<long double>(n));
  long double sxx = 0.0L, sxy = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double dx = lx[i] - mx;
    sxx += dx * dx;
    sxy += dx * (ly[i] - my);
  }
  if (!(sxx > 0.0L)) throw InsufficientPoints("degenerate x values in fit range");
  const double slope = static_cast<double>(sxy / sxx);
  long double rss = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double resid = (ly[i] - my) - slope * (lx[i] - mx);
    rss += resid * resid;
  }
  TailFit f;
  f.exponent = -slope;
  f.stderr_ = n > 2 ? std::sqrt(static_cast<double>(rss / static_cast<long double>(n - 2) / sxx))
                    : 0.0;
  f.range_lo = range_lo;
  f.range_hi = range_hi;
  f.n_points_used = static_cast<int>(n);
  return f;
}

TailFit fit_power_law(const LagCurve& c, double range_lo, double range_hi) {
  std::vector<double> x(c.max_lag);
  for (int t = 1; t <= c.max_lag; ++t) x[t - 1] = static_cast<double>(t);
  return fit_power_law_xy(x, c.values, range_lo, range_hi);
}

TailFit fit_power_law(const TailHistogram& h, double range_lo, double range_hi) {
  return fit_power_law_xy(h.centers(), h.densities, range_lo, range_hi);
}

}  // namespace retvol::estimators
