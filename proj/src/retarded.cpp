#include "retvol/retarded.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "retvol/errors.hpp"
#include "retvol/rng.hpp"

namespace retvol::retarded {

Kernel kernel_exponential(double m, double tau, int t_max) {
  if (!(tau > 0.0)) throw BadParameters("tau must be > 0");
  if (t_max < 1) throw BadParameters("t_max must be >= 1");
  Kernel k;
  k.values.resize(t_max);
  for (int t = 1; t <= t_max; ++t) k.values[t - 1] = m * std::exp(-t / tau);
  return k;
}

Kernel kernel_from_leverage(const estimators::LagCurve& L, double C) {
  if (L.kind != estimators::CurveKind::leverage)
    throw WrongCurveKind("kernel_from_leverage needs a leverage curve");
  if (!(C > 0.0)) throw BadParameters("C must be > 0");
  Kernel k;
  k.values.resize(L.max_lag);
  for (int t = 0; t < L.max_lag; ++t) k.values[t] = -(C / 2.0) * L.values[t];
  return k;
}

series::ReturnSeries simulate_feedback(const Kernel& k, const std::vector<double>& sigma_ref,
                                       std::uint64_t noise_seed, bool drop_burn_in) {
  const int T = k.t_max();
  const std::size_t n = sigma_ref.size();
  if (n < static_cast<std::size_t>(T) + 2)
    throw RefTooShort("reference volatility must have at least t_max + 2 points");
  for (double s : sigma_ref)
    if (!(s > 0.0)) throw BadParameters("reference volatility must be strictly positive");

  Rng rng(noise_seed);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    long double s = 0.0L;
    const int tmax = std::min<std::size_t>(T, i);
    for (int t = 1; t <= tmax; ++t) s += static_cast<long double>(k.values[t - 1]) * r[i - t];
    r[i] = (1.0 - static_cast<double>(s)) * sigma_ref[i] * rng.normal();
  }
  if (drop_burn_in && T > 0) r.erase(r.begin(), r.begin() + T);
  return series::normalize(r, series::Origin::simulated);
}

namespace {

struct SweepCounts {
  std::int64_t large = 0, terms = 0, nonpos = 0;
  double max_abs_sum = 0.0;
};

// shared pass for decouple and audit: fills r0_raw when given
SweepCounts decouple_sweep(const std::vector<double>& v, const Kernel& k,
                           std::vector<double>* r0_raw) {
  const int T = k.t_max();
  const std::size_t n = v.size();
  SweepCounts c;
  for (std::size_t i = 0; i < n; ++i) {
    long double s = 0.0L;
    const int tmax = std::min<std::size_t>(T, i);
    for (int t = 1; t <= tmax; ++t) {
      const double term = k.values[t - 1] * v[i - t];
      if (std::fabs(term) > 1.0) ++c.large;
      ++c.terms;
      s += term;
    }
    const double sd = static_cast<double>(s);
    if (std::fabs(sd) > c.max_abs_sum) c.max_abs_sum = std::fabs(sd);
    const double factor = 1.0 + sd;
    if (factor <= 0.0) ++c.nonpos;
    if (r0_raw) (*r0_raw)[i] = factor * v[i];
  }
  return c;
}

}  // namespace

DecoupleResult decouple(const series::ReturnSeries& r, const Kernel& k) {
  const std::size_t n = r.values.size();
  if (n <= static_cast<std::size_t>(k.t_max()))
    throw SeriesTooShort("series must be longer than the kernel");

  std::vector<double> raw(n);
  const SweepCounts c = decouple_sweep(r.values, k, &raw);

  DecoupleResult out;
  out.frac_large_terms =
      c.terms > 0 ? static_cast<double>(c.large) / static_cast<double>(c.terms) : 0.0;
  out.frac_factor_nonpositive = static_cast<double>(c.nonpos) / static_cast<double>(n);
  out.max_abs_sum = c.max_abs_sum;
  long double sum = 0.0L;
  for (double x : raw) sum += x;
  out.mean_pre_normalize = static_cast<double>(sum / static_cast<long double>(n));

  // bit-identical transform (zero kernel on any input) stays exact: skip the
  // re-normalization, which would otherwise churn last bits of an already
  // normalized series
  if (std::memcmp(raw.data(), r.values.data(), n * sizeof(double)) == 0) {
    out.r0 = r;
    out.r0.origin = series::Origin::decoupled;
  } else {
    out.r0 = series::normalize(raw, series::Origin::decoupled);
  }
  return out;
}

PerturbationAudit audit_perturbation(const series::ReturnSeries& r, const Kernel& k) {
  const std::size_t n = r.values.size();
  if (n <= static_cast<std::size_t>(k.t_max()))
    throw SeriesTooShort("series must be longer than the kernel");
  const SweepCounts c = decouple_sweep(r.values, k, nullptr);
  PerturbationAudit a;
  a.frac_large_terms =
      c.terms > 0 ? static_cast<double>(c.large) / static_cast<double>(c.terms) : 0.0;
  a.frac_factor_nonpositive = static_cast<double>(c.nonpos) / static_cast<double>(n);
  a.max_abs_sum = c.max_abs_sum;
  return a;
}

Calibration calibrate_C(const series::ReturnSeries& r, const estimators::LagCurve& L,
                        const std::vector<double>& c_grid) {
  if (c_grid.empty()) throw BadParameters("C grid is empty");
  for (double c : c_grid)
    if (!(c > 0.0)) throw BadParameters("C grid values must be > 0");
  std::vector<double> grid = c_grid;
  std::sort(grid.begin(), grid.end());  // ascending, so ties resolve to smaller C

  Calibration best;
  double best_score = std::numeric_limits<double>::infinity();
  for (double C : grid) {
    DecoupleResult d = decouple(r, kernel_from_leverage(L, C));
    estimators::LagCurve res = estimators::leverage_curve(d.r0, L.max_lag);
    long double score = 0.0L;
    for (int t = 0; t < res.max_lag; ++t) {
      if (res.stderrs[t] > 0.0) {
        const long double z = res.values[t] / res.stderrs[t];
        score += z * z;
      } else if (res.values[t] != 0.0) {
        score = std::numeric_limits<long double>::infinity();
        break;
      }
    }
    if (static_cast<double>(score) < best_score) {
      best_score = static_cast<double>(score);
      best.C = C;
      best.dec = std::move(d);
    }
  }
  return best;
}

}  // namespace retvol::retarded
