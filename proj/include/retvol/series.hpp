#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace retvol::series {

enum class Interval { daily, minutely };

struct PriceSeries {
  std::vector<std::int64_t> timestamps;  // epoch seconds, strictly increasing
  std::vector<double> prices;            // all > 0
  Interval interval = Interval::daily;
  int step_minutes = 1;      // minutely only
  int minutes_per_day = 0;   // minutely only, 0 = unset
};

enum class Origin { observed, simulated, decoupled };

struct ReturnSeries {
  std::vector<double> values;  // mean 0, population std 1
  double mean_removed = 0.0;   // the mean subtracted by normalize
  double sigma = 1.0;          // the population std divided by
  Origin origin = Origin::observed;
};

struct IntradayProfile {
  std::vector<double> step_volatility;  // one entry per intraday step, all >= floor
  double floor = 1e-8;
};

// CSV lines "timestamp,price", '#' comments, LF or CRLF.
// Throws MalformedRow, NonPositivePrice, NonMonotonicTimestamp, TooShort.
PriceSeries load_prices(std::istream& in);

// out[i] = ln(price[i+delta]) - ln(price[i]). Throws DeltaTooLarge.
std::vector<double> log_returns(const PriceSeries& p, int delta_steps = 1);

// (raw - mean) / population std. Throws TooShort (length < 2), ZeroVariance.
ReturnSeries normalize(const std::vector<double>& raw, Origin origin = Origin::observed);

// mean |r| per intraday step across whole days, clamped below at floor.
// Trailing partial day is dropped. Throws TooShort.
IntradayProfile intraday_profile(const ReturnSeries& r, int steps_per_day, double floor = 1e-8);

// divide each value by its step volatility, then re-normalize.
// Throws ProfileMismatch; ZeroVariance propagates from normalize.
ReturnSeries remove_intraday(const ReturnSeries& r, const IntradayProfile& prof);

}  // namespace retvol::series
