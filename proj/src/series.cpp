#include "retvol/series.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <string>

#include "retvol/errors.hpp"

namespace retvol::series {

namespace {

// strip trailing CR (CRLF input) and surrounding spaces
std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::int64_t parse_i64(std::string_view s, std::size_t line_no) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw MalformedRow("line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
  return v;
}

double parse_f64(std::string_view s, std::size_t line_no) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw MalformedRow("line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
  return v;
}

}  // namespace

PriceSeries load_prices(std::istream& in) {
  PriceSeries out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    std::size_t comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw MalformedRow("line " + std::to_string(line_no) + ": expected 'timestamp,price'");
    std::int64_t ts = parse_i64(trim(row.substr(0, comma)), line_no);
    double price = parse_f64(trim(row.substr(comma + 1)), line_no);
    if (!(price > 0.0))
      throw NonPositivePrice("line " + std::to_string(line_no) + ": price must be > 0");
    if (!out.timestamps.empty() && ts <= out.timestamps.back())
      throw NonMonotonicTimestamp("line " + std::to_string(line_no) +
                                  ": timestamps must strictly increase");
    out.timestamps.push_back(ts);
    out.prices.push_back(price);
  }
  if (out.prices.size() < 2) throw TooShort("need at least 2 price rows");
  return out;
}

std::vector<double> log_returns(const PriceSeries& p, int delta_steps) {
  const std::size_t n = p.prices.size();
  if (delta_steps < 1 || static_cast<std::size_t>(delta_steps) >= n)
    throw DeltaTooLarge("delta_steps must be in [1, length)");
  std::vector<double> out(n - delta_steps);
  for (std::size_t i = 0; i + delta_steps < n; ++i)
    out[i] = std::log(p.prices[i + delta_steps]) - std::log(p.prices[i]);
  return out;
}

ReturnSeries normalize(const std::vector<double>& raw, Origin origin) {
  const std::size_t n = raw.size();
  if (n < 2) throw TooShort("normalize needs at least 2 values");
  long double sum = 0.0L;
  for (double v : raw) sum += v;
  const double mean = static_cast<double>(sum / static_cast<long double>(n));
  long double ss = 0.0L;
  for (double v : raw) {
    const long double d = static_cast<long double>(v) - mean;
    ss += d * d;
  }
  const double sigma = std::sqrt(static_cast<double>(ss / static_cast<long double>(n)));
  if (!(sigma > 0.0)) throw ZeroVariance("constant input, population std is 0");
  ReturnSeries out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = (raw[i] - mean) / sigma;
  out.mean_removed = mean;
  out.sigma = sigma;
  out.origin = origin;
  return out;
}

IntradayProfile intraday_profile(const ReturnSeries& r, int steps_per_day, double floor) {
  if (steps_per_day < 1) throw BadParameters("steps_per_day must be >= 1");
  const std::size_t n = r.values.size();
  if (n < static_cast<std::size_t>(steps_per_day))
    throw TooShort("series shorter than one day");
  const std::size_t days = n / steps_per_day;  // trailing partial day dropped
  IntradayProfile prof;
  prof.floor = floor;
  prof.step_volatility.resize(steps_per_day);
  for (int k = 0; k < steps_per_day; ++k) {
    long double sum = 0.0L;
    for (std::size_t d = 0; d < days; ++d)
      sum += std::fabs(r.values[d * steps_per_day + k]);
    double m = static_cast<double>(sum / static_cast<long double>(days));
    prof.step_volatility[k] = m < floor ? floor : m;
  }
  return prof;
}

ReturnSeries remove_intraday(const ReturnSeries& r, const IntradayProfile& prof) {
  const std::size_t steps = prof.step_volatility.size();
  if (steps == 0 || r.values.size() % steps != 0)
    throw ProfileMismatch("profile length does not divide series length");
  std::vector<double> adjusted(r.values.size());
  for (std::size_t i = 0; i < r.values.size(); ++i)
    adjusted[i] = r.values[i] / prof.step_volatility[i % steps];
  return normalize(adjusted, r.origin);
}

}  // namespace retvol::series
