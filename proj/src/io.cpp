#include "retvol/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <system_error>

#include "retvol/errors.hpp"

namespace retvol::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

// splits a data line on commas; returns false for blank/comment lines
bool split_row(const std::string& line, std::vector<std::string_view>& fields) {
  std::string_view row = trim(line);
  if (row.empty() || row.front() == '#') return false;
  fields.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t comma = row.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(row.substr(start)));
      break;
    }
    fields.push_back(trim(row.substr(start, comma - start)));
    start = comma + 1;
  }
  return true;
}

double to_f64(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw MalformedRow("bad number '" + std::string(s) + "'");
  return v;
}

std::int64_t to_i64(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw MalformedRow("bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, p);
}

double parse_double(const std::string& s) { return to_f64(s); }

std::string write_return_series(const series::ReturnSeries& r) {
  std::string out;
  out.reserve(r.values.size() * 28);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += fmt_double(r.values[i]);
    out += '\n';
  }
  return out;
}

series::ReturnSeries read_return_series(std::istream& in) {
  series::ReturnSeries r;
  std::string line;
  std::vector<std::string_view> f;
  while (std::getline(in, line)) {
    if (!split_row(line, f)) continue;
    if (f.size() != 2) throw MalformedRow("expected 'index,value'");
    to_i64(f[0]);  // index column, validated but positions are implicit
    r.values.push_back(to_f64(f[1]));
  }
  if (r.values.size() < 2) throw TooShort("return series needs at least 2 rows");
  return r;
}

std::string write_lag_curve(const estimators::LagCurve& c) {
  std::string out;
  out.reserve(c.values.size() * 48);
  for (int t = 1; t <= c.max_lag; ++t) {
    out += std::to_string(t);
    out += ',';
    out += fmt_double(c.values[t - 1]);
    out += ',';
    out += std::to_string(c.counts[t - 1]);
    out += ',';
    out += fmt_double(c.stderrs[t - 1]);
    out += '\n';
  }
  return out;
}

estimators::LagCurve read_lag_curve(std::istream& in, estimators::CurveKind kind) {
  estimators::LagCurve c;
  c.kind = kind;
  std::string line;
  std::vector<std::string_view> f;
  while (std::getline(in, line)) {
    if (!split_row(line, f)) continue;
    if (f.size() != 4) throw MalformedRow("expected 'lag,value,count,stderr'");
    const std::int64_t lag = to_i64(f[0]);
    if (lag != static_cast<std::int64_t>(c.values.size()) + 1)
      throw MalformedRow("lags must run 1..max_lag");
    c.values.push_back(to_f64(f[1]));
    c.counts.push_back(to_i64(f[2]));
    c.stderrs.push_back(to_f64(f[3]));
  }
  c.max_lag = static_cast<int>(c.values.size());
  if (c.max_lag == 0) throw TooShort("empty lag curve");
  return c;
}

std::string write_tail_histogram(const estimators::TailHistogram& h) {
  std::string out;
  const std::vector<double> centers = h.centers();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    out += fmt_double(centers[i]);
    out += ',';
    out += fmt_double(h.densities[i]);
    out += ',';
    out += std::to_string(h.bin_counts[i]);
    out += '\n';
  }
  return out;
}

TailHistogramRows read_tail_histogram(std::istream& in) {
  TailHistogramRows rows;
  std::string line;
  std::vector<std::string_view> f;
  while (std::getline(in, line)) {
    if (!split_row(line, f)) continue;
    if (f.size() != 3) throw MalformedRow("expected 'bin_center,density,count'");
    rows.centers.push_back(to_f64(f[0]));
    rows.densities.push_back(to_f64(f[1]));
    rows.counts.push_back(to_i64(f[2]));
  }
  return rows;
}

std::string write_kernel(const retarded::Kernel& k) {
  std::string out;
  for (int t = 1; t <= k.t_max(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += fmt_double(k.values[t - 1]);
    out += '\n';
  }
  return out;
}

retarded::Kernel read_kernel(std::istream& in) {
  retarded::Kernel k;
  std::string line;
  std::vector<std::string_view> f;
  while (std::getline(in, line)) {
    if (!split_row(line, f)) continue;
    if (f.size() != 2) throw MalformedRow("expected 'lag,K'");
    const std::int64_t lag = to_i64(f[0]);
    if (lag != static_cast<std::int64_t>(k.values.size()) + 1)
      throw MalformedRow("lags must run 1..t_max");
    k.values.push_back(to_f64(f[1]));
  }
  return k;
}

std::string write_tail_fit(const estimators::TailFit& f) {
  nlohmann::json j;
  j["exponent"] = f.exponent;
  j["stderr"] = f.stderr_;
  j["range"] = {f.range_lo, f.range_hi};
  j["n"] = f.n_points_used;
  return j.dump(2) + "\n";
}

estimators::TailFit read_tail_fit(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  estimators::TailFit f;
  f.exponent = j.at("exponent").get<double>();
  f.stderr_ = j.at("stderr").get<double>();
  f.range_lo = j.at("range").at(0).get<double>();
  f.range_hi = j.at("range").at(1).get<double>();
  f.n_points_used = j.at("n").get<int>();
  return f;
}

std::string write_decouple_report(double C, const retarded::DecoupleResult& d) {
  nlohmann::json j;
  j["C"] = C;
  j["frac_large_terms"] = d.frac_large_terms;
  j["frac_factor_nonpositive"] = d.frac_factor_nonpositive;
  j["mean_decoupled"] = d.mean_pre_normalize;
  return j.dump(2) + "\n";
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace retvol::io
