#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "retvol/estimators.hpp"
#include "retvol/retarded.hpp"
#include "retvol/series.hpp"

namespace retvol::io {

// doubles at 17 significant digits (round-trip exact), locale-free
std::string fmt_double(double v);
double parse_double(const std::string& s);  // throws MalformedRow

// ReturnSeries CSV: "index,value"
std::string write_return_series(const series::ReturnSeries& r);
series::ReturnSeries read_return_series(std::istream& in);

// LagCurve CSV: "lag,value,count,stderr"
std::string write_lag_curve(const estimators::LagCurve& c);
estimators::LagCurve read_lag_curve(std::istream& in, estimators::CurveKind kind);

// TailHistogram CSV: "bin_center,density,count"
std::string write_tail_histogram(const estimators::TailHistogram& h);
struct TailHistogramRows {
  std::vector<double> centers, densities;
  std::vector<std::int64_t> counts;
};
TailHistogramRows read_tail_histogram(std::istream& in);

// Kernel CSV: "lag,K"
std::string write_kernel(const retarded::Kernel& k);
retarded::Kernel read_kernel(std::istream& in);

// TailFit JSON: {"exponent":..., "stderr":..., "range":[lo,hi], "n":...}
std::string write_tail_fit(const estimators::TailFit& f);
estimators::TailFit read_tail_fit(const std::string& json_text);

// DecoupleReport JSON: {"C","frac_large_terms","frac_factor_nonpositive","mean_decoupled"}
std::string write_decouple_report(double C, const retarded::DecoupleResult& d);

// write-temp-then-rename so partial files never appear under the final name
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

// whole file as string; throws InputError if unreadable
std::string read_file(const std::filesystem::path& path);

}  // namespace retvol::io
