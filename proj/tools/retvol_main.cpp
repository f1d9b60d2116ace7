// retvol: measure return-volatility correlation and related stylized facts,
// generate the effect with a retarded-volatility feedback kernel, or strip it
// from a series via the sign-reversed decoupling transform.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "retvol/errors.hpp"
#include "retvol/estimators.hpp"
#include "retvol/generators.hpp"
#include "retvol/io.hpp"
#include "retvol/retarded.hpp"
#include "retvol/series.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace retvol;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Cfg {
  std::string command;
  std::string input;
  std::string input_kind = "prices";  // prices | returns
  std::string out_dir;
  int max_lag = 64;
  std::uint64_t seed = 12345;
  int delta = 1;
  int steps_per_day = 0;   // 0 = daily data
  int smooth_days = -1;    // -1 = auto: 4 for minutely, off for daily
  int bins_per_decade = 20;
  double lag_fit_min = 1.0, lag_fit_max = 50.0;     // A(t) and P(t) fits
  double tail_fit_min = 1.5, tail_fit_max = 5.0;    // tail PDF fits
  std::string thresholds = "2,8,inf";
  bool global_z = false;
  // kernel / model
  double m = 0.1;
  double tau = 40.0;
  int tmax = 64;
  std::string c_grid = "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5";
  int kernel_smooth = 7;  // lag window applied to L(t) before kernel_from_leverage, 1 = off
  bool burn_in_simulate = true;
  bool burn_in_decouple = false;
  // generators
  std::string generator = "gaussianUnit";
  std::int64_t length = 100000;
  int n_agents = 10000;
  double a = 0.3;
  double hurst = 0.85;
  double nu = 0.5;
  std::string sigma_file;
  std::string config_file;
  bool split_days = false;  // reserved
};

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

// seeds defaults from a --config key=value file for flags the user did not
// pass explicitly. flat keys apply to the invoked subcommand; [section] keys
// only when the section names it. keys a subcommand does not know are skipped,
// so one file can serve several subcommands.
void inject_config_defaults(const CLI::App& app, std::vector<std::string>& args) {
  std::string sub_name, path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 < args.size()) path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else if (sub_name.empty() && !a.empty() && a[0] != '-') {
      sub_name = a;
    }
  }
  if (path.empty()) return;
  const CLI::App* sub = app.get_subcommand_no_throw(sub_name);
  if (sub == nullptr) return;  // let the parser report the bad subcommand

  std::ifstream in(path);
  if (!in) throw BadParameters("config file not readable: " + path);
  std::map<std::string, std::string> wanted;  // the last occurrence of a key wins
  std::string line, section;
  while (std::getline(in, line)) {
    line = trimmed(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trimmed(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw BadParameters("config line is not key=value: " + line);
    if (!section.empty() && section != sub_name) continue;
    std::string value = trimmed(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    wanted[trimmed(line.substr(0, eq))] = value;
  }

  for (const auto& [key, value] : wanted) {
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") continue;
    bool given = false;  // any spelling of the flag on the command line wins
    for (const std::string& lname : opt->get_lnames())
      for (const std::string& a : args)
        if (a == "--" + lname || a.rfind("--" + lname + "=", 0) == 0) given = true;
    if (!given) args.push_back("--" + key + "=" + value);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    if (tok == "inf" || tok == "Inf" || tok == "INF")
      out.push_back(estimators::kInf);
    else
      out.push_back(io::parse_double(tok));
  }
  if (out.empty()) throw BadParameters("empty list: '" + text + "'");
  return out;
}

std::string threshold_label(double t) {
  if (std::isinf(t)) return "inf";
  std::string s = io::fmt_double(t);
  for (char& c : s)
    if (c == '.') c = 'p';  // keep file names dot-free apart from the extension
  return s;
}

// mapped to 4*steps-per-day for minutely data; windows must be odd, so round up
int smoothing_window(int smooth_days, int steps_per_day) {
  const int steps = steps_per_day > 0 ? steps_per_day : 1;
  int w = smooth_days * steps;
  if (w % 2 == 0) ++w;
  return w;
}

series::ReturnSeries load_input(const Cfg& cfg) {
  const std::string text = io::read_file(cfg.input);
  std::istringstream in(text);
  series::ReturnSeries r;
  if (cfg.input_kind == "prices") {
    series::PriceSeries p = series::load_prices(in);
    r = series::normalize(series::log_returns(p, cfg.delta));
  } else if (cfg.input_kind == "returns") {
    r = series::normalize(io::read_return_series(in).values);
  } else {
    throw BadParameters("--input-kind must be prices or returns");
  }
  if (cfg.steps_per_day > 0) {
    // minutely: trim to whole days, then divide out the intraday pattern
    const std::size_t days = r.values.size() / cfg.steps_per_day;
    if (days == 0) throw TooShort("series shorter than one day");
    std::vector<double> trimmed(r.values.begin(),
                                r.values.begin() + days * cfg.steps_per_day);
    r = series::normalize(trimmed);
    r = series::remove_intraday(r, series::intraday_profile(r, cfg.steps_per_day));
  }
  return r;
}

using Artifacts = std::vector<std::pair<fs::path, std::string>>;

json fit_or_error(const std::vector<double>& x, const std::vector<double>& y,
                  double lo, double hi) {
  // fits are best-effort: a sparse tail must not kill the whole analysis run
  try {
    estimators::TailFit f = estimators::fit_power_law_xy(x, y, lo, hi);
    return json{{"exponent", f.exponent},
                {"stderr", f.stderr_},
                {"range", {f.range_lo, f.range_hi}},
                {"n", f.n_points_used}};
  } catch (const ComputeError& e) {
    return json{{"error", e.what()}};
  }
}

std::vector<double> lag_axis(int max_lag) {
  std::vector<double> x(max_lag);
  for (int t = 1; t <= max_lag; ++t) x[t - 1] = static_cast<double>(t);
  return x;
}

// the five-file estimator suite shared by analyze/simulate/decouple
void analysis_suite(const Cfg& cfg, const series::ReturnSeries& r, const fs::path& dir,
                    Artifacts& files) {
  const estimators::LagCurve lev = estimators::leverage_curve(r, cfg.max_lag);
  files.emplace_back(dir / "leverage.csv", io::write_lag_curve(lev));

  const int smooth_days = cfg.smooth_days >= 0 ? cfg.smooth_days
                          : cfg.steps_per_day > 0 ? 4
                                                  : 0;
  if (smooth_days > 0) {
    const int w = smoothing_window(smooth_days, cfg.steps_per_day);
    files.emplace_back(dir / "leverage_smooth.csv",
                       io::write_lag_curve(estimators::smooth_lag_window(lev, w)));
  }

  const estimators::LagCurve acf = estimators::volatility_autocorrelation(r, cfg.max_lag);
  files.emplace_back(dir / "autocorr.csv", io::write_lag_curve(acf));

  const estimators::LagCurve persist =
      estimators::persistence_curve(r, cfg.max_lag, estimators::PersistSide::below);
  files.emplace_back(dir / "persistence.csv", io::write_lag_curve(persist));

  json fits;
  fits["acf"] = fit_or_error(lag_axis(cfg.max_lag), acf.values, cfg.lag_fit_min, cfg.lag_fit_max);
  fits["persistence_below"] =
      fit_or_error(lag_axis(cfg.max_lag), persist.values, cfg.lag_fit_min, cfg.lag_fit_max);
  for (auto side : {estimators::Side::positive, estimators::Side::negative}) {
    const char* key = side == estimators::Side::positive ? "tail_pos" : "tail_neg";
    const char* file = side == estimators::Side::positive ? "tails_pos.csv" : "tails_neg.csv";
    try {
      estimators::TailHistogram h = estimators::tail_histogram(r, side, cfg.bins_per_decade);
      files.emplace_back(dir / file, io::write_tail_histogram(h));
      fits[key] = fit_or_error(h.centers(), h.densities, cfg.tail_fit_min, cfg.tail_fit_max);
    } catch (const EmptySide& e) {
      files.emplace_back(dir / file, std::string("# ") + e.what() + "\n");
      fits[key] = json{{"error", e.what()}};
    }
  }
  files.emplace_back(dir / "fits.json", fits.dump(2) + "\n");
}

json effective_config(const Cfg& cfg) {
  json j;
  j["command"] = cfg.command;
  j["config_file"] = cfg.config_file;
  j["input"] = cfg.input;
  j["input_kind"] = cfg.input_kind;
  j["out"] = cfg.out_dir;
  j["max_lag"] = cfg.max_lag;
  j["seed"] = cfg.seed;
  j["delta"] = cfg.delta;
  j["steps_per_day"] = cfg.steps_per_day;
  j["smooth_days"] = cfg.smooth_days;
  j["bins_per_decade"] = cfg.bins_per_decade;
  j["lag_fit_range"] = {cfg.lag_fit_min, cfg.lag_fit_max};
  j["tail_fit_range"] = {cfg.tail_fit_min, cfg.tail_fit_max};
  j["thresholds"] = cfg.thresholds;
  j["global_z"] = cfg.global_z;
  j["m"] = cfg.m;
  j["tau"] = cfg.tau;
  j["tmax"] = cfg.tmax;
  j["c_grid"] = cfg.c_grid;
  j["kernel_smooth"] = cfg.kernel_smooth;
  j["burn_in"] = cfg.command == "simulate" ? cfg.burn_in_simulate : cfg.burn_in_decouple;
  j["generator"] = cfg.generator;
  j["length"] = cfg.length;
  j["n_agents"] = cfg.n_agents;
  j["a"] = cfg.a;
  j["hurst"] = cfg.hurst;
  j["nu"] = cfg.nu;
  j["sigma_file"] = cfg.sigma_file;
  return j;
}

void write_metadata(const Cfg& cfg, const fs::path& dir, Artifacts& files,
                    const std::string& generator_note = "") {
  json j;
  j["tool"] = "retvol";
  j["version"] = kVersion;
  j["rng"] = "mt19937_64/box-muller";
  j["summation"] = "sequential-long-double";
  j["config"] = effective_config(cfg);
  if (!generator_note.empty()) j["generator"] = generator_note;
  files.emplace_back(dir / "run_metadata.json", j.dump(2) + "\n");
}

void flush(const Artifacts& files) {
  for (const auto& [path, content] : files) io::atomic_write_file(path, content);
}

generators::GeneratorSpec generator_spec(const Cfg& cfg, std::int64_t length) {
  generators::GeneratorSpec spec;
  if (cfg.generator == "gaussianUnit")
    spec.kind = generators::GeneratorSpec::Kind::gaussianUnit;
  else if (cfg.generator == "ez")
    spec.kind = generators::GeneratorSpec::Kind::ezModel;
  else if (cfg.generator == "longMemory")
    spec.kind = generators::GeneratorSpec::Kind::longMemory;
  else
    throw BadParameters("--generator must be gaussianUnit, ez or longMemory");
  spec.length = length;
  spec.seed = cfg.seed;
  spec.n_agents = cfg.n_agents;
  spec.a = cfg.a;
  spec.hurst = cfg.hurst;
  spec.vol_of_logvol = cfg.nu;
  return spec;
}

int cmd_analyze(const Cfg& cfg) {
  const series::ReturnSeries r = load_input(cfg);
  Artifacts files;
  analysis_suite(cfg, r, cfg.out_dir, files);
  write_metadata(cfg, cfg.out_dir, files);
  flush(files);
  return 0;
}

int cmd_threshold(const Cfg& cfg) {
  const series::ReturnSeries r = load_input(cfg);
  Artifacts files;
  for (double thr : parse_list(cfg.thresholds)) {
    const estimators::LagCurve c =
        estimators::leverage_curve_conditional(r, cfg.max_lag, thr, cfg.global_z);
    files.emplace_back(fs::path(cfg.out_dir) / ("leverage_thr_" + threshold_label(thr) + ".csv"),
                       io::write_lag_curve(c));
  }
  write_metadata(cfg, cfg.out_dir, files);
  flush(files);
  return 0;
}

int cmd_simulate(const Cfg& cfg) {
  const retarded::Kernel k = retarded::kernel_exponential(cfg.m, cfg.tau, cfg.tmax);
  std::vector<double> sigma;
  std::string gen_note;
  if (!cfg.sigma_file.empty()) {
    std::istringstream in(io::read_file(cfg.sigma_file));
    sigma = io::read_return_series(in).values;
    gen_note = "file:" + cfg.sigma_file;
  } else {
    const std::int64_t want = cfg.length + (cfg.burn_in_simulate ? cfg.tmax : 0);
    const generators::GeneratorSpec spec = generator_spec(cfg, want);
    sigma = generators::generate_sigma(spec);
    gen_note = generators::generator_id(spec);
  }
  const series::ReturnSeries r =
      retarded::simulate_feedback(k, sigma, cfg.seed, cfg.burn_in_simulate);
  Artifacts files;
  files.emplace_back(fs::path(cfg.out_dir) / "simulated_returns.csv", io::write_return_series(r));
  analysis_suite(cfg, r, cfg.out_dir, files);
  write_metadata(cfg, cfg.out_dir, files, gen_note);
  flush(files);
  return 0;
}

int cmd_decouple(const Cfg& cfg) {
  const series::ReturnSeries r = load_input(cfg);
  const estimators::LagCurve lev = estimators::leverage_curve(r, cfg.max_lag);
  const estimators::LagCurve lev_for_kernel =
      cfg.kernel_smooth > 1 ? estimators::smooth_lag_window(lev, cfg.kernel_smooth) : lev;
  const retarded::Calibration calib =
      retarded::calibrate_C(r, lev_for_kernel, parse_list(cfg.c_grid));

  series::ReturnSeries r0 = calib.dec.r0;
  if (cfg.burn_in_decouple) {
    std::vector<double> vals(r0.values.begin() + lev_for_kernel.max_lag, r0.values.end());
    r0 = series::normalize(vals, series::Origin::decoupled);
  }

  Artifacts files;
  const fs::path dir(cfg.out_dir);
  files.emplace_back(dir / "leverage_input.csv", io::write_lag_curve(lev));
  files.emplace_back(dir / "kernel.csv",
                     io::write_kernel(retarded::kernel_from_leverage(lev_for_kernel, calib.C)));
  files.emplace_back(dir / "decouple_report.json",
                     io::write_decouple_report(calib.C, calib.dec));
  files.emplace_back(dir / "decoupled_returns.csv", io::write_return_series(r0));
  analysis_suite(cfg, r0, dir, files);
  write_metadata(cfg, dir, files);
  flush(files);
  return 0;
}

int cmd_generate_sigma(const Cfg& cfg) {
  const generators::GeneratorSpec spec = generator_spec(cfg, cfg.length);
  const std::vector<double> sigma = generators::generate_sigma(spec);
  series::ReturnSeries wrapper;  // sigma stored in the same index,value format
  wrapper.values = sigma;
  Artifacts files;
  files.emplace_back(fs::path(cfg.out_dir) / "sigma.csv", io::write_return_series(wrapper));
  write_metadata(cfg, cfg.out_dir, files, generators::generator_id(spec));
  flush(files);
  return 0;
}

void add_common(CLI::App* sub, Cfg& cfg, bool needs_input) {
  sub->add_option("--config", cfg.config_file,
                  "key=value file of default flag values; explicit flags win");
  CLI::Option* in = sub->add_option("--input", cfg.input, "input series file");
  if (needs_input) in->required();
  sub->add_option("--input-kind", cfg.input_kind,
                  "prices (timestamp,price) or returns (index,value)");
  sub->add_option("--out", cfg.out_dir, "output directory")->required();
  sub->add_option("--max-lag", cfg.max_lag, "largest lag to estimate");
  sub->add_option("--seed", cfg.seed, "RNG seed");
  sub->add_option("--delta", cfg.delta, "log-return step in native samples");
  sub->add_option("--steps-per-day", cfg.steps_per_day,
                  "samples per day for minutely data (0 = daily)");
  sub->add_option("--smooth-days", cfg.smooth_days,
                  "smoothing window in days (-1 = auto: 4 for minutely, off for daily)");
  sub->add_option("--bins-per-decade", cfg.bins_per_decade, "tail histogram resolution");
  sub->add_option("--lag-fit-min", cfg.lag_fit_min, "lag-curve fit range lower edge");
  sub->add_option("--lag-fit-max", cfg.lag_fit_max, "lag-curve fit range upper edge");
  sub->add_option("--tail-fit-min", cfg.tail_fit_min, "tail fit range lower edge");
  sub->add_option("--tail-fit-max", cfg.tail_fit_max, "tail fit range upper edge");
  sub->add_flag("--split-days", cfg.split_days, "reserved");
}

void add_generator(CLI::App* sub, Cfg& cfg) {
  sub->add_option("--generator", cfg.generator, "gaussianUnit | ez | longMemory");
  sub->add_option("--length", cfg.length, "output length");
  sub->add_option("--n-agents", cfg.n_agents, "EZ model agents");
  sub->add_option("--a", cfg.a, "EZ trade probability");
  sub->add_option("--hurst", cfg.hurst, "long-memory Hurst index");
  sub->add_option("--nu", cfg.nu, "long-memory vol of log-vol");
}

}  // namespace

int run_command(Cfg& cfg, const char* name, int (*fn)(const Cfg&)) {
  if (cfg.split_days) throw BadParameters("--split-days is reserved and not implemented");
  cfg.command = name;
  return fn(cfg);
}

int main(int argc, char** argv) {
  Cfg cfg;
  CLI::App app{"return-volatility correlation toolkit", "retvol"};
  app.require_subcommand(1);

  CLI::App* an = app.add_subcommand("analyze", "estimator suite for one series");
  add_common(an, cfg, true);

  CLI::App* th = app.add_subcommand("threshold", "leverage curves conditioned on |r| < threshold");
  add_common(th, cfg, true);
  th->add_option("--thresholds", cfg.thresholds, "comma list, e.g. 2,8,inf");
  th->add_flag("--global-z", cfg.global_z, "normalize with the full-series Z");

  CLI::App* si = app.add_subcommand("simulate", "feedback model returns from a reference volatility");
  add_common(si, cfg, false);
  add_generator(si, cfg);
  si->add_option("--m", cfg.m, "kernel amplitude");
  si->add_option("--tau", cfg.tau, "kernel decay time");
  si->add_option("--tmax", cfg.tmax, "kernel truncation lag");
  si->add_option("--sigma-file", cfg.sigma_file, "reference volatility file (index,value)");
  si->add_flag("--burn-in,!--no-burn-in", cfg.burn_in_simulate,
               "drop the first tmax points (default on)");

  CLI::App* de = app.add_subcommand("decouple", "calibrate C and strip the leverage coupling");
  add_common(de, cfg, true);
  de->add_option("--c-grid", cfg.c_grid, "comma list of candidate C values");
  de->add_option("--tmax", cfg.tmax, "kernel truncation lag");
  de->add_option("--kernel-smooth", cfg.kernel_smooth,
                 "odd lag window smoothing L(t) before the kernel (1 = off)");
  de->add_flag("--burn-in,!--no-burn-in", cfg.burn_in_decouple,
               "drop the first max-lag points of the decoupled series (default off)");

  CLI::App* gs = app.add_subcommand("generate-sigma", "write a reference volatility file");
  gs->add_option("--config", cfg.config_file,
                 "key=value file of default flag values; explicit flags win");
  gs->add_option("--out", cfg.out_dir, "output directory")->required();
  gs->add_option("--seed", cfg.seed, "RNG seed");
  add_generator(gs, cfg);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    inject_config_defaults(app, args);
  } catch (const InputError& e) {
    std::cerr << "retvol: input error: " << e.what() << "\n";
    return 2;
  }
  std::reverse(args.begin(), args.end());  // the vector overload parses back to front
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (an->parsed()) return run_command(cfg, "analyze", cmd_analyze);
    if (th->parsed()) return run_command(cfg, "threshold", cmd_threshold);
    if (si->parsed()) return run_command(cfg, "simulate", cmd_simulate);
    if (de->parsed()) return run_command(cfg, "decouple", cmd_decouple);
    return run_command(cfg, "generate-sigma", cmd_generate_sigma);
  } catch (const InputError& e) {
    std::cerr << "retvol: input error: " << e.what() << "\n";
    return 2;
  } catch (const ComputeError& e) {
    std::cerr << "retvol: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "retvol: " << e.what() << "\n";
    return 3;
  }
}
