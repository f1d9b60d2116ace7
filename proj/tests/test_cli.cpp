#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "retvol/io.hpp"
#include "retvol/rng.hpp"
#include "retvol/series.hpp"

namespace fs = std::filesystem;
using namespace retvol;

static std::string g_bin;
static fs::path g_scratch;

static int run(const std::string& args, bool quiet = true) {
  const std::string cmd = g_bin + " " + args + (quiet ? " >/dev/null 2>&1" : "");
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

static std::string slurp(const fs::path& p) { return io::read_file(p.string()); }

TEST_CASE("help exits zero, parse errors exit two") {
  CHECK(run("--help") == 0);
  CHECK(run("analyze --help") == 0);
  CHECK(run("analyze --nonsense-flag x") == 2);
  CHECK(run("") == 2);  // a subcommand is required
  CHECK(run("analyze --out " + (g_scratch / "nope").string()) == 2);  // --input required
}

TEST_CASE("missing and malformed inputs exit two without partial outputs") {
  const fs::path out = g_scratch / "bad_in";
  CHECK(run("analyze --input /does/not/exist.csv --out " + out.string()) == 2);
  CHECK(!fs::exists(out / "leverage.csv"));

  const fs::path mal = g_scratch / "malformed.csv";
  io::atomic_write_file(mal.string(), "0,100\n1,not_a_price\n");
  CHECK(run("analyze --input " + mal.string() + " --out " + out.string()) == 2);
  CHECK(!fs::exists(out / "leverage.csv"));
}

TEST_CASE("degenerate numerics exit three") {
  const fs::path flat = g_scratch / "flat.csv";
  std::string text;
  for (int i = 0; i < 100; ++i) text += std::to_string(i) + ",100.0\n";
  io::atomic_write_file(flat.string(), text);
  CHECK(run("analyze --input " + flat.string() + " --out " + (g_scratch / "flat_out").string()) ==
        3);

  // a lag horizon the series cannot support
  const fs::path walk = g_scratch / "short_walk.csv";
  Rng rng(5);
  std::string rows;
  double p = 100.0;
  for (int i = 0; i < 50; ++i) {
    rows += std::to_string(i) + "," + io::fmt_double(p) + "\n";
    p *= std::exp(0.01 * rng.normal());
  }
  io::atomic_write_file(walk.string(), rows);
  CHECK(run("analyze --input " + walk.string() + " --max-lag 64 --out " +
            (g_scratch / "short_out").string()) == 3);
}

TEST_CASE("simulate produces the full analysis suite deterministically") {
  const fs::path a = g_scratch / "sim_a";
  const std::string args =
      "simulate --generator gaussianUnit --length 20000 --m 0.1 --tau 10 --tmax 16 --seed 9 --out " +
      a.string();
  REQUIRE(run(args) == 0);

  const char* names[] = {"simulated_returns.csv", "leverage.csv", "autocorr.csv",
                         "persistence.csv",       "tails_pos.csv", "tails_neg.csv",
                         "fits.json",             "run_metadata.json"};
  std::map<std::string, std::string> snapshot;
  for (const char* f : names) {
    REQUIRE(fs::exists(a / f));
    snapshot[f] = slurp(a / f);
  }

  // identical flags (including --out) must reproduce every byte
  REQUIRE(run(args) == 0);
  for (const char* f : names) {
    CAPTURE(f);
    CHECK(slurp(a / f) == snapshot[f]);
  }

  const nlohmann::json meta = nlohmann::json::parse(slurp(a / "run_metadata.json"));
  CHECK(meta.at("generator") == "gaussianUnit");
  CHECK(meta.at("config").at("seed") == 9);

  const nlohmann::json fits = nlohmann::json::parse(slurp(a / "fits.json"));
  CHECK(fits.contains("acf"));
  CHECK(fits.contains("tail_pos"));
  CHECK(fits.contains("tail_neg"));
  CHECK(fits.contains("persistence_below"));
}

TEST_CASE("analyze round-trips its own csv output") {
  const fs::path walk = g_scratch / "walk.csv";
  Rng rng(17);
  std::string rows;
  double p = 50.0;
  for (int i = 0; i < 5000; ++i) {
    rows += std::to_string(i) + "," + io::fmt_double(p) + "\n";
    p *= std::exp(0.01 * rng.normal());
  }
  io::atomic_write_file(walk.string(), rows);

  const fs::path out = g_scratch / "walk_out";
  REQUIRE(run("analyze --input " + walk.string() + " --max-lag 20 --out " + out.string()) == 0);

  std::istringstream lev_in(slurp(out / "leverage.csv"));
  const auto lev = io::read_lag_curve(lev_in, estimators::CurveKind::leverage);
  CHECK(lev.max_lag == 20);
  CHECK(lev.counts[0] == 4999 - 1);  // 4999 returns from 5000 prices
}

TEST_CASE("threshold writes one leverage curve per threshold") {
  const fs::path sim = g_scratch / "sim_a";  // produced above
  const fs::path out = g_scratch / "thr_out";
  REQUIRE(run("threshold --input " + (sim / "simulated_returns.csv").string() +
              " --input-kind returns --max-lag 12 --thresholds 2,inf --out " + out.string()) == 0);
  REQUIRE(fs::exists(out / "leverage_thr_2.csv"));
  REQUIRE(fs::exists(out / "leverage_thr_inf.csv"));

  // the unconditional curve equals the infinite-threshold one byte for byte
  const fs::path an = g_scratch / "an_out";
  REQUIRE(run("analyze --input " + (sim / "simulated_returns.csv").string() +
              " --input-kind returns --max-lag 12 --out " + an.string()) == 0);
  CHECK(slurp(out / "leverage_thr_inf.csv") == slurp(an / "leverage.csv"));
}

TEST_CASE("decouple emits kernel, report and a decoupled series of equal length") {
  const fs::path sim = g_scratch / "planted";
  REQUIRE(run("simulate --generator gaussianUnit --length 30000 --m 0.15 --tau 10 --tmax 32 "
              "--seed 44 --out " +
              sim.string()) == 0);

  const fs::path out = g_scratch / "dec_out";
  REQUIRE(run("decouple --input " + (sim / "simulated_returns.csv").string() +
              " --input-kind returns --max-lag 32 --out " + out.string()) == 0);
  for (const char* f : {"kernel.csv", "decouple_report.json", "decoupled_returns.csv",
                        "leverage.csv", "leverage_input.csv", "fits.json"}) {
    CAPTURE(f);
    CHECK(fs::exists(out / f));
  }

  const nlohmann::json rep = nlohmann::json::parse(slurp(out / "decouple_report.json"));
  CHECK(rep.at("C").get<double>() > 0.0);
  CHECK(rep.at("frac_large_terms").get<double>() <= 0.05);
  CHECK(rep.at("frac_factor_nonpositive").get<double>() <= 0.05);
  CHECK(std::fabs(rep.at("mean_decoupled").get<double>()) < 0.05);

  std::istringstream dec_in(slurp(out / "decoupled_returns.csv"));
  CHECK(io::read_return_series(dec_in).values.size() == 30000);

  std::istringstream ker_in(slurp(out / "kernel.csv"));
  CHECK(io::read_kernel(ker_in).values.size() == 32);
}

TEST_CASE("generate-sigma writes a readable positive series") {
  const fs::path out = g_scratch / "sigma_out";
  REQUIRE(run("generate-sigma --generator longMemory --length 4000 --hurst 0.85 --nu 0.4 "
              "--seed 77 --out " +
              out.string()) == 0);
  std::istringstream in(slurp(out / "sigma.csv"));
  const auto sigma = io::read_return_series(in);
  REQUIRE(sigma.values.size() == 4000);
  for (double v : sigma.values) REQUIRE(v > 0.0);
}

TEST_CASE("suite artifacts round-trip through the module parsers") {
  const fs::path out = g_scratch / "walk_out";  // produced by the analyze case above
  std::istringstream acf_in(slurp(out / "autocorr.csv"));
  CHECK(io::read_lag_curve(acf_in, estimators::CurveKind::autocorrelation).max_lag == 20);
  std::istringstream per_in(slurp(out / "persistence.csv"));
  CHECK(io::read_lag_curve(per_in, estimators::CurveKind::persistence_below).max_lag == 20);
  std::istringstream tail_in(slurp(out / "tails_pos.csv"));
  CHECK(!io::read_tail_histogram(tail_in).centers.empty());

  const nlohmann::json fits = nlohmann::json::parse(slurp(out / "fits.json"));
  for (const char* key : {"acf", "persistence_below", "tail_pos", "tail_neg"}) {
    CAPTURE(key);
    REQUIRE(fits.contains(key));
    if (fits.at(key).contains("error")) continue;
    const auto fit = io::read_tail_fit(fits.at(key).dump());
    CHECK(fit.exponent == fits.at(key).at("exponent").get<double>());
    CHECK(fit.n_points_used > 0);
  }
}

TEST_CASE("config file supplies defaults and explicit flags win") {
  const fs::path rets = g_scratch / "cfg_rets.csv";
  Rng rng(23);
  std::string rows;
  for (int i = 0; i < 3000; ++i)
    rows += std::to_string(i) + "," + io::fmt_double(rng.normal()) + "\n";
  io::atomic_write_file(rets.string(), rows);

  const fs::path ini = g_scratch / "retvol.ini";
  const fs::path out_a = g_scratch / "cfg_a";
  const fs::path out_c = g_scratch / "cfg_c";
  io::atomic_write_file(ini.string(),
                        "[analyze]\ninput=" + rets.string() + "\ninput-kind=returns\nout=" +
                            out_a.string() + "\nmax-lag=12\n\n[threshold]\ninput=" +
                            rets.string() + "\ninput-kind=returns\nout=" + out_c.string() +
                            "\nmax-lag=12\nthresholds=2,inf\n");
  REQUIRE(run("analyze --config " + ini.string()) == 0);
  const nlohmann::json meta_a = nlohmann::json::parse(slurp(out_a / "run_metadata.json"));
  CHECK(meta_a.at("config").at("max_lag").get<int>() == 12);
  // the [threshold] section must not bleed into the analyze run
  CHECK(meta_a.at("config").at("thresholds").get<std::string>() == "2,8,inf");

  const fs::path out_b = g_scratch / "cfg_b";
  REQUIRE(run("analyze --config " + ini.string() + " --max-lag 20 --out " + out_b.string()) == 0);
  const nlohmann::json meta_b = nlohmann::json::parse(slurp(out_b / "run_metadata.json"));
  CHECK(meta_b.at("config").at("max_lag").get<int>() == 20);

  // the same file drives threshold through its own section
  REQUIRE(run("threshold --config " + ini.string()) == 0);
  CHECK(fs::exists(out_c / "leverage_thr_2.csv"));
  CHECK(fs::exists(out_c / "leverage_thr_inf.csv"));
  CHECK(!fs::exists(out_c / "leverage_thr_8.csv"));

  CHECK(run("analyze --config " + (g_scratch / "no_such.ini").string() + " --input " +
            rets.string() + " --out " + (g_scratch / "cfg_d").string()) == 2);
}

TEST_CASE("minutely input trims partial days and emits a smoothed curve") {
  // 300 whole days of 48 steps with a planted intraday magnitude pattern,
  // plus 7 trailing rows that must be dropped
  const fs::path rets = g_scratch / "minutely.csv";
  Rng rng(31);
  std::string rows;
  const int spd = 48, days = 300;
  for (int i = 0; i < days * spd + 7; ++i) {
    const double scale = 1.0 + 0.8 * std::cos(2.0 * M_PI * (i % spd) / spd);
    rows += std::to_string(i) + "," + io::fmt_double(scale * rng.normal()) + "\n";
  }
  io::atomic_write_file(rets.string(), rows);

  const fs::path out = g_scratch / "min_out";
  REQUIRE(run("analyze --input " + rets.string() +
              " --input-kind returns --steps-per-day 48 --max-lag 250 --out " + out.string()) == 0);

  std::istringstream lev_in(slurp(out / "leverage.csv"));
  const auto lev = io::read_lag_curve(lev_in, estimators::CurveKind::leverage);
  CHECK(lev.counts[0] == days * spd - 1);  // the partial day is gone

  // default smoothing for minutely data is a 4-day window on the lag axis
  std::istringstream sm_in(slurp(out / "leverage_smooth.csv"));
  const auto sm = io::read_lag_curve(sm_in, estimators::CurveKind::leverage);
  CHECK(sm.max_lag == 250);
}

TEST_CASE("threshold curves coincide when no magnitude reaches the cut") {
  // bounded series: after normalization every |r| stays below 2
  const fs::path rets = g_scratch / "bounded.csv";
  std::string rows;
  for (int i = 0; i < 4000; ++i) {
    const double v = (i % 2 ? 1.0 : -1.0) * (0.6 + 0.4 * std::sin(0.7 * i));
    rows += std::to_string(i) + "," + io::fmt_double(v) + "\n";
  }
  io::atomic_write_file(rets.string(), rows);

  const fs::path out = g_scratch / "coincide";
  REQUIRE(run("threshold --input " + rets.string() +
              " --input-kind returns --max-lag 10 --thresholds 2,8,inf --out " + out.string()) ==
          0);
  const std::string curve_inf = slurp(out / "leverage_thr_inf.csv");
  CHECK(slurp(out / "leverage_thr_2.csv") == curve_inf);
  CHECK(slurp(out / "leverage_thr_8.csv") == curve_inf);
}

TEST_CASE("empty calibration grid is rejected") {
  const fs::path sim = g_scratch / "planted";  // produced by the decouple case above
  CHECK(run("decouple --input " + (sim / "simulated_returns.csv").string() +
            " --input-kind returns --max-lag 32 --c-grid \"\" --out " +
            (g_scratch / "eg").string()) == 2);
}

TEST_CASE("reserved flag is rejected") {
  CHECK(run("analyze --input x.csv --split-days --out " + (g_scratch / "r").string()) == 2);
}

int main(int argc, char** argv) {
  // ctest appends the cli binary path as the last argument
  if (argc > 1 && argv[argc - 1][0] != '-') {
    g_bin = argv[argc - 1];
    --argc;
  }
  if (g_bin.empty()) {
    std::fprintf(stderr, "usage: test_cli [doctest args] <retvol-binary>\n");
    return 1;
  }
  g_scratch = fs::temp_directory_path() / "retvol_cli_tests";
  std::error_code ec;
  fs::remove_all(g_scratch, ec);
  fs::create_directories(g_scratch);

  doctest::Context ctx;
  ctx.applyCommandLine(argc, argv);
  const int rc = ctx.run();
  fs::remove_all(g_scratch, ec);
  return rc;
}
