#include "retvol/generators.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "retvol/errors.hpp"

namespace retvol::generators {

namespace {

void rescale_unit_mean(std::vector<double>& v) {
  long double sum = 0.0L;
  for (double x : v) sum += x;
  const double mean = static_cast<double>(sum / static_cast<long double>(v.size()));
  for (double& x : v) x /= mean;
}

}  // namespace

// ---- EZ herding model ------------------------------------------------------

EzState::EzState(int n) : n_agents(n) {
  cluster_of.resize(n);
  members.resize(n);
  for (int i = 0; i < n; ++i) {
    cluster_of[i] = i;
    members[i] = {i};
  }
}

std::int64_t EzState::total_members() const {
  std::int64_t total = 0;
  for (const auto& m : members) total += static_cast<std::int64_t>(m.size());
  return total;
}

double ez_step(EzState& state, double a, Rng& rng) {
  const int n = state.n_agents;
  if (rng.u01() < a) {
    // trade: a random agent's whole cluster sells or buys, then dissolves
    const int g = static_cast<int>(rng.index(n));
    const int cid = state.cluster_of[g];
    std::vector<std::int32_t> cluster = std::move(state.members[cid]);
    state.members[cid].clear();
    const double size = static_cast<double>(cluster.size());
    const double sign = rng.u01() < 0.5 ? 1.0 : -1.0;
    for (std::int32_t m : cluster) {
      state.cluster_of[m] = m;
      state.members[m] = {m};
    }
    return sign * size / static_cast<double>(n);
  }
  // merge: the clusters of two random agents coagulate
  const int i = static_cast<int>(rng.index(n));
  const int j = static_cast<int>(rng.index(n));
  const int ci = state.cluster_of[i];
  const int cj = state.cluster_of[j];
  if (ci == cj) return 0.0;
  const int keep = state.members[ci].size() >= state.members[cj].size() ? ci : cj;
  const int lose = keep == ci ? cj : ci;
  for (std::int32_t m : state.members[lose]) state.cluster_of[m] = keep;
  auto& km = state.members[keep];
  km.insert(km.end(), state.members[lose].begin(), state.members[lose].end());
  state.members[lose].clear();
  return 0.0;
}

std::vector<double> generate_ez_sigma(int n_agents, double a, std::int64_t length,
                                      std::uint64_t seed) {
  if (n_agents < 1) throw BadParameters("n_agents must be >= 1");
  if (!(a > 0.0 && a < 1.0)) throw BadParameters("a must be in (0,1)");
  if (length < 1) throw BadParameters("length must be >= 1");
  EzState state(n_agents);
  Rng rng(seed);
  // mixing run so the cluster-size distribution forgets the all-singleton start
  const std::int64_t warmup = 20LL * n_agents;
  for (std::int64_t s = 0; s < warmup; ++s) ez_step(state, a, rng);
  std::vector<double> out;
  out.reserve(length);
  while (static_cast<std::int64_t>(out.size()) < length) {
    const double ret = ez_step(state, a, rng);
    if (ret != 0.0) out.push_back(std::fabs(ret));
  }
  rescale_unit_mean(out);
  return out;
}

// ---- long-memory stochastic volatility --------------------------------------

std::vector<double> fractional_gaussian_noise(double hurst, std::int64_t length,
                                              std::uint64_t seed) {
  if (!(hurst > 0.5 && hurst < 1.0)) throw BadParameters("hurst must be in (0.5,1)");
  if (length < 1) throw BadParameters("length must be >= 1");

  std::size_t M = 1;
  while (M < static_cast<std::size_t>(length)) M <<= 1;
  const std::size_t twoM = 2 * M;

  // unit-variance fGn autocovariance gamma(k), circulant embedding of size 2M
  std::vector<double> gamma(M + 1);
  const double twoH = 2.0 * hurst;
  for (std::size_t k = 0; k <= M; ++k) {
    const double kk = static_cast<double>(k);
    gamma[k] = 0.5 * (std::pow(kk + 1.0, twoH) - 2.0 * std::pow(kk, twoH) +
                      std::pow(std::fabs(kk - 1.0), twoH));
  }

  fftw_complex* buf = fftw_alloc_complex(twoM);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(twoM), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);

  for (std::size_t k = 0; k <= M; ++k) {
    buf[k][0] = gamma[k];
    buf[k][1] = 0.0;
  }
  for (std::size_t k = 1; k < M; ++k) {
    buf[M + k][0] = gamma[M - k];
    buf[M + k][1] = 0.0;
  }
  fftw_execute(plan);

  std::vector<double> lambda(twoM);
  for (std::size_t k = 0; k < twoM; ++k) lambda[k] = buf[k][0] < 0.0 ? 0.0 : buf[k][0];

  // hermitian spectral synthesis with 2M seeded normals
  Rng rng(seed);
  std::vector<double> z(twoM);
  for (std::size_t k = 0; k < twoM; ++k) z[k] = rng.normal();

  buf[0][0] = std::sqrt(lambda[0]) * z[0];
  buf[0][1] = 0.0;
  buf[M][0] = std::sqrt(lambda[M]) * z[M];
  buf[M][1] = 0.0;
  for (std::size_t j = 1; j < M; ++j) {
    const double amp = std::sqrt(lambda[j] / 2.0);
    buf[j][0] = amp * z[j];
    buf[j][1] = amp * z[M + j];
    buf[twoM - j][0] = buf[j][0];
    buf[twoM - j][1] = -buf[j][1];
  }
  fftw_execute(plan);

  const double norm = 1.0 / std::sqrt(static_cast<double>(twoM));
  std::vector<double> g(length);
  for (std::int64_t i = 0; i < length; ++i) g[i] = buf[i][0] * norm;

  fftw_destroy_plan(plan);
  fftw_free(buf);
  return g;
}

std::vector<double> generate_long_memory(double hurst, double vol_of_logvol,
                                         std::int64_t length, std::uint64_t seed) {
  if (!(vol_of_logvol > 0.0)) throw BadParameters("vol_of_logvol must be > 0");
  std::vector<double> g = fractional_gaussian_noise(hurst, length, seed);
  for (double& x : g) x = std::exp(vol_of_logvol * x);
  rescale_unit_mean(g);
  return g;
}

// ---- dispatcher --------------------------------------------------------------

std::vector<double> generate_sigma(const GeneratorSpec& spec) {
  if (spec.length < 1) throw BadParameters("length must be >= 1");
  switch (spec.kind) {
    case GeneratorSpec::Kind::gaussianUnit:
      return std::vector<double>(spec.length, 1.0);
    case GeneratorSpec::Kind::ezModel:
      return generate_ez_sigma(spec.n_agents, spec.a, spec.length, spec.seed);
    case GeneratorSpec::Kind::longMemory:
      return generate_long_memory(spec.hurst, spec.vol_of_logvol, spec.length, spec.seed);
  }
  throw BadParameters("unknown generator kind");
}

std::string generator_id(const GeneratorSpec& spec) {
  std::ostringstream os;
  switch (spec.kind) {
    case GeneratorSpec::Kind::gaussianUnit:
      os << "gaussianUnit";
      break;
    case GeneratorSpec::Kind::ezModel:
      os << "ezModel(n_agents=" << spec.n_agents << ",a=" << spec.a << ")";
      break;
    case GeneratorSpec::Kind::longMemory:
      os << "longMemory(hurst=" << spec.hurst << ",vol_of_logvol=" << spec.vol_of_logvol << ")";
      break;
  }
  return os.str();
}

}  // namespace retvol::generators
