#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "retvol/rng.hpp"

namespace retvol::generators {

struct GeneratorSpec {
  enum class Kind { gaussianUnit, ezModel, longMemory };
  Kind kind = Kind::gaussianUnit;
  std::int64_t length = 0;
  std::uint64_t seed = 0;
  // ezModel
  int n_agents = 10000;
  double a = 0.3;
  // longMemory
  double hurst = 0.85;
  double vol_of_logvol = 0.5;
};

// dispatcher; all generators return strictly positive sequences, deterministic
// under the seed. Throws BadParameters on out-of-range fields.
std::vector<double> generate_sigma(const GeneratorSpec& spec);

// short id string ("gaussianUnit", "ezModel(n=...,a=...)", ...) for run metadata
std::string generator_id(const GeneratorSpec& spec);

// ---- EZ herding model ----------------------------------------------------
// Clusters of agents merge two at a time; with probability a a random agent's
// cluster trades, emitting a signed return (cluster size / n_agents) and
// dissolving into singletons.
struct EzState {
  int n_agents = 0;
  std::vector<std::int32_t> cluster_of;            // agent -> cluster id
  std::vector<std::vector<std::int32_t>> members;  // cluster id -> agents (empty if dead)
  explicit EzState(int n);
  std::int64_t total_members() const;              // always n_agents
};

// One step. RNG draw order: branch, then agent index (trade) or two agent
// indices (merge), then the sign. Returns the emitted signed return, 0 on merge.
double ez_step(EzState& state, double a, Rng& rng);

// |emitted| at trade events, rescaled to unit mean. Includes a deterministic
// mixing run of 20*n_agents steps before collection.
std::vector<double> generate_ez_sigma(int n_agents, double a, std::int64_t length,
                                      std::uint64_t seed);

// ---- long-memory stochastic volatility -----------------------------------
// sigma = exp(nu * g) rescaled to unit mean, g fractional Gaussian noise with
// the given Hurst index (circulant-embedding synthesis, exact covariance).
std::vector<double> generate_long_memory(double hurst, double vol_of_logvol,
                                         std::int64_t length, std::uint64_t seed);

// raw fGn sample (unit variance), exposed for covariance tests
std::vector<double> fractional_gaussian_noise(double hurst, std::int64_t length,
                                              std::uint64_t seed);

}  // namespace retvol::generators
