#pragma once

#include <cstdint>
#include <vector>

#include "retvol/estimators.hpp"
#include "retvol/series.hpp"

namespace retvol::retarded {

struct Kernel {
  std::vector<double> values;  // K(t), t = 1..t_max
  int t_max() const { return static_cast<int>(values.size()); }
};

// K(t) = m * exp(-t / tau). Throws BadParameters (tau <= 0 or t_max < 1).
Kernel kernel_exponential(double m, double tau, int t_max);

// K(t) = -(C/2) * L(t). Requires a leverage curve and C > 0.
// Throws WrongCurveKind, BadParameters.
Kernel kernel_from_leverage(const estimators::LagCurve& L, double C);

// r(t') = [1 - sum_t K(t) r(t'-t)] sigma(t') eps(t'), cold start r(t'<0) = 0,
// eps seeded standard normal. Output is normalized; with drop_burn_in the
// first t_max points are discarded before normalizing.
// Throws RefTooShort (len(sigma) < t_max + 2), BadParameters (sigma <= 0).
series::ReturnSeries simulate_feedback(const Kernel& k, const std::vector<double>& sigma_ref,
                                       std::uint64_t noise_seed, bool drop_burn_in = true);

struct DecoupleResult {
  series::ReturnSeries r0;            // re-normalized decoupled series
  double frac_large_terms = 0.0;      // evaluated terms with |K(t) r(t'-t)| > 1
  double frac_factor_nonpositive = 0.0;  // starts with 1 + sum <= 0 (sign flips)
  double max_abs_sum = 0.0;           // max |sum_t K(t) r(t'-t)|
  double mean_pre_normalize = 0.0;    // mean of r0 before re-normalization
};

// r0(t') = [1 + sum_t K(t) r(t'-t)] r(t'), cold start zeros.  If the transform
// leaves every value bit-identical (e.g. zero kernel), re-normalization is
// skipped so the identity is exact. Throws SeriesTooShort (len <= t_max).
DecoupleResult decouple(const series::ReturnSeries& r, const Kernel& k);

struct PerturbationAudit {
  double frac_large_terms = 0.0;
  double frac_factor_nonpositive = 0.0;
  double max_abs_sum = 0.0;
};

// same pass as decouple without building the output series.
PerturbationAudit audit_perturbation(const series::ReturnSeries& r, const Kernel& k);

struct Calibration {
  double C = 0.0;
  DecoupleResult dec;
};

// For each C in the grid: decouple with kernel_from_leverage(L, C), then score
// the residual leverage sum_t (L0(t)/stderr(t))^2 over t = 1..L.max_lag.
// Returns the minimizing C, ties broken toward smaller C.
// Throws BadParameters (empty or non-positive grid); propagates decouple errors.
Calibration calibrate_C(const series::ReturnSeries& r, const estimators::LagCurve& L,
                        const std::vector<double>& c_grid);

}  // namespace retvol::retarded
