#pragma once

// Brute-force cross-checks. Nothing here reuses the samplers, quadrature or
// price reconstruction of the main estimators.

#include <cstddef>
#include <cstdint>

#include "ergodic/levy.hpp"
#include "ergodic/models.hpp"
#include "ergodic/pricing.hpp"
#include "ergodic/rng.hpp"
#include "ergodic/schedule.hpp"

namespace ergodic {

// Classical Monte Carlo under the stationary Heston law: v_0 from the Gamma
// invariant law, then (v, log S) by full-truncation Euler on a fixed grid of
// step <= fine_step, fresh paths, trapezoidal average. Paths are split into
// fixed chunks with one RNG stream each, so the result does not depend on
// the thread count. Fills value, std_error, n, call/put estimates.
PriceEstimate cir_direct_stationary_price(const HestonParams& p, const OptionSpec& spec, std::size_t n_paths,
                                          double fine_step, std::uint64_t seed, unsigned threads = 1);

// One draw from Gamma(shape 2 k theta / sigma_v^2, mean theta).
double sample_stationary_variance(const HestonParams& p, Rng& rng);

struct OuReport {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double target_variance = 0.0;  // sigma^2 / 2
  std::size_t n = 0;
};

// Weighted marginal of dy = -y dt + sigma dW through the engine's accumulator.
OuReport ou_stationary_check(double sigma, Schedule sched, std::size_t n_iters, std::uint64_t seed);

struct LevyMoments {
  double tail = 0.0;  // int_u^inf y^order pi(dy)
  double head = 0.0;  // int_0^u y^order pi(dy)
};

// Double-exponential quadrature to 1e-12 relative. order must be 1 or 2.
LevyMoments levy_moment_oracle(const TemperedStableMeasure& m, double u, int order);

// pi((u, inf)) by the same independent quadrature.
double levy_intensity_oracle(const TemperedStableMeasure& m, double u);

}  // namespace ergodic
