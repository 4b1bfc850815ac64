#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>

#include "ergodic/rng.hpp"

namespace ergodic {

// pi(dy) = 1_{y>0} c exp(-lambda y) y^(-1-alpha) dy.
// lambda = 0 (pure stable) is accepted so that closed forms can be checked;
// any quantity that diverges without tempering throws std::domain_error.
struct TemperedStableMeasure {
  double c = 0.01;
  double lambda = 1.0;
  double alpha = 0.5;

  void validate() const;
  double density(double y) const;
};

// Threshold u_n = scale * gamma_n^power. power defaults to 1/alpha: then the
// expected number of jumps per step, gamma_n Lambda(u_n), stays near c/alpha
// while the discarded jump mass per unit time, O(u_n^(1-alpha)), shrinks like
// gamma_n^((1-alpha)/alpha) (like gamma_n at alpha = 1/2).
struct TruncationPolicy {
  double scale = 1.0;
  double power = std::numeric_limits<double>::quiet_NaN();  // NaN: 1/alpha

  double exponent(double alpha) const { return std::isnan(power) ? 1.0 / alpha : power; }
  double threshold(double gamma, double alpha) const;
};

// Lambda(u) = pi((u, inf)).
double tail_intensity(const TemperedStableMeasure& m, double u);

// int_u^inf y^p pi(dy), p in {0, 1, 2}.
double tail_moment(const TemperedStableMeasure& m, double u, int p);

// int_0^u y^p pi(dy), p in {1, 2}.
double head_moment(const TemperedStableMeasure& m, double u, int p);

// int_0^u y^2 pi(dy): variance rate of the discarded small jumps.
double small_jump_variance(const TemperedStableMeasure& m, double u);

// E[Z_1] = int y pi(dy) = c Gamma(1-alpha) lambda^(alpha-1).
double subordinator_mean(const TemperedStableMeasure& m);

// int (e^{theta y} - 1) pi(dy) = c Gamma(-alpha) ((lambda-theta)^alpha - lambda^alpha),
// for theta < lambda; log E[e^{theta Z_1}].
double laplace_exponent(const TemperedStableMeasure& m, double theta);

// One jump from pi restricted to (u, inf), normalized: Pareto(alpha, u)
// proposal accepted with probability exp(-lambda (Y - u)).
double sample_jump_above(const TemperedStableMeasure& m, double u, Rng& rng);

// Sum of the jumps above u over a time step gamma (Poisson(gamma Lambda(u))
// many), minus gamma int_{y>u} y pi(dy) when compensate is set.
double compound_poisson_increment(const TemperedStableMeasure& m, double u, double gamma,
                                  bool compensate, Rng& rng);

// compound_poisson_increment + sqrt(gamma * small_jump_variance(u)) * N(0,1).
double wienerized_increment(const TemperedStableMeasure& m, double u, double gamma, bool compensate,
                            Rng& rng);

enum class JumpScheme { Poisson, Wienerized };

// Per-step increment source for a decreasing threshold sequence. The
// truncated moments are carried from one threshold to the next by
// integrating pi over [u_new, u_old] only, so each step costs O(1) on top of
// the jumps it actually draws.
class TruncatedJumpSource {
 public:
  TruncatedJumpSource(const TemperedStableMeasure& m, JumpScheme scheme, bool compensate);

  double increment(double u, double gamma, Rng& rng);

  // Moments at the current threshold (after the last increment call).
  double threshold() const noexcept { return u_; }
  double intensity() const noexcept { return rate_; }
  double compensator_rate() const noexcept { return mean_above_; }
  double head_variance() const noexcept { return head_var_; }

 private:
  void move_threshold(double u);

  TemperedStableMeasure m_;
  JumpScheme scheme_;
  bool compensate_;
  double u_ = 0.0;
  double rate_ = 0.0;
  double mean_above_ = 0.0;
  double head_var_ = 0.0;
  std::normal_distribution<double> normal_;
};

}  // namespace ergodic
