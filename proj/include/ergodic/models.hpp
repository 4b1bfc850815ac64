#pragma once

// Stationary stochastic volatility models as engine drivers.
//
// Heston: the price is rebuilt from the stationary pair (v, y) with
//   dy = -y dt + sqrt(v) dW1,   dv = k(theta - v) dt + sigma_v sqrt(v) dW2,
// through M_t = y_t - y_0 + int_0^t y ds (= int sqrt(v) dW1) and
// Lambda_t = (v_t - v_0 - k theta t + k int_0^t v ds) / sigma_v (= int sqrt(v) dW2).
//
// BNS: dX = (r - v/2) dt + sqrt(v) dW + rho dZ, dv = -mu v dt + dZ with Z a
// tempered stable subordinator; each window is re-based to start at X = 0.

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ergodic/engine.hpp"
#include "ergodic/levy.hpp"
#include "ergodic/rng.hpp"

namespace ergodic {

// Log-price along a window: on segment j, log S(t) = log_level + log_slope (t - start).
// Grid values are exact; between grid points the drift part of the log-price
// is linear in t while the stationary coordinates are frozen.
struct PriceSegment {
  double start;
  double length;
  double log_level;
  double log_slope;
};

class PricePath {
 public:
  void clear() { segments_.clear(); }
  void push(const PriceSegment& s) { segments_.push_back(s); }

  std::size_t size() const noexcept { return segments_.size(); }
  const PriceSegment& segment(std::size_t j) const { return segments_[j]; }
  double value(std::size_t j) const { return std::exp(segments_[j].log_level); }
  double horizon() const {
    return segments_.empty() ? 0.0 : segments_.back().start + segments_.back().length;
  }

  // int_0^T S_t dt, exact for the log-linear segments.
  double integral() const;
  // S_T (the left limit at the horizon).
  double terminal() const;

 private:
  std::vector<PriceSegment> segments_;
};

// ---- Heston ---------------------------------------------------------------

struct HestonParams {
  double s0 = 50.0;
  double r = 0.05;
  double rho = 0.5;
  double k = 2.0;
  double theta = 0.01;
  double sigma_v = 0.1;
  double v_init = std::numeric_limits<double>::quiet_NaN();  // NaN: start at theta
  double y_init = 0.0;

  // Throws std::invalid_argument on a violated invariant (including 2 k theta <= sigma_v^2).
  void validate() const;
  // Non-fatal notes, e.g. when the sufficient convergence condition for the
  // reflected scheme does not hold.
  std::vector<std::string> warnings() const;

  double initial_variance() const { return std::isnan(v_init) ? theta : v_init; }
  // Gamma invariant law of v: shape 2 k theta / sigma_v^2, mean theta.
  double stationary_shape() const { return 2.0 * k * theta / (sigma_v * sigma_v); }
  double stationary_variance() const { return theta * sigma_v * sigma_v / (2.0 * k); }
};

// Heston engine state: (v, y, dW2 of the step that produced it).
using HestonState = State<3>;

// One step of the (v, y) system with given Brownian increments over gamma.
HestonState heston_joint_step(const HestonState& x, double gamma, const HestonParams& p, double dw1,
                              double dw2);

// Same, drawing dW1, dW2 ~ N(0, gamma) independently from rng.
HestonState heston_joint_step(const HestonState& x, double gamma, const HestonParams& p, Rng& rng);

class HestonDriver {
 public:
  HestonDriver(const HestonParams& p, Rng rng) : p_(p), rng_(rng) {}
  HestonState operator()(const HestonState& x, double gamma, std::size_t) {
    const double root = std::sqrt(gamma);
    const double dw1 = root * normal_(rng_);
    const double dw2 = root * normal_(rng_);
    return heston_joint_step(x, gamma, p_, dw1, dw2);
  }

 private:
  HestonParams p_;
  Rng rng_;
  std::normal_distribution<double> normal_;
};

void heston_price_path(const Window<3>& w, const HestonParams& p, PricePath& out);
PricePath heston_price_path(const Window<3>& w, const HestonParams& p);

// ---- BNS ------------------------------------------------------------------

struct BnsParams {
  double s0 = 50.0;
  double r = 0.05;
  double rho = -1.0;
  double mu = 1.0;
  TemperedStableMeasure jump{0.01, 1.0, 0.5};
  double x_init = 0.0;
  double v_init = std::numeric_limits<double>::quiet_NaN();  // NaN: E[Z_1]/mu
  TruncationPolicy truncation{};
  JumpScheme scheme = JumpScheme::Poisson;
  bool compensate = false;

  void validate() const;
  double initial_variance() const;
  // Stationary mean of v, E[Z_1]/mu.
  double stationary_mean() const;
  // Growth rate g with E[S_t] = s0 e^{g t}: r + log E[e^{rho Z_1}].
  double growth_rate() const;
};

using BnsState = State<2>;  // (x, v)

// x' = x + gamma (r - v/2) + sqrt(v) dW + rho dZ,  v' = v - gamma mu v + dZ.
BnsState bns_joint_step(const BnsState& x, double gamma, const BnsParams& p, double dz, double dw);

class BnsDriver {
 public:
  BnsDriver(const BnsParams& p, Rng rng);
  BnsState operator()(const BnsState& x, double gamma, std::size_t);

 private:
  BnsParams p_;
  Rng rng_;
  TruncatedJumpSource jumps_;
  std::normal_distribution<double> normal_;
};

void bns_price_path(const Window<2>& w, const BnsParams& p, PricePath& out);
PricePath bns_price_path(const Window<2>& w, const BnsParams& p);

// ---- Model bundles used by the pricers ---------------------------------------

struct HestonModel {
  static constexpr std::size_t kDim = 3;
  using Driver = HestonDriver;
  HestonParams params;

  double s0() const { return params.s0; }
  double rate() const { return params.r; }
  double growth_rate() const { return params.r; }
  State<3> initial_state() const { return {params.initial_variance(), params.y_init, 0.0}; }
  Driver make_driver(Rng rng) const { return HestonDriver(params, rng); }
  void price_path(const Window<3>& w, PricePath& out) const { heston_price_path(w, params, out); }
};

struct BnsModel {
  static constexpr std::size_t kDim = 2;
  using Driver = BnsDriver;
  BnsParams params;

  double s0() const { return params.s0; }
  double rate() const { return params.r; }
  double growth_rate() const { return params.growth_rate(); }
  State<2> initial_state() const { return {params.x_init, params.initial_variance()}; }
  Driver make_driver(Rng rng) const { return BnsDriver(params, rng); }
  void price_path(const Window<2>& w, PricePath& out) const { bns_price_path(w, params, out); }
};

}  // namespace ergodic
