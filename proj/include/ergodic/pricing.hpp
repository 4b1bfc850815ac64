#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ergodic/engine.hpp"
#include "ergodic/models.hpp"
#include "ergodic/rng.hpp"
#include "ergodic/schedule.hpp"

namespace ergodic {

enum class OptionKind { Call, Put };

struct OptionSpec {
  double strike = 50.0;
  double maturity = 1.0;
  OptionKind kind = OptionKind::Call;
  double rate = 0.05;

  // K >= 0 (K = 0 is allowed as a degenerate put), T > 0.
  void validate() const;
  double discount() const { return std::exp(-rate * maturity); }
};

using AsianSpec = OptionSpec;

// e^{-rT} ((1/T) int_0^T S ds - K)_+ for calls, (K - A)_+ for puts.
double asian_payoff(const PricePath& path, const OptionSpec& spec);
// e^{-rT} (S_T - K)_+ for calls, (K - S_T)_+ for puts.
double european_payoff(const PricePath& path, const OptionSpec& spec);

// (s0/(rT)) (1 - e^{-rT}) - K e^{-rT}; s0 - K at r = 0.
double parity_rhs(double s0, double r, double T, double K);

// E[(1/T) int_0^T S dt] when E[S_t] = s0 e^{g t}.
double forward_average(double s0, double growth, double T);

// C - P for the Asian option when E[S_t] = s0 e^{g t}; equals parity_rhs at g = r.
double asian_parity_rhs(double s0, double r, double growth, double T, double K);
// C - P for the European option when E[S_T] = s0 e^{g T}.
double european_parity_rhs(double s0, double r, double growth, double T, double K);

enum class Leg { Direct, Put, Call };

struct PriceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::vector<Checkpoint> checkpoints;
  // Which leg was averaged: Direct when parity is off, otherwise the
  // smaller-variance leg from which value was reconstructed.
  Leg leg = Leg::Direct;
  // Raw estimates on the same windows.
  double call_estimate = 0.0;
  double put_estimate = 0.0;
  double underlying_estimate = 0.0;  // weighted mean of A (Asian) or S_T (European)
  double payoff_stddev = 0.0;
};

double bs_call(double s0, double K, double T, double r, double sigma);
double bs_vega(double s0, double K, double T, double r, double sigma);

class BandViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Black-Scholes implied volatility: safeguarded Newton from 0.2, falling back
// to bisection after 50 iterations without convergence. Converged means
// |bs_call(sigma) - price| <= 1e-10 s0. Throws BandViolation unless
// (s0 - K e^{-rT})_+ < price < s0.
double implied_vol(double price, double s0, double K, double T, double r);

namespace detail {

enum class Payoff { Asian, European };

template <class Model>
PriceEstimate price_with_engine(const Model& model, Schedule sched, const OptionSpec& spec,
                                std::size_t n_iters, bool use_parity, Rng rng, Payoff payoff) {
  spec.validate();
  if (n_iters == 0) throw std::invalid_argument("pricing: n_iters must be positive");
  if (std::abs(spec.rate - model.rate()) > 1e-15) {
    throw std::invalid_argument("pricing: option rate differs from the model rate");
  }
  const double T = spec.maturity;
  const double K = spec.strike;
  const double disc = spec.discount();
  const double g = model.growth_rate();
  const double fwd = payoff == Payoff::Asian ? forward_average(model.s0(), g, T)
                                             : model.s0() * std::exp(g * T);
  const double rhs = disc * (fwd - K);  // C - P

  PriceEstimate out;
  if (use_parity) {
    out.leg = K <= fwd ? Leg::Put : Leg::Call;
  }
  const bool report_call = spec.kind == OptionKind::Call;

  Engine<Model::kDim, typename Model::Driver> engine(model.make_driver(rng), std::move(sched), T,
                                                     model.initial_state());
  const double total = engine.schedule().weight_sum(n_iters);
  BatchMeans bm_call(total), bm_put(total);
  FunctionalAverage call_avg, put_avg, under_avg;
  PricePath path;

  auto reported = [&]() {
    switch (out.leg) {
      case Leg::Put:
        return report_call ? put_avg.value + rhs : put_avg.value;
      case Leg::Call:
        return report_call ? call_avg.value : call_avg.value - rhs;
      case Leg::Direct:
        break;
    }
    return report_call ? call_avg.value : put_avg.value;
  };

  for (std::size_t i = 0; i < n_iters; ++i) {
    engine.iterate([&](const Window<Model::kDim>& w, double eta) {
      model.price_path(w, path);
      const double a = payoff == Payoff::Asian ? path.integral() / T : path.terminal();
      const double c = disc * std::max(a - K, 0.0);
      const double p = disc * std::max(K - a, 0.0);
      call_avg.update(eta, c);
      put_avg.update(eta, p);
      under_avg.update(eta, a);
      bm_call.add(eta, c);
      bm_put.add(eta, p);
    });
    if (is_checkpoint(i + 1, n_iters)) out.checkpoints.push_back({i + 1, reported()});
  }

  out.n = n_iters;
  out.value = reported();
  out.call_estimate = call_avg.value;
  out.put_estimate = put_avg.value;
  out.underlying_estimate = under_avg.value;
  const bool put_leg = out.leg == Leg::Put || (out.leg == Leg::Direct && !report_call);
  out.std_error = put_leg ? bm_put.std_error() : bm_call.std_error();
  out.payoff_stddev = put_leg ? bm_put.sample_stddev() : bm_call.sample_stddev();
  return out;
}

}  // namespace detail

// Weighted occupation-measure estimate of the Asian price. With use_parity,
// the smaller-variance leg (put for K <= forward average, else call) is
// averaged and the requested kind is recovered through call-put parity.
template <class Model>
PriceEstimate price_asian(const Model& model, Schedule sched, const OptionSpec& spec, std::size_t n_iters,
                          bool use_parity, Rng rng) {
  return detail::price_with_engine(model, std::move(sched), spec, n_iters, use_parity, rng,
                                   detail::Payoff::Asian);
}

template <class Model>
PriceEstimate price_european(const Model& model, Schedule sched, const OptionSpec& spec,
                             std::size_t n_iters, Rng rng, bool use_parity = false) {
  return detail::price_with_engine(model, std::move(sched), spec, n_iters, use_parity, rng,
                                   detail::Payoff::European);
}

}  // namespace ergodic
