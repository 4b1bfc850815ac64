#include "ergodic/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ergodic {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double norm_pdf(double x) { return 0.3989422804014326779399461 * std::exp(-0.5 * x * x); }

// (e^x - 1)/x with the removable singularity filled in.
double expm1_ratio(double x) { return std::abs(x) < 1e-300 ? 1.0 : std::expm1(x) / x; }

}  // namespace

void OptionSpec::validate() const {
  if (!(strike >= 0.0) || !std::isfinite(strike)) throw std::invalid_argument("option: strike must be >= 0");
  if (!(maturity > 0.0) || !std::isfinite(maturity)) throw std::invalid_argument("option: maturity must be positive");
  if (!std::isfinite(rate)) throw std::invalid_argument("option: rate must be finite");
}

double asian_payoff(const PricePath& path, const OptionSpec& spec) {
  const double a = path.integral() / spec.maturity;
  const double x = spec.kind == OptionKind::Call ? a - spec.strike : spec.strike - a;
  return spec.discount() * std::max(x, 0.0);
}

double european_payoff(const PricePath& path, const OptionSpec& spec) {
  const double s = path.terminal();
  const double x = spec.kind == OptionKind::Call ? s - spec.strike : spec.strike - s;
  return spec.discount() * std::max(x, 0.0);
}

double forward_average(double s0, double growth, double T) { return s0 * expm1_ratio(growth * T); }

double parity_rhs(double s0, double r, double T, double K) {
  // s0 (1 - e^{-rT})/(rT) = s0 e^{-rT} (e^{rT} - 1)/(rT).
  return std::exp(-r * T) * (forward_average(s0, r, T) - K);
}

double asian_parity_rhs(double s0, double r, double growth, double T, double K) {
  return std::exp(-r * T) * (forward_average(s0, growth, T) - K);
}

double european_parity_rhs(double s0, double r, double growth, double T, double K) {
  return std::exp(-r * T) * (s0 * std::exp(growth * T) - K);
}

double bs_call(double s0, double K, double T, double r, double sigma) {
  const double df = std::exp(-r * T);
  if (K <= 0.0) return s0;
  const double sd = sigma * std::sqrt(T);
  if (sd <= 0.0) return std::max(s0 - K * df, 0.0);
  const double d1 = (std::log(s0 / K) + r * T) / sd + 0.5 * sd;
  const double d2 = d1 - sd;
  return s0 * norm_cdf(d1) - K * df * norm_cdf(d2);
}

double bs_vega(double s0, double K, double T, double r, double sigma) {
  const double sd = sigma * std::sqrt(T);
  if (sd <= 0.0 || K <= 0.0) return 0.0;
  const double d1 = (std::log(s0 / K) + r * T) / sd + 0.5 * sd;
  return s0 * norm_pdf(d1) * std::sqrt(T);
}

double implied_vol(double price, double s0, double K, double T, double r) {
  const double lower = std::max(s0 - K * std::exp(-r * T), 0.0);
  if (!(price > lower && price < s0)) {
    std::ostringstream os;
    os.precision(12);
    os << "implied vol: price " << price << " outside the no-arbitrage band (" << lower << ", " << s0 << ")";
    throw BandViolation(os.str());
  }
  const double tol = 1e-10 * s0;
  auto f = [&](double s) { return bs_call(s0, K, T, r, s) - price; };

  // Bracket, widened when the price sits beyond the nominal [1e-6, 5].
  double lo = 1e-6, hi = 5.0;
  if (f(lo) > 0.0) lo = 0.0;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw BandViolation("implied vol: no finite volatility reproduces the price");
  }

  double sigma = std::clamp(0.2, lo, hi);
  for (int it = 0; it < 50; ++it) {
    const double diff = f(sigma);
    if (diff > 0.0) hi = std::min(hi, sigma); else lo = std::max(lo, sigma);
    const double vega = bs_vega(s0, K, T, r, sigma);
    if (!(vega > 0.0)) break;
    double next = sigma - diff / vega;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - sigma);
    sigma = next;
    if (std::abs(f(sigma)) <= tol && step <= 1e-13 * std::max(1.0, sigma)) return sigma;
  }

  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) hi = mid; else lo = mid;
  }
  sigma = 0.5 * (lo + hi);
  if (!(std::abs(f(sigma)) <= tol)) {
    throw BandViolation("implied vol: bisection did not reach the price tolerance");
  }
  return sigma;
}

}  // namespace ergodic
