#include "ergodic/models.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ergodic/schemes.hpp"

namespace ergodic {

namespace {

// (e^x - 1)/x, continuous at 0.
double expm1_ratio(double x) { return std::abs(x) < 1e-300 ? 1.0 : std::expm1(x) / x; }

}  // namespace

double PricePath::integral() const {
  double acc = 0.0;
  for (const PriceSegment& s : segments_) {
    acc += std::exp(s.log_level) * s.length * expm1_ratio(s.log_slope * s.length);
  }
  return acc;
}

double PricePath::terminal() const {
  if (segments_.empty()) throw std::logic_error("price path: empty");
  const PriceSegment& s = segments_.back();
  return std::exp(s.log_level + s.log_slope * s.length);
}

// ---- Heston ---------------------------------------------------------------

void HestonParams::validate() const {
  if (!(s0 > 0.0)) throw std::invalid_argument("heston: s0 must be positive");
  if (!std::isfinite(r)) throw std::invalid_argument("heston: r must be finite");
  if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("heston: rho must lie in [-1,1]");
  if (!(k > 0.0)) throw std::invalid_argument("heston: k must be positive");
  if (!(theta > 0.0)) throw std::invalid_argument("heston: theta must be positive");
  if (!(sigma_v > 0.0)) throw std::invalid_argument("heston: sigma_v must be positive");
  if (!(2.0 * k * theta > sigma_v * sigma_v)) {
    throw std::invalid_argument("heston: positivity requires 2 k theta > sigma_v^2");
  }
  if (!(initial_variance() >= 0.0)) throw std::invalid_argument("heston: v_init must be non-negative");
  if (!std::isfinite(y_init)) throw std::invalid_argument("heston: y_init must be finite");
}

std::vector<std::string> HestonParams::warnings() const {
  std::vector<std::string> out;
  const double lhs = 2.0 * k * theta / (sigma_v * sigma_v);
  const double rhs = 1.0 + 2.0 * std::sqrt(6.0) / sigma_v;
  if (!(lhs > rhs)) {
    std::ostringstream os;
    os << "heston: 2k*theta/sigma_v^2 = " << lhs << " does not exceed 1 + 2*sqrt(6)/sigma_v = " << rhs
       << "; convergence of the reflected scheme is not covered, proceeding anyway";
    out.push_back(os.str());
  }
  return out;
}

HestonState heston_joint_step(const HestonState& x, double gamma, const HestonParams& p, double dw1,
                              double dw2) {
  const double v = x[0];
  return {cir_reflected_step(v, gamma, p.k, p.theta, p.sigma_v, dw2), ou_companion_step(x[1], gamma, v, dw1),
          dw2};
}

HestonState heston_joint_step(const HestonState& x, double gamma, const HestonParams& p, Rng& rng) {
  std::normal_distribution<double> normal;
  const double root = std::sqrt(gamma);
  const double dw1 = root * normal(rng);
  const double dw2 = root * normal(rng);
  return heston_joint_step(x, gamma, p, dw1, dw2);
}

void heston_price_path(const Window<3>& w, const HestonParams& p, PricePath& out) {
  out.clear();
  const double log_s0 = std::log(p.s0);
  const double kt = p.k * p.theta;
  const double c_rho = p.rho / p.sigma_v;
  const double c_perp = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));
  const double v0 = w.front()[0];
  const double y0 = w.front()[1];
  double int_v = 0.0;
  double int_y = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const Segment<3> seg = w.segment(j);
    const double v = seg.state[0];
    const double y = seg.state[1];
    const double t = seg.start;
    const double lambda_t = v - v0 - kt * t + p.k * int_v;  // times sigma_v
    const double m_t = y - y0 + int_y;
    const double level = log_s0 + p.r * t - 0.5 * int_v + c_rho * lambda_t + c_perp * m_t;
    const double slope = p.r - 0.5 * v + c_rho * (p.k * v - kt) + c_perp * y;
    out.push({t, seg.length, level, slope});
    int_v += v * seg.length;
    int_y += y * seg.length;
  }
}

PricePath heston_price_path(const Window<3>& w, const HestonParams& p) {
  PricePath out;
  heston_price_path(w, p, out);
  return out;
}

// ---- BNS ------------------------------------------------------------------

void BnsParams::validate() const {
  if (!(s0 > 0.0)) throw std::invalid_argument("bns: s0 must be positive");
  if (!std::isfinite(r)) throw std::invalid_argument("bns: r must be finite");
  if (!(rho <= 0.0)) throw std::invalid_argument("bns: rho must be non-positive");
  if (!(mu > 0.0)) throw std::invalid_argument("bns: mu must be positive");
  jump.validate();
  if (!(jump.lambda > 0.0)) throw std::invalid_argument("bns: jump lambda must be positive");
  if (!(truncation.scale > 0.0) || !(truncation.exponent(jump.alpha) > 0.0)) {
    throw std::invalid_argument("bns: truncation scale and power must be positive");
  }
  if (!(initial_variance() >= 0.0)) throw std::invalid_argument("bns: v_init must be non-negative");
  if (!std::isfinite(x_init)) throw std::invalid_argument("bns: x_init must be finite");
}

double BnsParams::stationary_mean() const { return subordinator_mean(jump) / mu; }

double BnsParams::initial_variance() const { return std::isnan(v_init) ? stationary_mean() : v_init; }

double BnsParams::growth_rate() const { return r + laplace_exponent(jump, rho); }

BnsState bns_joint_step(const BnsState& x, double gamma, const BnsParams& p, double dz, double dw) {
  const double v = x[1];
  if (!(v >= 0.0)) throw std::domain_error("bns step: variance must be non-negative");
  return {x[0] + gamma * (p.r - 0.5 * v) + std::sqrt(v) * dw + p.rho * dz, v - gamma * p.mu * v + dz};
}

BnsDriver::BnsDriver(const BnsParams& p, Rng rng)
    : p_(p), rng_(rng), jumps_(p.jump, p.scheme, p.compensate) {}

BnsState BnsDriver::operator()(const BnsState& x, double gamma, std::size_t) {
  const double dz = jumps_.increment(p_.truncation.threshold(gamma, p_.jump.alpha), gamma, rng_);
  const double dw = std::sqrt(gamma) * normal_(rng_);
  return bns_joint_step(x, gamma, p_, dz, dw);
}

void bns_price_path(const Window<2>& w, const BnsParams& p, PricePath& out) {
  out.clear();
  const double log_s0 = std::log(p.s0);
  const double x0 = w.front()[0];
  for (std::size_t j = 0; j < w.size(); ++j) {
    const Segment<2> seg = w.segment(j);
    out.push({seg.start, seg.length, log_s0 + seg.state[0] - x0, p.r - 0.5 * seg.state[1]});
  }
}

PricePath bns_price_path(const Window<2>& w, const BnsParams& p) {
  PricePath out;
  bns_price_path(w, p, out);
  return out;
}

}  // namespace ergodic
