#include "ergodic/levy.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ergodic {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Gk15 {
  double kronrod;
  double gauss;
};

template <class F>
Gk15 gk15(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  double k = fc * kWgk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fs = f(mid - dx) + f(mid + dx);
    k += kWgk[j] * fs;
    if (j % 2 == 1) g += kWg[j / 2] * fs;
  }
  return {k * half, g * half};
}

template <class F>
double adaptive(const F& f, double a, double b, double abs_tol, int depth) {
  const Gk15 r = gk15(f, a, b);
  if (std::abs(r.kronrod - r.gauss) <= abs_tol || depth >= 60) return r.kronrod;
  const double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, 0.5 * abs_tol, depth + 1) +
         adaptive(f, mid, b, 0.5 * abs_tol, depth + 1);
}

// Adaptive Gauss-Kronrod to a relative tolerance on a finite interval.
template <class F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-13) {
  const Gk15 first = gk15(f, a, b);
  const double scale = std::max(std::abs(first.kronrod), 1e-300);
  return adaptive(f, a, b, rel_tol * scale, 0);
}

// 2^-53 * (k + 1/2): uniform on (0,1), never 0 or 1.
double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// int_a^b y^p pi(dy) by one 15-point rule; only used on short intervals
// away from 0 where the integrand is smooth.
double piece_moment(const TemperedStableMeasure& m, double a, double b, int p) {
  return gk15([&](double y) { return std::pow(y, p) * m.density(y); }, a, b).kronrod;
}

}  // namespace

void TemperedStableMeasure::validate() const {
  if (!(c > 0.0)) throw std::domain_error("tempered stable: c must be positive");
  if (!(lambda >= 0.0)) throw std::domain_error("tempered stable: lambda must be non-negative");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("tempered stable: alpha must lie in (0,1)");
}

double TemperedStableMeasure::density(double y) const {
  if (y <= 0.0) return 0.0;
  return c * std::exp(-lambda * y) * std::pow(y, -1.0 - alpha);
}

double TruncationPolicy::threshold(double gamma, double alpha) const {
  return scale * std::pow(gamma, exponent(alpha));
}

double tail_moment(const TemperedStableMeasure& m, double u, int p) {
  m.validate();
  if (!(u > 0.0)) throw std::domain_error("tail moment: threshold must be positive");
  if (p < 0 || p > 2) throw std::domain_error("tail moment: order must be 0, 1 or 2");
  const double beta = m.alpha - p;
  if (beta > 0.0) {
    // y = u t^(-1/beta) turns y^(p-1-alpha) dy into a constant.
    const double pref = m.c / beta * std::pow(u, -beta);
    if (m.lambda == 0.0) return pref;
    const double lu = m.lambda * u;
    return pref * integrate([&](double t) { return t > 0.0 ? std::exp(-lu * std::pow(t, -1.0 / beta)) : 0.0; },
                            0.0, 1.0);
  }
  if (m.lambda == 0.0) throw std::domain_error("tail moment: diverges without tempering");
  // y = u + s/lambda, s = t/(1-t).
  const double l = m.lambda;
  const double e = p - 1.0 - m.alpha;
  const double f0 = m.c * std::exp(-l * u) / l;
  return f0 * integrate(
                  [&](double t) {
                    if (t >= 1.0) return 0.0;
                    const double s = t / (1.0 - t);
                    return std::pow(u + s / l, e) * std::exp(-s) / ((1.0 - t) * (1.0 - t));
                  },
                  0.0, 1.0);
}

double tail_intensity(const TemperedStableMeasure& m, double u) { return tail_moment(m, u, 0); }

double head_moment(const TemperedStableMeasure& m, double u, int p) {
  m.validate();
  if (!(u > 0.0)) throw std::domain_error("head moment: threshold must be positive");
  if (p < 1 || p > 2) throw std::domain_error("head moment: order must be 1 or 2");
  // y = u t^(1/g) with g = p - alpha > 0 removes the singularity at 0.
  const double g = p - m.alpha;
  const double pref = m.c * std::pow(u, g) / g;
  if (m.lambda == 0.0) return pref;
  const double lu = m.lambda * u;
  return pref * integrate([&](double t) { return std::exp(-lu * std::pow(t, 1.0 / g)); }, 0.0, 1.0);
}

double small_jump_variance(const TemperedStableMeasure& m, double u) { return head_moment(m, u, 2); }

double subordinator_mean(const TemperedStableMeasure& m) {
  m.validate();
  if (!(m.lambda > 0.0)) throw std::domain_error("subordinator mean: needs lambda > 0");
  return m.c * std::tgamma(1.0 - m.alpha) * std::pow(m.lambda, m.alpha - 1.0);
}

double laplace_exponent(const TemperedStableMeasure& m, double theta) {
  m.validate();
  if (!(theta < m.lambda)) throw std::domain_error("laplace exponent: needs theta < lambda");
  return m.c * std::tgamma(-m.alpha) * (std::pow(m.lambda - theta, m.alpha) - std::pow(m.lambda, m.alpha));
}

double sample_jump_above(const TemperedStableMeasure& m, double u, Rng& rng) {
  if (!(u > 0.0)) throw std::domain_error("jump sampler: threshold must be positive");
  for (;;) {
    const double y = u * std::pow(uniform_open(rng), -1.0 / m.alpha);
    if (m.lambda == 0.0) return y;
    if (uniform_open(rng) < std::exp(-m.lambda * (y - u))) return y;
  }
}

namespace {

double poisson_sum(const TemperedStableMeasure& m, double u, double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0.0;
  std::poisson_distribution<long> count(mean);
  const long n = count(rng);
  double z = 0.0;
  for (long i = 0; i < n; ++i) z += sample_jump_above(m, u, rng);
  return z;
}

}  // namespace

namespace {

// Repeated calls at the same (measure, threshold) reuse the quadratures.
struct TailCache {
  TemperedStableMeasure m{0.0, -1.0, 0.0};
  double u = -1.0;
  double rate = 0.0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double head_var = std::numeric_limits<double>::quiet_NaN();
};

TailCache& cache_for(const TemperedStableMeasure& m, double u) {
  thread_local TailCache c;
  if (c.u != u || c.m.c != m.c || c.m.lambda != m.lambda || c.m.alpha != m.alpha) {
    c.rate = tail_intensity(m, u);
    c.m = m;
    c.u = u;
    c.mean = std::numeric_limits<double>::quiet_NaN();
    c.head_var = std::numeric_limits<double>::quiet_NaN();
  }
  return c;
}

}  // namespace

double compound_poisson_increment(const TemperedStableMeasure& m, double u, double gamma,
                                  bool compensate, Rng& rng) {
  if (!(gamma > 0.0)) throw std::invalid_argument("compound poisson: gamma must be positive");
  TailCache& c = cache_for(m, u);
  double z = poisson_sum(m, u, gamma * c.rate, rng);
  if (compensate) {
    if (std::isnan(c.mean)) c.mean = tail_moment(m, u, 1);
    z -= gamma * c.mean;
  }
  return z;
}

double wienerized_increment(const TemperedStableMeasure& m, double u, double gamma, bool compensate,
                            Rng& rng) {
  const double z = compound_poisson_increment(m, u, gamma, compensate, rng);
  TailCache& c = cache_for(m, u);
  if (std::isnan(c.head_var)) c.head_var = small_jump_variance(m, u);
  std::normal_distribution<double> normal;
  return z + std::sqrt(gamma * c.head_var) * normal(rng);
}

TruncatedJumpSource::TruncatedJumpSource(const TemperedStableMeasure& m, JumpScheme scheme,
                                         bool compensate)
    : m_(m), scheme_(scheme), compensate_(compensate) {
  m_.validate();
  if (compensate_ && !(m_.lambda > 0.0)) {
    throw std::domain_error("jump source: compensation needs lambda > 0");
  }
}

void TruncatedJumpSource::move_threshold(double u) {
  if (!(u > 0.0)) throw std::domain_error("jump source: threshold must be positive");
  if (u == u_) return;
  if (u_ > 0.0 && u < u_ && u_ < 1.5 * u) {
    rate_ += piece_moment(m_, u, u_, 0);
    if (compensate_) mean_above_ += piece_moment(m_, u, u_, 1);
    if (scheme_ == JumpScheme::Wienerized) head_var_ -= piece_moment(m_, u, u_, 2);
  } else {
    rate_ = tail_intensity(m_, u);
    if (compensate_) mean_above_ = tail_moment(m_, u, 1);
    if (scheme_ == JumpScheme::Wienerized) head_var_ = small_jump_variance(m_, u);
  }
  u_ = u;
}

double TruncatedJumpSource::increment(double u, double gamma, Rng& rng) {
  if (!(gamma > 0.0)) throw std::invalid_argument("jump source: gamma must be positive");
  move_threshold(u);
  double z = poisson_sum(m_, u_, gamma * rate_, rng);
  if (compensate_) z -= gamma * mean_above_;
  if (scheme_ == JumpScheme::Wienerized) z += std::sqrt(gamma * std::max(head_var_, 0.0)) * normal_(rng);
  return z;
}

}  // namespace ergodic
