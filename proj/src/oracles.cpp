#include "ergodic/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ergodic/engine.hpp"

namespace ergodic {

namespace {

constexpr std::size_t kChunk = 2048;
// Oracle streams live far above the per-row streams used by the pricers.
constexpr std::uint64_t kOracleStreamBase = std::uint64_t{1} << 48;

struct ChunkSums {
  double call = 0.0, call_sq = 0.0;
  double put = 0.0, put_sq = 0.0;
  double avg = 0.0;
};

ChunkSums simulate_chunk(const HestonParams& p, const OptionSpec& spec, std::size_t paths, std::size_t steps,
                         Rng rng) {
  const double h = spec.maturity / static_cast<double>(steps);
  const double sqh = std::sqrt(h);
  const double perp = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));
  const double disc = std::exp(-spec.rate * spec.maturity);
  const double shape = p.stationary_shape();
  std::gamma_distribution<double> gamma(shape, p.theta / shape);
  std::normal_distribution<double> normal;
  ChunkSums out;
  for (std::size_t i = 0; i < paths; ++i) {
    double v = gamma(rng);
    double log_s = std::log(p.s0);
    double s_prev = p.s0;
    double area = 0.0;
    for (std::size_t j = 0; j < steps; ++j) {
      const double z_v = normal(rng);
      const double z_s = p.rho * z_v + perp * normal(rng);
      const double vp = std::max(v, 0.0);
      const double root = std::sqrt(vp);
      log_s += (spec.rate - 0.5 * vp) * h + root * sqh * z_s;
      v += p.k * (p.theta - vp) * h + p.sigma_v * root * sqh * z_v;
      const double s = std::exp(log_s);
      area += 0.5 * (s_prev + s) * h;
      s_prev = s;
    }
    const double a = area / spec.maturity;
    const double c = disc * std::max(a - spec.strike, 0.0);
    const double q = disc * std::max(spec.strike - a, 0.0);
    out.call += c;
    out.call_sq += c * c;
    out.put += q;
    out.put_sq += q * q;
    out.avg += a;
  }
  return out;
}

}  // namespace

double sample_stationary_variance(const HestonParams& p, Rng& rng) {
  const double shape = p.stationary_shape();
  std::gamma_distribution<double> gamma(shape, p.theta / shape);
  return gamma(rng);
}

PriceEstimate cir_direct_stationary_price(const HestonParams& p, const OptionSpec& spec, std::size_t n_paths,
                                          double fine_step, std::uint64_t seed, unsigned threads) {
  p.validate();
  spec.validate();
  if (n_paths == 0) throw std::invalid_argument("cir oracle: n_paths must be positive");
  if (!(fine_step > 0.0 && fine_step <= 1e-3 * spec.maturity)) {
    throw std::invalid_argument("cir oracle: fine_step must lie in (0, 1e-3 T]");
  }
  const auto steps = static_cast<std::size_t>(std::ceil(spec.maturity / fine_step - 1e-9));
  const std::size_t chunks = (n_paths + kChunk - 1) / kChunk;
  std::vector<ChunkSums> sums(chunks);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t c = next++; c < chunks; c = next++) {
      const std::size_t paths = std::min(kChunk, n_paths - c * kChunk);
      sums[c] = simulate_chunk(p, spec, paths, steps, Rng(seed, kOracleStreamBase + c));
    }
  };
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < t; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  ChunkSums total;
  for (const ChunkSums& s : sums) {
    total.call += s.call;
    total.call_sq += s.call_sq;
    total.put += s.put;
    total.put_sq += s.put_sq;
    total.avg += s.avg;
  }
  const double n = static_cast<double>(n_paths);
  auto se = [n](double sum, double sq) {
    if (n < 2.0) return 0.0;
    const double m = sum / n;
    return std::sqrt(std::max(0.0, (sq / n - m * m) * n / (n - 1.0)) / n);
  };
  PriceEstimate out;
  out.n = n_paths;
  out.call_estimate = total.call / n;
  out.put_estimate = total.put / n;
  out.underlying_estimate = total.avg / n;
  const bool call = spec.kind == OptionKind::Call;
  out.value = call ? out.call_estimate : out.put_estimate;
  out.std_error = call ? se(total.call, total.call_sq) : se(total.put, total.put_sq);
  out.payoff_stddev = out.std_error * std::sqrt(n);
  return out;
}

OuReport ou_stationary_check(double sigma, Schedule sched, std::size_t n_iters, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("ou check: sigma must be >= 0");
  if (n_iters == 0) throw std::invalid_argument("ou check: n_iters must be positive");
  Rng rng(seed, kOracleStreamBase - 1);
  std::normal_distribution<double> normal;
  auto driver = [&](const State<1>& y, double gamma, std::size_t) -> State<1> {
    return {y[0] - gamma * y[0] + sigma * std::sqrt(gamma) * normal(rng)};
  };
  const double spread = std::max(sigma, 1e-3);
  MarginalAccumulator<1> acc(64, {-4.0 * spread}, {4.0 * spread});
  marginal_run<1>(driver, sched, State<1>{0.0}, n_iters, acc, [](std::size_t, const auto&) {});
  const MarginalStats<1> st = acc.stats();
  return {st.mean[0], st.variance[0], st.skewness[0], 0.5 * sigma * sigma, n_iters};
}

namespace {

void check_measure(const TemperedStableMeasure& m, double u) {
  if (!(m.c > 0.0) || !(m.lambda >= 0.0) || !(m.alpha > 0.0 && m.alpha < 1.0)) {
    throw std::domain_error("levy oracle: invalid measure");
  }
  if (!(u > 0.0) || !std::isfinite(u)) throw std::domain_error("levy oracle: u must be positive");
}

double tail_integral(const TemperedStableMeasure& m, double u, int order) {
  const double e = order - 1.0 - m.alpha;
  if (m.lambda == 0.0 && e >= -1.0) return std::numeric_limits<double>::infinity();
  // Integrate in x = y/u so the integrand is O(1) near the lower end.
  auto f = [&](double x) { return std::pow(x, e) * std::exp(-m.lambda * u * x); };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double v = integrator.integrate([&](double s) { return f(1.0 + s); }, 0.0,
                                        std::numeric_limits<double>::infinity(), 1e-12);
  return m.c * std::pow(u, e + 1.0) * v;
}

}  // namespace

LevyMoments levy_moment_oracle(const TemperedStableMeasure& m, double u, int order) {
  check_measure(m, u);
  if (order != 1 && order != 2) throw std::domain_error("levy oracle: order must be 1 or 2");
  const double e = order - 1.0 - m.alpha;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double head = m.c * std::pow(u, e + 1.0) *
                      integrator.integrate([&](double x) { return std::pow(x, e) * std::exp(-m.lambda * u * x); },
                                           0.0, 1.0, 1e-12);
  return {tail_integral(m, u, order), head};
}

double levy_intensity_oracle(const TemperedStableMeasure& m, double u) {
  check_measure(m, u);
  return tail_integral(m, u, 0);
}

}  // namespace ergodic
