#include "ergodic/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ergodic {

namespace {

constexpr std::size_t kBlock = 1 << 14;

struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + comp; }
};

}  // namespace

Schedule::Schedule(double c1, double rho1, double c2, double rho2)
    : c1_(c1), rho1_(rho1), c2_(c2), rho2_(rho2) {}

Schedule Schedule::polynomial(double c1, double rho1, double c2, double rho2) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    throw std::domain_error("schedule: scales c1, c2 must be positive");
  }
  if (!(rho1 >= 0.0 && rho1 <= 1.0)) {
    throw std::domain_error("schedule: weight exponent rho1 must lie in [0,1]");
  }
  if (!(rho2 > 0.0 && rho2 <= 1.0)) {
    throw std::domain_error("schedule: step exponent rho2 must lie in (0,1]");
  }
  return Schedule(c1, rho1, c2, rho2);
}

Schedule Schedule::constant(double step, double weight) {
  if (!(step > 0.0) || !(weight > 0.0)) {
    throw std::domain_error("schedule: constant step and weight must be positive");
  }
  return Schedule(weight, 0.0, step, 0.0);
}

double Schedule::gamma(std::size_t n) const {
  if (n == 0) throw std::out_of_range("schedule: gamma is indexed from 1");
  return rho2_ == 0.0 ? c2_ : c2_ * std::pow(static_cast<double>(n), -rho2_);
}

double Schedule::eta(std::size_t n) const {
  if (n == 0) throw std::out_of_range("schedule: eta is indexed from 1");
  return rho1_ == 0.0 ? c1_ : c1_ * std::pow(static_cast<double>(n), -rho1_);
}

void Schedule::extend(std::size_t n) {
  if (n <= extended()) return;
  const std::size_t target = std::max(n, extended() + kBlock);
  times_.reserve(target + 1);
  weights_.reserve(target + 1);
  NeumaierSum ts{time_raw_, time_comp_};
  NeumaierSum ws{weight_raw_, weight_comp_};
  for (std::size_t k = extended() + 1; k <= target; ++k) {
    ts.add(gamma(k));
    ws.add(eta(k));
    times_.push_back(ts.value());
    weights_.push_back(ws.value());
  }
  time_raw_ = ts.sum;
  time_comp_ = ts.comp;
  weight_raw_ = ws.sum;
  weight_comp_ = ws.comp;
}

double Schedule::time(std::size_t n) {
  extend(n);
  return times_[n];
}

double Schedule::weight_sum(std::size_t n) {
  extend(n);
  return weights_[n];
}

double Schedule::time_cached(std::size_t n) const {
  if (n > extended()) throw std::out_of_range("schedule: time index beyond cached range");
  return times_[n];
}

double Schedule::weight_sum_cached(std::size_t n) const {
  if (n > extended()) throw std::out_of_range("schedule: weight index beyond cached range");
  return weights_[n];
}

bool Schedule::fits(std::size_t from, std::size_t to, double horizon) {
  return time(to) - time(from) <= horizon;
}

std::size_t Schedule::horizon_index(std::size_t n, double horizon, std::size_t hint) {
  std::size_t lo = std::max(n, hint);
  if (!fits(n, lo, horizon)) lo = n;
  // lo fits; gallop to the first index that does not.
  std::size_t stride = 1;
  std::size_t hi = lo + stride;
  while (fits(n, hi, horizon)) {
    lo = hi;
    stride *= 2;
    hi = lo + stride;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (fits(n, mid, horizon)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::size_t Schedule::window_start(std::size_t n, double horizon) {
  std::size_t lo = 0;
  std::size_t hi = n;  // fits(n, n) always holds
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (fits(mid, n, horizon)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

WindowIndices window_indices(Schedule& sched, std::size_t n, double horizon) {
  return {n, horizon, sched.horizon_index(n, horizon), sched.window_start(n, horizon)};
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::NotCovered:
      return "not-covered";
  }
  return "?";
}

Diagnostic check_weight_step_condition(Schedule& sched, double eps, std::size_t scan_limit) {
  if (!(eps < 1.0)) throw std::domain_error("weight/step condition requires eps < 1");
  sched.extend(scan_limit);
  double sup = 0.0;
  for (std::size_t n = 1; n <= scan_limit; ++n) {
    const double ratio = sched.eta(n) / (sched.gamma(n) * std::pow(sched.weight_sum_cached(n), eps));
    sup = std::max(sup, ratio);
  }

  // eta/gamma ~ n^(rho2-rho1); H_n ~ n^(1-rho1) for rho1 < 1, log n for rho1 = 1.
  const double r1 = sched.rho1();
  const double r2 = sched.rho2();
  bool bounded;
  std::ostringstream why;
  if (r1 < 1.0) {
    const double exponent = r2 - r1 - eps * (1.0 - r1);
    bounded = exponent <= 1e-12;
    why << "ratio ~ n^" << exponent;
  } else if (r2 < 1.0) {
    bounded = true;
    why << "ratio ~ n^" << (r2 - 1.0) << " / (log n)^" << eps;
  } else {
    bounded = eps >= 0.0;
    why << "ratio ~ (log n)^" << -eps;
  }

  Diagnostic d;
  d.name = "weight-step";
  d.verdict = bounded ? Verdict::Pass : Verdict::Fail;
  d.observed = sup;
  d.scan_limit = scan_limit;
  d.detail = why.str();
  return d;
}

Diagnostic check_invariance_condition(Schedule& sched, std::size_t scan_limit) {
  // |eta_l - eta_{l-1}|/gamma_l is eventually decreasing for the polynomial
  // family, so the sup over l > k is taken on (k, 2*scan_limit].
  const std::size_t top = 2 * scan_limit + 1;
  std::vector<double> suffix_max(top + 2, 0.0);
  for (std::size_t l = top; l >= 2; --l) {
    const double term = std::abs(sched.eta(l) - sched.eta(l - 1)) / sched.gamma(l);
    suffix_max[l] = std::max(suffix_max[l + 1], term);
  }
  double acc = 0.0;
  for (std::size_t k = 1; k <= scan_limit; ++k) acc += suffix_max[k + 1];
  const double cesaro = acc / sched.weight_sum(scan_limit);

  const double r1 = sched.rho1();
  const double r2 = sched.rho2();
  const bool ok = r1 == 0.0 || (r1 > std::max(0.0, 2.0 * r2 - 1.0) && r1 < 1.0);

  Diagnostic d;
  d.name = "invariance";
  d.verdict = ok ? Verdict::Pass : Verdict::Fail;
  d.observed = cesaro;
  d.scan_limit = scan_limit;
  std::ostringstream why;
  why << "rho1 " << (ok ? "in" : "not in") << " {0} U (" << std::max(0.0, 2.0 * r2 - 1.0) << ",1)";
  d.detail = why.str();
  return d;
}

Diagnostic check_series_condition(Schedule& sched, double s, double eps, double horizon,
                                  std::size_t scan_limit) {
  const double r1 = sched.rho1();
  const double r2 = sched.rho2();
  if (!(s > 1.0)) throw std::domain_error("series condition requires s > 1");
  if (r1 >= 1.0) throw std::domain_error("series condition is void for rho1 = 1");
  if (!(eps < 1.0)) throw std::domain_error("series condition requires eps < 1");

  const double power = s * (1.0 - eps);
  double partial = 0.0;
  std::size_t prev = sched.horizon_index(0, horizon);
  for (std::size_t k = 1; k <= scan_limit; ++k) {
    const std::size_t cur = sched.horizon_index(k, horizon, prev);
    partial += static_cast<double>(cur - prev) / std::pow(sched.weight_sum(k), power);
    prev = cur;
  }

  Diagnostic d;
  d.name = "series";
  d.observed = partial;
  d.scan_limit = scan_limit;
  const double threshold = 1.0 / (1.0 - r1);
  std::ostringstream why;
  if (r2 > 0.0 && r2 <= r1) {
    d.verdict = power > threshold ? Verdict::Pass : Verdict::Fail;
    why << "s(1-eps) = " << power << (power > threshold ? " > " : " <= ") << threshold;
  } else {
    d.verdict = Verdict::NotCovered;
    why << "closed form needs 0 < rho2 <= rho1";
  }
  d.detail = why.str();
  return d;
}

}  // namespace ergodic
