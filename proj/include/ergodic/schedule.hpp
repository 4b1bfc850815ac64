#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ergodic {

// Step sequence gamma_n = c2 * n^-rho2 and weight sequence eta_n = c1 * n^-rho1
// (n >= 1), with lazily extended prefix sums Gamma_n = sum gamma_k and
// H_n = sum eta_k (Gamma_0 = H_0 = 0).
//
// Prefix sums are cached in blocks and accumulated with Neumaier compensation.
// Extension mutates the cache: a Schedule may be read concurrently only after
// the last call to extend() that any reader depends on.
class Schedule {
 public:
  // Throws std::domain_error unless c1, c2 > 0, rho1 in [0,1], rho2 in (0,1].
  static Schedule polynomial(double c1, double rho1, double c2, double rho2);

  // gamma_n = step and eta_n = weight for all n. Not a valid decreasing-step
  // schedule; used to make index bookkeeping checkable by hand.
  static Schedule constant(double step, double weight = 1.0);

  double c1() const noexcept { return c1_; }
  double rho1() const noexcept { return rho1_; }
  double c2() const noexcept { return c2_; }
  double rho2() const noexcept { return rho2_; }

  double gamma(std::size_t n) const;
  double eta(std::size_t n) const;

  // Gamma_n and H_n, extending the cache if needed.
  double time(std::size_t n);
  double weight_sum(std::size_t n);

  // Cached lookups; throw std::out_of_range if n > extended().
  double time_cached(std::size_t n) const;
  double weight_sum_cached(std::size_t n) const;

  void extend(std::size_t n);
  std::size_t extended() const noexcept { return times_.size() - 1; }

  // True iff Gamma_to - Gamma_from <= T. Every window predicate goes through
  // this one comparison so that N and tau stay exactly dual in floating point.
  bool fits(std::size_t from, std::size_t to, double horizon);

  // N(n,T) = max{k >= n : Gamma_k - Gamma_n <= T}. Gallops upward from
  // max(n, hint), so sequential sweeps passing the previous answer are
  // amortized O(1).
  std::size_t horizon_index(std::size_t n, double horizon, std::size_t hint = 0);

  // tau(n,T) = min{k >= 0 : N(k,T) >= n} = min{k <= n : Gamma_n - Gamma_k <= T}.
  std::size_t window_start(std::size_t n, double horizon);

 private:
  Schedule(double c1, double rho1, double c2, double rho2);

  double c1_, rho1_, c2_, rho2_;
  std::vector<double> times_{0.0};
  std::vector<double> weights_{0.0};
  double time_raw_ = 0.0;
  double time_comp_ = 0.0;
  double weight_raw_ = 0.0;
  double weight_comp_ = 0.0;
};

struct WindowIndices {
  std::size_t n = 0;
  double horizon = 0.0;
  std::size_t end = 0;    // N(n,T)
  std::size_t start = 0;  // tau(n,T)
};

WindowIndices window_indices(Schedule& sched, std::size_t n, double horizon);

enum class Verdict { Pass, Fail, NotCovered };

const char* to_string(Verdict v) noexcept;

// Outcome of a step/weight condition check. The closed-form verdict for the
// polynomial family is authoritative; the numeric fields are evidence over
// n <= scan_limit only.
struct Diagnostic {
  std::string name;
  Verdict verdict = Verdict::NotCovered;
  double observed = 0.0;
  std::size_t scan_limit = 0;
  std::string detail;

  bool pass() const noexcept { return verdict == Verdict::Pass; }
};

inline constexpr std::size_t kDefaultScanLimit = 1'000'000;

// eta_n <= C gamma_n H_n^eps. observed = sup of eta_n / (gamma_n H_n^eps).
Diagnostic check_weight_step_condition(Schedule& sched, double eps,
                                       std::size_t scan_limit = kDefaultScanLimit);

// (1/H_n) sum_{k<=n} max_{l>k} |eta_l - eta_{l-1}| / gamma_l -> 0.
// observed = the Cesaro mean at n = scan_limit.
Diagnostic check_invariance_condition(Schedule& sched,
                                      std::size_t scan_limit = kDefaultScanLimit);

// sum_k (N(k,T) - N(k-1,T)) / H_k^{s(1-eps)} < infinity, with the companion
// monotonicity requirement. Throws std::domain_error if rho1 == 1 or s <= 1.
// observed = partial sum up to scan_limit.
Diagnostic check_series_condition(Schedule& sched, double s, double eps, double horizon,
                                  std::size_t scan_limit = kDefaultScanLimit);

}  // namespace ergodic
