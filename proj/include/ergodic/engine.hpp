#pragma once

// Weighted occupation measures over shifted windows of one decreasing-step
// trajectory.
//
// The engine simulates X_{Gamma_k} once, keeps only the indices still needed
// by some future window, and hands each shifted window X^{(k)} restricted to
// [0,T] to a caller-supplied functional. Windows are views into the buffer;
// they are valid only for the duration of the callback.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ergodic/schedule.hpp"

namespace ergodic {

template <std::size_t D>
using State = std::array<double, D>;

// Raised when the scheme produces a non-finite state; carries the index of the
// step that produced it.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (step " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

template <std::size_t D>
struct Segment {
  double start;   // offset from the window origin
  double length;  // gamma, or the truncated remainder for the last segment
  const State<D>& state;
};

// The stepwise-constant path X^{(k)} on [0,T]: states X_{Gamma_k}, ...,
// X_{Gamma_{N(k,T)}}, the last one held until T.
template <std::size_t D>
class Window {
 public:
  Window(std::size_t first_index, std::span<const double> times, std::span<const State<D>> states,
         double horizon)
      : first_(first_index), times_(times), states_(states), horizon_(horizon) {
    if (states_.empty() || times_.size() != states_.size()) {
      throw std::invalid_argument("window: empty or inconsistent view");
    }
    if (times_.back() - times_.front() > horizon_) {
      throw std::invalid_argument("window: grid extends past the horizon");
    }
  }

  std::size_t index() const noexcept { return first_; }
  std::size_t last_index() const noexcept { return first_ + states_.size() - 1; }
  std::size_t size() const noexcept { return states_.size(); }
  double horizon() const noexcept { return horizon_; }
  const State<D>& front() const noexcept { return states_.front(); }
  const State<D>& back() const noexcept { return states_.back(); }
  const State<D>& state(std::size_t j) const { return states_[j]; }

  // Offset of grid point j from the window origin.
  double offset(std::size_t j) const { return times_[j] - times_[0]; }

  Segment<D> segment(std::size_t j) const {
    const double start = offset(j);
    const double end = j + 1 < size() ? offset(j + 1) : horizon_;
    return {start, end - start, states_[j]};
  }

 private:
  std::size_t first_;
  std::span<const double> times_;
  std::span<const State<D>> states_;
  double horizon_;
};

// Exact integral over [0,T] of g along the stepwise path.
template <std::size_t D, class G>
double window_integral(const Window<D>& w, G&& g) {
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const Segment<D> seg = w.segment(j);
    acc += seg.length * g(seg.state);
  }
  return acc;
}

// Retained segment [first, last] of the simulated trajectory.
template <std::size_t D>
class PathBuffer {
 public:
  std::size_t first() const noexcept { return base_ + head_; }
  std::size_t end() const noexcept { return base_ + times_.size(); }  // one past the last index
  bool empty() const noexcept { return head_ == times_.size(); }
  bool contains(std::size_t k) const noexcept { return k >= first() && k < end(); }

  void push_back(double time, const State<D>& x) {
    times_.push_back(time);
    states_.push_back(x);
  }

  const State<D>& at(std::size_t k) const {
    if (!contains(k)) {
      throw std::out_of_range("path buffer: index " + std::to_string(k) + " is not retained");
    }
    return states_[k - base_];
  }
  double time_at(std::size_t k) const {
    if (!contains(k)) {
      throw std::out_of_range("path buffer: index " + std::to_string(k) + " is not retained");
    }
    return times_[k - base_];
  }

  void evict_below(std::size_t k) {
    if (k <= first()) return;
    head_ = std::min(k, end()) - base_;
    if (head_ > 4096 && 2 * head_ > times_.size()) {
      times_.erase(times_.begin(), times_.begin() + static_cast<std::ptrdiff_t>(head_));
      states_.erase(states_.begin(), states_.begin() + static_cast<std::ptrdiff_t>(head_));
      base_ += head_;
      head_ = 0;
    }
  }

  Window<D> window(std::size_t from, std::size_t to, double horizon) const {
    if (!contains(from) || !contains(to) || to < from) {
      throw std::out_of_range("path buffer: window [" + std::to_string(from) + ", " +
                              std::to_string(to) + "] is not retained");
    }
    const std::size_t off = from - base_;
    const std::size_t len = to - from + 1;
    return Window<D>(from, std::span<const double>(times_).subspan(off, len),
                     std::span<const State<D>>(states_).subspan(off, len), horizon);
  }

 private:
  std::size_t base_ = 0;
  std::size_t head_ = 0;
  std::vector<double> times_;
  std::vector<State<D>> states_;
};

// nu^(n)(F) maintained by the recurrence
//   nu^(n+1) = nu^(n) + eta_{n+1}/H_{n+1} (F(X^(n)) - nu^(n)).
struct FunctionalAverage {
  std::size_t n = 0;
  double value = 0.0;
  double weight = 0.0;  // H_n

  void update(double eta, double f) {
    weight += eta;
    value += (eta / weight) * (f - value);
    ++n;
  }
};

inline FunctionalAverage update_average(FunctionalAverage avg, double eta, double f_value) {
  avg.update(eta, f_value);
  return avg;
}

// Batch-means error bars for a weighted ergodic average. Consecutive windows
// overlap, so the per-window second moment badly underestimates the error;
// batches of equal total weight H_total/B are treated as independent instead.
class BatchMeans {
 public:
  BatchMeans(double total_weight, std::size_t batches = 32)
      : width_(total_weight / static_cast<double>(batches)), sums_(batches), weights_(batches) {
    if (!(total_weight > 0.0) || batches < 2) {
      throw std::invalid_argument("batch means: need positive total weight and >= 2 batches");
    }
  }

  void add(double eta, double f) {
    auto b = static_cast<std::size_t>(seen_ / width_);
    b = std::min(b, sums_.size() - 1);
    sums_[b] += eta * f;
    weights_[b] += eta;
    seen_ += eta;
    sq_ += eta * f * f;
    sum_ += eta * f;
  }

  double mean() const { return seen_ > 0.0 ? sum_ / seen_ : 0.0; }

  // Weighted standard deviation of the individual window values.
  double sample_stddev() const {
    if (seen_ <= 0.0) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, sq_ / seen_ - m * m));
  }

  double std_error() const {
    const double m = mean();
    double w = 0.0, w2 = 0.0, dev = 0.0;
    std::size_t used = 0;
    for (std::size_t b = 0; b < sums_.size(); ++b) {
      if (weights_[b] <= 0.0) continue;
      const double mb = sums_[b] / weights_[b];
      w += weights_[b];
      w2 += weights_[b] * weights_[b];
      dev += weights_[b] * (mb - m) * (mb - m);
      ++used;
    }
    if (used < 2) return 0.0;
    const double n_eff = w * w / w2;
    const double var = dev / w * n_eff / (n_eff - 1.0);
    return std::sqrt(var / n_eff);
  }

 private:
  double width_;
  double seen_ = 0.0;
  double sq_ = 0.0;
  double sum_ = 0.0;
  std::vector<double> sums_;
  std::vector<double> weights_;
};

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> mass;  // weighted, un-normalized
  double underflow = 0.0;
  double overflow = 0.0;

  double total() const {
    double t = underflow + overflow;
    for (double m : mass) t += m;
    return t;
  }
  double bin_lo(std::size_t i) const {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(mass.size());
  }
};

template <std::size_t D>
struct MarginalStats {
  double total_weight = 0.0;
  State<D> mean{};
  State<D> variance{};
  State<D> skewness{};
  std::array<Histogram, D> histograms;
};

// Weighted marginal nu_0^(n): weight eta_k at X_{Gamma_{k-1}}.
template <std::size_t D>
class MarginalAccumulator {
 public:
  explicit MarginalAccumulator(std::size_t bins = 200, State<D> lo = filled(0.0),
                               State<D> hi = filled(1.0)) {
    if (bins == 0) throw std::invalid_argument("marginal: need at least one bin");
    for (std::size_t i = 0; i < D; ++i) {
      if (!(hi[i] > lo[i])) throw std::invalid_argument("marginal: empty histogram range");
      hist_[i].lo = lo[i];
      hist_[i].hi = hi[i];
      hist_[i].mass.assign(bins, 0.0);
    }
  }

  void add(double weight, const State<D>& x) {
    if (!shifted_) {
      shift_ = x;
      shifted_ = true;
    }
    total_ += weight;
    for (std::size_t i = 0; i < D; ++i) {
      const double d = x[i] - shift_[i];
      s1_[i] += weight * d;
      s2_[i] += weight * d * d;
      s3_[i] += weight * d * d * d;
      Histogram& h = hist_[i];
      if (x[i] < h.lo) {
        h.underflow += weight;
      } else if (x[i] >= h.hi) {
        h.overflow += weight;
      } else {
        auto b = static_cast<std::size_t>((x[i] - h.lo) / (h.hi - h.lo) *
                                          static_cast<double>(h.mass.size()));
        h.mass[std::min(b, h.mass.size() - 1)] += weight;
      }
    }
  }

  double total_weight() const noexcept { return total_; }

  MarginalStats<D> stats() const {
    if (!(total_ > 0.0)) throw std::logic_error("marginal: no observations");
    MarginalStats<D> out;
    out.total_weight = total_;
    for (std::size_t i = 0; i < D; ++i) {
      const double m1 = s1_[i] / total_;
      const double m2 = s2_[i] / total_;
      const double m3 = s3_[i] / total_;
      const double var = std::max(0.0, m2 - m1 * m1);
      const double c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
      out.mean[i] = shift_[i] + m1;
      out.variance[i] = var;
      out.skewness[i] = var > 0.0 ? c3 / std::pow(var, 1.5) : 0.0;
    }
    out.histograms = hist_;
    return out;
  }

 private:
  static State<D> filled(double v) {
    State<D> s;
    s.fill(v);
    return s;
  }

  double total_ = 0.0;
  bool shifted_ = false;
  State<D> shift_{};
  State<D> s1_{}, s2_{}, s3_{};
  std::array<Histogram, D> hist_;
};

struct Checkpoint {
  std::size_t n;
  double value;
};

// Checkpoints: the powers of ten 1, 10, 100, ... not exceeding the run
// length, plus the final iteration.
inline bool is_checkpoint(std::size_t n, std::size_t n_final) {
  if (n == 0) return false;
  if (n == n_final) return true;
  std::size_t p = 1;
  while (p < n) p *= 10;
  return p == n;
}

struct RunResult {
  FunctionalAverage average;
  std::vector<Checkpoint> checkpoints;
  double std_error = 0.0;
  double sample_stddev = 0.0;
};

// Driver: State<D> driver(const State<D>& x, double gamma, std::size_t index)
// returns X_{Gamma_index} from X_{Gamma_{index-1}} and gamma_index.
template <std::size_t D, class Driver>
class Engine {
 public:
  Engine(Driver driver, Schedule schedule, double horizon, const State<D>& x0)
      : driver_(std::move(driver)), sched_(std::move(schedule)), horizon_(horizon) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
      throw std::invalid_argument("engine: horizon must be finite and positive");
    }
    buffer_.push_back(0.0, x0);
    last_ = 0;
    extend_to_window(0);
  }

  std::size_t iteration() const noexcept { return n_; }
  double horizon() const noexcept { return horizon_; }
  const PathBuffer<D>& buffer() const noexcept { return buffer_; }
  std::size_t last_simulated() const noexcept { return last_; }
  Schedule& schedule() noexcept { return sched_; }
  Driver& driver() noexcept { return driver_; }

  // One step of the procedure: hands window X^{(n)} and weight eta_{n+1} to fn,
  // then simulates up to N(n+1,T) and evicts indices below n+1.
  template <class Fn>
  void iterate(Fn&& fn) {
    const std::size_t k = n_;
    const Window<D> w = buffer_.window(k, last_, horizon_);
    fn(w, sched_.eta(k + 1));
    ++n_;
    extend_to_window(n_);
    buffer_.evict_below(n_);
  }

  // Folds F (or F * phi(X_0) when phi is given) into nu^(n) for n_iters
  // iterations, recording log-spaced checkpoints.
  template <class Functional>
  RunResult run(Functional&& functional, std::size_t n_iters,
                const std::function<double(const State<D>&)>& phi = {}) {
    RunResult out;
    const double total = sched_.weight_sum(n_ + n_iters) - sched_.weight_sum(n_);
    BatchMeans bm(total);
    for (std::size_t i = 0; i < n_iters; ++i) {
      iterate([&](const Window<D>& w, double eta) {
        double f = functional(w);
        if (phi) f *= phi(w.front());
        out.average.update(eta, f);
        bm.add(eta, f);
      });
      if (is_checkpoint(out.average.n, n_iters)) {
        out.checkpoints.push_back({out.average.n, out.average.value});
      }
    }
    out.std_error = bm.std_error();
    out.sample_stddev = bm.sample_stddev();
    return out;
  }

 private:
  void extend_to_window(std::size_t k) {
    while (sched_.fits(k, last_ + 1, horizon_)) {
      const std::size_t next = last_ + 1;
      const State<D>& x = buffer_.at(last_);
      State<D> y;
      try {
        y = driver_(x, sched_.gamma(next), next);
      } catch (const NumericalError&) {
        throw;
      } catch (const std::exception& e) {
        throw NumericalError(e.what(), next);
      }
      for (std::size_t i = 0; i < D; ++i) {
        if (!std::isfinite(y[i])) {
          throw NumericalError("engine: non-finite state coordinate " + std::to_string(i), next);
        }
      }
      buffer_.push_back(sched_.time(next), y);
      last_ = next;
    }
  }

  Driver driver_;
  Schedule sched_;
  double horizon_;
  PathBuffer<D> buffer_;
  std::size_t n_ = 0;
  std::size_t last_ = 0;
};

// Marginal-only pass: weight eta_n at X_{Gamma_{n-1}} for n = 1..n_iters,
// without building windows. on_checkpoint(n, acc) fires at the checkpoints.
template <std::size_t D, class Driver, class OnCheckpoint>
State<D> marginal_run(Driver& driver, Schedule& sched, State<D> x, std::size_t n_iters,
                      MarginalAccumulator<D>& acc, OnCheckpoint&& on_checkpoint) {
  for (std::size_t n = 1; n <= n_iters; ++n) {
    if (n > 1) {
      try {
        x = driver(x, sched.gamma(n - 1), n - 1);
      } catch (const NumericalError&) {
        throw;
      } catch (const std::exception& e) {
        throw NumericalError(e.what(), n - 1);
      }
      for (std::size_t i = 0; i < D; ++i) {
        if (!std::isfinite(x[i])) {
          throw NumericalError("marginal: non-finite state coordinate " + std::to_string(i), n - 1);
        }
      }
    }
    acc.add(sched.eta(n), x);
    if (is_checkpoint(n, n_iters)) on_checkpoint(n, acc);
  }
  return x;
}

}  // namespace ergodic
