#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ergodic/engine.hpp"
#include "ergodic/rng.hpp"
#include "ergodic/schedule.hpp"

using namespace ergodic;

namespace {

struct Identity {
  State<1> operator()(const State<1>& x, double, std::size_t) const { return x; }
};

// Records which indices the driver was asked to produce.
struct Counter {
  std::vector<std::size_t>* seen;
  State<1> operator()(const State<1>& x, double, std::size_t k) const {
    seen->push_back(k);
    return {x[0] + 1.0};
  }
};

struct RandomWalk {
  Rng rng;
  std::normal_distribution<double> normal;
  State<1> operator()(const State<1>& x, double gamma, std::size_t) {
    return {x[0] - gamma * x[0] + std::sqrt(gamma) * normal(rng)};
  }
};

}  // namespace

TEST(FunctionalAverage, Examples) {
  FunctionalAverage a;
  a = update_average(a, 0.7, 4.2);
  EXPECT_DOUBLE_EQ(a.value, 4.2);

  FunctionalAverage b;
  b.update(1.0, 2.0);
  b.update(0.5, 5.0);
  EXPECT_NEAR(b.value, 3.0, 1e-15);
  EXPECT_EQ(b.n, 2u);
  EXPECT_DOUBLE_EQ(b.weight, 1.5);

  FunctionalAverage c;
  for (int i = 1; i <= 100; ++i) c.update(1.0 / i, 1.25);
  EXPECT_DOUBLE_EQ(c.value, 1.25);
}

TEST(FunctionalAverage, RecurrenceMatchesDirectSum) {
  Rng rng(11, 0);
  std::uniform_real_distribution<double> w(0.01, 2.0), f(-5.0, 5.0);
  FunctionalAverage a;
  long double num = 0.0L, den = 0.0L;
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 10000; ++i) {
    const double eta = w(rng), v = f(rng);
    a.update(eta, v);
    num += static_cast<long double>(eta) * v;
    den += eta;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    const double direct = static_cast<double>(num / den);
    ASSERT_LE(std::abs(a.value - direct), 1e-10 * std::max(1.0, std::abs(direct)));
    ASSERT_GE(a.value, lo);
    ASSERT_LE(a.value, hi);
  }
}

TEST(WindowIntegral, Examples) {
  const std::vector<double> times{0.0, 1.0};
  const std::vector<State<1>> states{{1.0}, {3.0}};
  const Window<1> w(0, times, states, 1.5);
  EXPECT_DOUBLE_EQ(window_integral(w, [](const State<1>& x) { return x[0]; }), 2.5);
  EXPECT_DOUBLE_EQ(window_integral(w, [](const State<1>&) { return 1.0; }), 1.5);

  const std::vector<double> t3{10.0, 10.25, 10.75};
  const std::vector<State<1>> s3{{0.4}, {0.4}, {0.4}};
  const Window<1> c(7, t3, s3, 2.0);
  EXPECT_NEAR(window_integral(c, [](const State<1>& x) { return x[0]; }), 0.8, 1e-15);
  EXPECT_EQ(c.last_index(), 9u);

  const std::vector<double> bad{0.0, 2.0};
  EXPECT_THROW(Window<1>(0, bad, states, 1.5), std::invalid_argument);
}

TEST(Engine, HandTracedConstantStep) {
  std::vector<std::size_t> seen;
  Engine<1, Counter> e(Counter{&seen}, Schedule::constant(1.0), 1.5, {0.0});
  std::vector<std::pair<std::size_t, std::size_t>> windows;
  for (int i = 0; i < 3; ++i) {
    e.iterate([&](const Window<1>& w, double eta) {
      EXPECT_DOUBLE_EQ(eta, 1.0);
      windows.emplace_back(w.index(), w.last_index());
      EXPECT_DOUBLE_EQ(w.front()[0], static_cast<double>(w.index()));
    });
  }
  EXPECT_EQ(windows, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(e.buffer().first(), 3u);
  EXPECT_EQ(e.buffer().end() - 1, e.schedule().horizon_index(3, 1.5));
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3, 4}));
  EXPECT_THROW(e.buffer().at(2), std::out_of_range);
}

TEST(Engine, BufferHoldsExactlyTheNextWindow) {
  Schedule s = Schedule::polynomial(1.0, 1.0 / 3.0, 1.0, 1.0 / 3.0);
  for (double T : {0.2, 1.0, 3.0}) {
    Engine<1, RandomWalk> e(RandomWalk{Rng(1, 0), {}}, s, T, {0.0});
    for (std::size_t n = 1; n <= 20000; ++n) {
      e.iterate([&](const Window<1>& w, double) {
        // Every index the window exposes is retained.
        ASSERT_TRUE(e.buffer().contains(w.index()));
        ASSERT_TRUE(e.buffer().contains(w.last_index()));
        ASSERT_EQ(w.last_index(), e.schedule().horizon_index(w.index(), T));
      });
      ASSERT_EQ(e.buffer().first(), n);
      ASSERT_EQ(e.buffer().end() - 1, e.schedule().horizon_index(n, T));
      ASSERT_EQ(e.last_simulated(), e.buffer().end() - 1);
    }
  }
}

TEST(Engine, ConstantFunctionalAndFrozenPath) {
  Schedule s = Schedule::polynomial(1.0, 1.0 / 3.0, 1.0, 1.0 / 3.0);
  Engine<1, RandomWalk> a(RandomWalk{Rng(3, 0), {}}, s, 1.0, {0.3});
  const RunResult ra = a.run([](const Window<1>&) { return 1.0; }, 1000);
  EXPECT_DOUBLE_EQ(ra.average.value, 1.0);

  Engine<1, Identity> b(Identity{}, s, 1.0, {0.7});
  const RunResult rb = b.run([](const Window<1>& w) { return w.front()[0]; }, 1000);
  EXPECT_DOUBLE_EQ(rb.average.value, 0.7);
  EXPECT_NEAR(rb.average.weight, s.weight_sum(1000), 1e-9);
}

TEST(Engine, PhiOneIsBitIdentical) {
  Schedule s = Schedule::polynomial(1.0, 1.0 / 3.0, 1.0, 1.0 / 3.0);
  auto f = [](const Window<1>& w) { return window_integral(w, [](const State<1>& x) { return x[0] * x[0]; }); };
  Engine<1, RandomWalk> a(RandomWalk{Rng(5, 2), {}}, s, 1.0, {0.0});
  Engine<1, RandomWalk> b(RandomWalk{Rng(5, 2), {}}, s, 1.0, {0.0});
  const RunResult ra = a.run(f, 5000);
  const RunResult rb = b.run(f, 5000, [](const State<1>&) { return 1.0; });
  EXPECT_EQ(ra.average.value, rb.average.value);
  ASSERT_EQ(ra.checkpoints.size(), rb.checkpoints.size());
}

TEST(Engine, CheckpointGrid) {
  Schedule s = Schedule::polynomial(1.0, 1.0 / 3.0, 1.0, 1.0 / 3.0);
  Engine<1, Identity> e(Identity{}, s, 0.5, {1.0});
  const RunResult r = e.run([](const Window<1>&) { return 2.0; }, 1000);
  std::vector<std::size_t> ns;
  for (const Checkpoint& c : r.checkpoints) ns.push_back(c.n);
  EXPECT_EQ(ns, (std::vector<std::size_t>{1, 10, 100, 1000}));

  Engine<1, Identity> g(Identity{}, s, 0.5, {1.0});
  const RunResult rg = g.run([](const Window<1>&) { return 2.0; }, 250);
  EXPECT_EQ(rg.checkpoints.back().n, 250u);
  EXPECT_EQ(rg.checkpoints.size(), 4u);
}

TEST(Engine, DriverFailureCarriesIndex) {
  struct Blows {
    State<1> operator()(const State<1>& x, double, std::size_t k) const {
      return {k == 37 ? std::nan("") : x[0]};
    }
  };
  Schedule s = Schedule::polynomial(1.0, 1.0 / 3.0, 1.0, 1.0 / 3.0);
  try {
    Engine<1, Blows> e(Blows{}, s, 1.0, {0.0});
    e.run([](const Window<1>&) { return 0.0; }, 100);
    FAIL() << "expected a numerical error";
  } catch (const NumericalError& err) {
    EXPECT_EQ(err.index(), 37u);
  }

  struct Throws {
    State<1> operator()(const State<1>& x, double, std::size_t k) const {
      if (k == 12) throw std::domain_error("bad state");
      return x;
    }
  };
  try {
    Engine<1, Throws> e(Throws{}, s, 1.0, {0.0});
    e.run([](const Window<1>&) { return 0.0; }, 100);
    FAIL() << "expected a numerical error";
  } catch (const NumericalError& err) {
    EXPECT_EQ(err.index(), 12u);
  }
}

TEST(Marginal, Examples) {
  MarginalAccumulator<1> one(10, {0.0}, {10.0});
  one.add(1.0, {4.0});
  auto st = one.stats();
  EXPECT_DOUBLE_EQ(st.mean[0], 4.0);
  EXPECT_DOUBLE_EQ(st.variance[0], 0.0);

  MarginalAccumulator<1> two(4, {-1.0}, {3.0});
  two.add(1.0, {0.0});
  two.add(1.0, {2.0});
  st = two.stats();
  EXPECT_DOUBLE_EQ(st.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(st.variance[0], 1.0);
  EXPECT_DOUBLE_EQ(st.histograms[0].total(), 2.0);

  MarginalAccumulator<1> empty;
  EXPECT_THROW(empty.stats(), std::logic_error);
}

TEST(Marginal, TotalWeightIsH) {
  Schedule s = Schedule::polynomial(1.0, 1.0 / 3.0, 1.0, 1.0 / 3.0);
  RandomWalk drv{Rng(9, 0), {}};
  MarginalAccumulator<1> acc(20, {-3.0}, {3.0});
  std::vector<std::size_t> cps;
  marginal_run<1>(drv, s, State<1>{0.0}, 1000, acc, [&](std::size_t n, const auto& a) {
    cps.push_back(n);
    EXPECT_NEAR(a.total_weight(), s.weight_sum(n), 1e-12 * s.weight_sum(n));
  });
  EXPECT_EQ(cps, (std::vector<std::size_t>{1, 10, 100, 1000}));
  const auto st = acc.stats();
  double mass = st.histograms[0].underflow + st.histograms[0].overflow;
  for (double m : st.histograms[0].mass) {
    EXPECT_GE(m, 0.0);
    mass += m;
  }
  EXPECT_NEAR(mass, s.weight_sum(1000), 1e-9);
}

TEST(BatchMeans, IidErrorBar) {
  // Independent draws: batch-means error should match sigma/sqrt(n).
  Rng rng(21, 0);
  std::normal_distribution<double> normal;
  const int n = 64000;
  BatchMeans bm(static_cast<double>(n));
  for (int i = 0; i < n; ++i) bm.add(1.0, normal(rng));
  EXPECT_NEAR(bm.std_error(), 1.0 / std::sqrt(static_cast<double>(n)), 0.35 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(bm.sample_stddev(), 1.0, 0.02);
}
