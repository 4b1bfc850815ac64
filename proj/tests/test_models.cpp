#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ergodic/engine.hpp"
#include "ergodic/models.hpp"
#include "ergodic/rng.hpp"
#include "ergodic/schedule.hpp"

using namespace ergodic;

namespace {

// Uniform grid of n steps of size h, horizon n*h.
std::vector<double> grid(std::size_t n, double h) {
  std::vector<double> t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = 0.25 + h * static_cast<double>(j);
  return t;
}

std::vector<HestonState> random_heston_path(std::size_t n, double h, Rng& rng) {
  HestonParams p;
  std::vector<HestonState> xs{{0.012, 0.3, 0.0}};
  for (std::size_t j = 1; j < n; ++j) xs.push_back(heston_joint_step(xs.back(), h, p, rng));
  return xs;
}

}  // namespace

TEST(HestonStep, Examples) {
  HestonParams p;
  const HestonState a = heston_joint_step({p.theta, 0.0, 0.0}, 0.3, p, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(a[0], p.theta);
  EXPECT_DOUBLE_EQ(a[1], 0.0);

  const HestonState b = heston_joint_step({0.01, 1.0, 0.0}, 0.1, p, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(b[0], 0.01);
  EXPECT_DOUBLE_EQ(b[1], 0.9);

  // dW2 is recorded on the state.
  EXPECT_DOUBLE_EQ(heston_joint_step({0.01, 0.0, 0.0}, 0.1, p, 0.2, -0.05)[2], -0.05);
}

TEST(HestonStep, VarianceStaysNonNegative) {
  HestonParams p;
  Rng rng(31, 0);
  HestonState x{0.0, 0.0, 0.0};
  for (int i = 0; i < 200000; ++i) {
    x = heston_joint_step(x, 0.5, p, rng);
    ASSERT_GE(x[0], 0.0);
  }
}

TEST(HestonParams, ValidationAndWarnings) {
  HestonParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_FALSE(p.warnings().empty());
  EXPECT_DOUBLE_EQ(p.stationary_shape(), 4.0);
  EXPECT_NEAR(p.stationary_variance(), 2.5e-5, 1e-18);

  HestonParams bad = p;
  bad.sigma_v = 0.2;  // 2 k theta = sigma_v^2
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.rho = 1.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);

  HestonParams calm = p;
  calm.sigma_v = 0.01;
  calm.theta = 1.0;
  EXPECT_TRUE(calm.warnings().empty());
}

TEST(HestonPath, ZeroVolatilityAndStart) {
  HestonParams p;
  p.rho = 0.0;
  const auto t = grid(5, 0.2);
  const std::vector<HestonState> xs(5, HestonState{0.0, 0.0, 0.0});
  const PricePath s = heston_price_path(Window<3>(0, t, xs, 1.0), p);
  ASSERT_EQ(s.size(), 5u);
  for (std::size_t j = 0; j < s.size(); ++j) {
    EXPECT_NEAR(s.value(j), p.s0 * std::exp(p.r * 0.2 * static_cast<double>(j)), 1e-12);
  }
  EXPECT_NEAR(s.terminal(), p.s0 * std::exp(p.r), 1e-12);
  EXPECT_NEAR(s.integral(), p.s0 * std::expm1(p.r) / p.r, 1e-12);

  // S_0 = s0 on any window.
  Rng rng(2, 0);
  const auto ys = random_heston_path(5, 0.2, rng);
  EXPECT_DOUBLE_EQ(heston_price_path(Window<3>(9, t, ys, 1.0), HestonParams{}).value(0), p.s0);
}

TEST(HestonPath, LambdaVanishesOnConstantMeanPath) {
  HestonParams p;  // rho = 0.5
  const auto t = grid(8, 0.125);
  const std::vector<HestonState> xs(8, HestonState{p.theta, 0.0, 0.1});
  const PricePath s = heston_price_path(Window<3>(0, t, xs, 1.0), p);
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double tj = 0.125 * static_cast<double>(j);
    EXPECT_NEAR(std::log(s.value(j) / p.s0), (p.r - 0.5 * p.theta) * tj, 1e-14);
  }
}

TEST(HestonPath, RhoZeroIgnoresRecordedDw2) {
  HestonParams p;
  p.rho = 0.0;
  Rng rng(4, 0);
  const auto t = grid(60, 1.0 / 60.0);
  auto xs = random_heston_path(60, 1.0 / 60.0, rng);
  const PricePath a = heston_price_path(Window<3>(0, t, xs, 1.0), p);
  std::normal_distribution<double> normal;
  for (auto& x : xs) x[2] += normal(rng);
  const PricePath b = heston_price_path(Window<3>(0, t, xs, 1.0), p);
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_EQ(a.value(j), b.value(j));
  EXPECT_EQ(a.integral(), b.integral());
}

// With rho = 0, log(S_t/s0) - r t + (1/2) int v = M_t; check M against a
// direct recomputation of y_t - y_0 + int_0^t y ds.
TEST(HestonPath, MartingalePartMatchesDirectSum) {
  HestonParams p;
  p.rho = 0.0;
  Rng rng(6, 0);
  const std::size_t n = 400;
  const double h = 2.5 / static_cast<double>(n);
  const auto t = grid(n, h);
  const auto xs = random_heston_path(n, h, rng);
  const Window<3> w(3, t, xs, 2.5);
  const PricePath s = heston_price_path(w, p);
  double int_v = 0.0, int_y = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double tj = w.offset(j);
    const double m = xs[j][1] - xs[0][1] + int_y;
    const double recovered = std::log(s.value(j) / p.s0) - p.r * tj + 0.5 * int_v;
    ASSERT_NEAR(recovered, m, 1e-12) << j;
    int_v += xs[j][0] * h;
    int_y += xs[j][1] * h;
  }
}

TEST(PricePath, IntegralIsExactOnLogLinearSegments) {
  PricePath s;
  s.push({0.0, 0.5, std::log(50.0), 0.2});
  s.push({0.5, 0.5, std::log(40.0), -0.1});
  const double expect = 50.0 * std::expm1(0.1) / 0.2 + 40.0 * std::expm1(-0.05) / -0.1;
  EXPECT_NEAR(s.integral(), expect, 1e-12);
  EXPECT_NEAR(s.terminal(), 40.0 * std::exp(-0.05), 1e-12);
  EXPECT_DOUBLE_EQ(s.horizon(), 1.0);
  EXPECT_THROW(PricePath{}.terminal(), std::logic_error);
}

TEST(HestonDriver, StationaryGammaMoments) {
  HestonParams p;
  Schedule s = Schedule::polynomial(1.0, 1.0 / 3.0, 1.0, 1.0 / 3.0);
  HestonDriver drv(p, Rng(1, 0));
  MarginalAccumulator<3> acc(50, {0.0, -1.0, -1.0}, {0.05, 1.0, 1.0});
  marginal_run<3>(drv, s, HestonModel{p}.initial_state(), 1000000, acc, [](std::size_t, const auto&) {});
  const auto st = acc.stats();
  EXPECT_NEAR(st.mean[0], 0.01, 2e-4);
  EXPECT_NEAR(st.variance[0], 2.5e-5, 2.5e-6);
}

TEST(BnsStep, Examples) {
  BnsParams p;
  const BnsState a = bns_joint_step({0.3, 0.0}, 0.1, p, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(a[0], 0.3 + 0.1 * p.r);
  EXPECT_DOUBLE_EQ(a[1], 0.0);

  const BnsState b = bns_joint_step({0.0, 0.02}, 1e-12, p, 0.4, 0.0);
  EXPECT_NEAR(b[0], p.rho * 0.4, 1e-12);
  EXPECT_NEAR(b[1], 0.42, 1e-12);
  EXPECT_LE(b[0], 0.0);

  EXPECT_THROW(bns_joint_step({0.0, -1e-3}, 0.1, p, 0.0, 0.0), std::domain_error);
}

TEST(BnsParams, GrowthRateAndValidation) {
  BnsParams p;
  EXPECT_NO_THROW(p.validate());
  const double kappa = 0.01 * std::tgamma(-0.5) * (std::sqrt(2.0) - 1.0);
  EXPECT_NEAR(p.growth_rate(), p.r + kappa, 1e-14);
  EXPECT_NEAR(p.stationary_mean(), 0.01 * std::sqrt(M_PI), 1e-15);
  EXPECT_DOUBLE_EQ(HestonModel{}.growth_rate(), 0.05);

  BnsParams bad = p;
  bad.rho = 0.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.mu = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.v_init = -0.1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(BnsPath, Examples) {
  BnsParams p;
  const std::vector<double> t{3.0, 3.5};
  const std::vector<BnsState> xs{{1.7, 0.01}, {1.8, 0.02}};
  const PricePath s = bns_price_path(Window<2>(5, t, xs, 1.0), p);
  EXPECT_DOUBLE_EQ(s.value(0), p.s0);
  EXPECT_NEAR(s.value(1), p.s0 * std::exp(0.1), 1e-12);

  const std::vector<BnsState> flat(2, BnsState{-0.4, 0.0});
  const PricePath f = bns_price_path(Window<2>(0, t, flat, 1.0), p);
  EXPECT_DOUBLE_EQ(f.value(0), p.s0);
  EXPECT_DOUBLE_EQ(f.value(1), p.s0);
}

TEST(BnsDriver, VarianceNonNegativeAlongRun) {
  BnsParams p;
  Schedule s = Schedule::polynomial(1.0, 1.0 / 3.0, 1.0, 1.0 / 3.0);
  ASSERT_LE(s.gamma(1) * p.mu, 1.0);
  BnsDriver drv(p, Rng(3, 0));
  BnsState x = BnsModel{p}.initial_state();
  for (std::size_t n = 1; n <= 50000; ++n) {
    x = drv(x, s.gamma(n), n);
    ASSERT_GE(x[1], 0.0) << n;
    ASSERT_TRUE(std::isfinite(x[0]));
  }
}
