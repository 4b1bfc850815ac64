#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ergodic/rng.hpp"
#include "ergodic/schemes.hpp"

using namespace ergodic;

TEST(LevyEuler, Examples) {
  EulerCoefficients<1, 1> none;
  EXPECT_DOUBLE_EQ((levy_euler_step<1, 1>({1.5}, 0.3, none, {{0.7}, {0.2}})[0]), 1.5);

  EulerCoefficients<1, 1> c;
  c.drift = [](const State<1>& x) { return State<1>{-x[0]}; };
  c.diffusion = [](const State<1>&) { return Matrix<1, 1>{{{1.0}}}; };
  c.jump = [](const State<1>&) { return Matrix<1, 1>{{{1.0}}}; };
  EXPECT_DOUBLE_EQ((levy_euler_step<1, 1>({1.0}, 0.25, c, {{0.0}, {0.0}})[0]), 0.75);
  EXPECT_DOUBLE_EQ((levy_euler_step<1, 1>({1.0}, 0.25, c, {{2.0}, {0.5}})[0]), 2.25);
}

TEST(LevyEuler, AffineInNoise) {
  EulerCoefficients<2, 2> c;
  c.drift = [](const State<2>& x) { return State<2>{std::sin(x[0]), -x[1]}; };
  c.diffusion = [](const State<2>& x) { return Matrix<2, 2>{{{1.0, x[0]}, {0.3, 2.0}}}; };
  c.jump = [](const State<2>& x) { return Matrix<2, 2>{{{x[1], 0.0}, {1.0, -1.0}}}; };
  Rng rng(4, 0);
  std::normal_distribution<double> n;
  for (int i = 0; i < 200; ++i) {
    const State<2> x{n(rng), n(rng)};
    const NoiseDraw<2> a{{n(rng), n(rng)}, {n(rng), n(rng)}};
    const NoiseDraw<2> b{{n(rng), n(rng)}, {n(rng), n(rng)}};
    NoiseDraw<2> sum;
    for (int j = 0; j < 2; ++j) {
      sum.gaussian[j] = a.gaussian[j] + b.gaussian[j];
      sum.jump[j] = a.jump[j] + b.jump[j];
    }
    const State<2> z = levy_euler_step<2, 2>(x, 0.1, c, {});
    const State<2> fa = levy_euler_step<2, 2>(x, 0.1, c, a);
    const State<2> fb = levy_euler_step<2, 2>(x, 0.1, c, b);
    const State<2> fs = levy_euler_step<2, 2>(x, 0.1, c, sum);
    for (int j = 0; j < 2; ++j) ASSERT_NEAR(fs[j] - z[j], (fa[j] - z[j]) + (fb[j] - z[j]), 1e-12);
  }
}

TEST(LevyEuler, NonFiniteNamesCoefficient) {
  EulerCoefficients<1, 1> c;
  c.diffusion = [](const State<1>&) { return Matrix<1, 1>{{{std::nan("")}}}; };
  try {
    levy_euler_step<1, 1>({1.0}, 0.1, c, {});
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("diffusion"), std::string::npos);
  }
  EXPECT_THROW((levy_euler_step<1, 1>({1.0}, 0.0, c, {})), std::invalid_argument);
}

TEST(LevyEuler, SmallStepMovesLittle) {
  EulerCoefficients<1, 1> c;
  c.drift = [](const State<1>& x) { return State<1>{2.0 - x[0]}; };
  c.diffusion = [](const State<1>&) { return Matrix<1, 1>{{{0.5}}}; };
  const double g = 1e-8;
  const State<1> y = levy_euler_step<1, 1>({1.0}, g, c, {{3.0}, {0.0}});
  EXPECT_LE(std::abs(y[0] - 1.0), 10.0 * (g + std::sqrt(g)));
}

TEST(CirReflected, Examples) {
  EXPECT_DOUBLE_EQ(cir_reflected_step(0.01, 0.3, 2.0, 0.01, 0.1, 0.0), 0.01);
  EXPECT_DOUBLE_EQ(cir_reflected_step(0.0, 0.1, 2.0, 0.01, 0.1, -7.0), 2.0 * 0.1 * 0.01);
  EXPECT_NEAR(cir_reflected_step(0.01, 0.1, 2.0, 0.01, 0.1, -0.5), 0.005, 1e-15);
}

TEST(CirReflected, NeverNegative) {
  Rng rng(8, 0);
  std::uniform_real_distribution<double> v(0.0, 0.2), g(1e-6, 1.0), w(-5.0, 5.0);
  for (int i = 0; i < 100000; ++i) {
    ASSERT_GE(cir_reflected_step(v(rng), g(rng), 2.0, 0.01, 0.5, w(rng)), 0.0);
  }
}

TEST(OuCompanion, Examples) {
  EXPECT_DOUBLE_EQ(ou_companion_step(0.0, 0.4, 0.0, 1.3), 0.0);
  EXPECT_DOUBLE_EQ(ou_companion_step(1.0, 0.5, 0.3, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(ou_companion_step(2.0, 0.25, 4.0, 0.3), 2.1);
}
