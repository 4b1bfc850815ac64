#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include "ergodic/engine.hpp"

namespace ergodic {

template <std::size_t Rows, std::size_t Cols>
using Matrix = std::array<std::array<double, Cols>, Rows>;

// dX = b(X) dt + sigma(X) dW + kappa(X) dZ, with W and Z both L-dimensional.
template <std::size_t D, std::size_t L>
struct EulerCoefficients {
  std::function<State<D>(const State<D>&)> drift;
  std::function<Matrix<D, L>(const State<D>&)> diffusion;
  std::function<Matrix<D, L>(const State<D>&)> jump;
};

// U ~ N(0, I_L) and the jump increment xi, drawn independently.
template <std::size_t L>
struct NoiseDraw {
  State<L> gaussian{};
  State<L> jump{};
};

namespace detail {

template <std::size_t N>
void require_finite(const State<N>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::domain_error(std::string("euler step: non-finite ") + what);
  }
}

template <std::size_t R, std::size_t C>
void require_finite(const Matrix<R, C>& m, const char* what) {
  for (const auto& row : m) {
    for (double x : row) {
      if (!std::isfinite(x)) throw std::domain_error(std::string("euler step: non-finite ") + what);
    }
  }
}

}  // namespace detail

// x + gamma b(x) + sqrt(gamma) sigma(x) U + kappa(x) xi, coefficients frozen at x.
template <std::size_t D, std::size_t L>
State<D> levy_euler_step(const State<D>& x, double gamma, const EulerCoefficients<D, L>& coeffs,
                         const NoiseDraw<L>& noise) {
  if (!(gamma > 0.0)) throw std::invalid_argument("euler step: gamma must be positive");
  State<D> out = x;
  if (coeffs.drift) {
    const State<D> b = coeffs.drift(x);
    detail::require_finite(b, "drift");
    for (std::size_t i = 0; i < D; ++i) out[i] += gamma * b[i];
  }
  if (coeffs.diffusion) {
    const Matrix<D, L> s = coeffs.diffusion(x);
    detail::require_finite(s, "diffusion coefficient");
    const double root = std::sqrt(gamma);
    for (std::size_t i = 0; i < D; ++i) {
      for (std::size_t j = 0; j < L; ++j) out[i] += root * s[i][j] * noise.gaussian[j];
    }
  }
  if (coeffs.jump) {
    const Matrix<D, L> k = coeffs.jump(x);
    detail::require_finite(k, "jump coefficient");
    for (std::size_t i = 0; i < D; ++i) {
      for (std::size_t j = 0; j < L; ++j) out[i] += k[i][j] * noise.jump[j];
    }
  }
  detail::require_finite(out, "state");
  return out;
}

// Reflected Euler step for dv = k(theta - v) dt + sigma_v sqrt(v) dW:
// |v + k gamma (theta - v) + sigma_v sqrt(v) dW|, with dW ~ N(0, gamma).
double cir_reflected_step(double v, double gamma, double k, double theta, double sigma_v, double dw);

// Euler step for dy = -y dt + sqrt(v) dW1: y (1 - gamma) + sqrt(v) dW1.
double ou_companion_step(double y, double gamma, double v, double dw1);

}  // namespace ergodic
