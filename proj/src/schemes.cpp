#include "ergodic/schemes.hpp"

#include <cmath>
#include <stdexcept>

namespace ergodic {

double cir_reflected_step(double v, double gamma, double k, double theta, double sigma_v, double dw) {
  if (!(v >= 0.0)) throw std::domain_error("cir step: variance must be non-negative");
  if (!(gamma > 0.0)) throw std::invalid_argument("cir step: gamma must be positive");
  return std::abs(v + k * gamma * (theta - v) + sigma_v * std::sqrt(v) * dw);
}

double ou_companion_step(double y, double gamma, double v, double dw1) {
  if (!(v >= 0.0)) throw std::domain_error("ou step: variance must be non-negative");
  if (!(gamma > 0.0)) throw std::invalid_argument("ou step: gamma must be positive");
  return y - gamma * y + std::sqrt(v) * dw1;
}

}  // namespace ergodic
