#pragma once

/**
 * Annealed temperature schedule for synthesis generation.
 *
 * The temperature at iteration i is tau0 * exp(-theta * i), clamped to the
 * wire protocol's legal [0, 2] range. theta = 0 degenerates to a constant
 * schedule; larger theta cools the chain faster, trading exploration for
 * convergence.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dialectic {

inline double clamp_temperature(double tau) {
  return std::clamp(tau, 0.0, 2.0);
}

inline double temperature_at(double tau0, double theta, int iteration_index) {
  if (iteration_index < 0) throw std::invalid_argument("iteration_index must be >= 0");
  if (theta < 0.0) throw std::invalid_argument("theta must be >= 0");
  if (iteration_index == 0) return clamp_temperature(tau0);  // exp(0) exactly
  return clamp_temperature(tau0 * std::exp(-theta * iteration_index));
}

}  // namespace dialectic
