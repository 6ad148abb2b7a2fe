#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace losslab {

// Global probability clamp. Small enough to perturb double-precision losses
// below 1e-11, large enough to keep every log and pole finite.
inline constexpr double kProbEps = 1e-12;

/// Logistic sigmoid in the overflow-safe branch form.
template <typename Scalar>
Scalar sigmoid(Scalar z) {
  assert(std::isfinite(z));
  if (z >= Scalar(0)) {
    return Scalar(1) / (Scalar(1) + std::exp(-z));
  }
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

/// d sigmoid/dz expressed through p = sigmoid(z).
template <typename Scalar>
Scalar sigmoid_derivative(Scalar p) {
  return p * (Scalar(1) - p);
}

/// Clamp a probability into [eps, 1 - eps].
template <typename Scalar>
Scalar clamp_prob(Scalar p, Scalar eps = Scalar(kProbEps)) {
  if (std::isnan(p)) {
    throw std::invalid_argument("invalid probability: NaN");
  }
  if (!(eps > Scalar(0)) || !(eps < Scalar(0.5))) {
    throw std::invalid_argument("invalid probability clamp: eps must lie in (0, 0.5)");
  }
  return std::min(std::max(p, eps), Scalar(1) - eps);
}

/// -log(p) for an already clamped probability. Non-negative and finite.
template <typename Scalar>
Scalar safe_neg_log(Scalar p) {
  if (p == Scalar(0)) {
    throw std::domain_error("log singularity: probability is exactly 0");
  }
  return -std::log(p);
}

}  // namespace losslab
