#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "losslab/losses.hpp"

namespace losslab {

/// Central finite difference (L(z+h) - L(z-h)) / 2h.
template <typename F>
double fd_gradient(F&& loss, double z, double h) {
  if (!(h > 0.0 && h <= 1e-2)) {
    throw std::invalid_argument("fd step h must lie in (0, 1e-2]");
  }
  const double up = loss(z + h);
  const double dn = loss(z - h);
  if (!std::isfinite(up) || !std::isfinite(dn)) {
    throw std::runtime_error("non-finite loss in finite difference");
  }
  return (up - dn) / (2.0 * h);
}

/// d/dz of the unweighted negative core: (g+1) * p^(g+1) * (1-p).
inline double alpa_neg_grad(double p, double gamma_neg) {
  if (gamma_neg < 0.0) {
    throw std::invalid_argument("gamma_neg must be >= 0");
  }
  return (gamma_neg + 1.0) * std::pow(p, gamma_neg + 1.0) * (1.0 - p);
}

/// One negative-branch gradient curve over a probability grid.
struct GradCurve {
  std::vector<double> probabilities;
  std::vector<double> gradients;
  std::string loss_label;
};

struct CurveSpec {
  std::string label;  // one of: ce, focal, asl, alpa
  LossSpec spec;
};

/// The default quadruple: alpa (gamma_neg = 4) against asl (m = 0.01,
/// gamma_neg = 0.01), ce (asl with m = 0, gamma_neg = 0) and focal
/// (gamma = 0.5).
std::vector<CurveSpec> default_curve_specs(double alpa_gamma_neg = 4.0);

/// Evaluate dL-/dz for each configured loss on a uniform probability grid
/// over [0.001, 0.999]. The alpa column plots the unweighted negative core.
std::vector<GradCurve> grad_curves(int grid_size, const std::vector<CurveSpec>& specs);

/// CSV with the fixed header p,grad_ce,grad_focal,grad_asl,grad_alpa and
/// values printed to 9 significant digits.
void write_grad_curve_csv(std::ostream& out, const std::vector<GradCurve>& curves);

}  // namespace losslab
