#include "losslab/gradcheck.hpp"

#include <cstdio>

namespace losslab {

std::vector<CurveSpec> default_curve_specs(double alpa_gamma_neg) {
  std::vector<CurveSpec> specs;
  specs.push_back({"ce", LossSpec::asl(0.0, 0.0, 0.0)});
  specs.push_back({"focal", LossSpec::focal(0.5)});
  specs.push_back({"asl", LossSpec::asl(0.0, 0.01, 0.01)});
  LossSpec alpa = LossSpec::alpa_custom(1.0, 1.0, 0.0, alpa_gamma_neg);
  specs.push_back({"alpa", alpa});
  return specs;
}

std::vector<GradCurve> grad_curves(int grid_size, const std::vector<CurveSpec>& specs) {
  if (grid_size < 2) {
    throw std::invalid_argument("grid size must be >= 2");
  }
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  const double lo = 0.001;
  const double hi = 0.999;
  for (int i = 0; i < grid_size; ++i) {
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
  }

  std::vector<GradCurve> curves;
  curves.reserve(specs.size());
  for (const auto& cs : specs) {
    GradCurve curve;
    curve.loss_label = cs.label;
    curve.probabilities = grid;
    curve.gradients.reserve(grid.size());
    for (double p : grid) {
      double g;
      if (cs.label == "ce" || cs.label == "asl") {
        g = asl_term(p, 0, cs.spec).dvalue_dlogit;
      } else if (cs.label == "focal") {
        g = focal_term(p, 0, cs.spec).dvalue_dlogit;
      } else if (cs.label == "alpa") {
        g = alpa_neg_grad(p, cs.spec.gamma_neg);
      } else {
        throw std::invalid_argument("unknown loss label: " + cs.label);
      }
      curve.gradients.push_back(g);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_grad_curve_csv(std::ostream& out, const std::vector<GradCurve>& curves) {
  static const char* kOrder[4] = {"ce", "focal", "asl", "alpa"};
  const GradCurve* by_label[4] = {nullptr, nullptr, nullptr, nullptr};
  for (const auto& c : curves) {
    for (int j = 0; j < 4; ++j) {
      if (c.loss_label == kOrder[j]) {
        by_label[j] = &c;
      }
    }
  }
  for (int j = 0; j < 4; ++j) {
    if (by_label[j] == nullptr) {
      throw std::invalid_argument(std::string("missing curve for column: ") + kOrder[j]);
    }
  }
  const std::size_t rows = by_label[0]->probabilities.size();
  out << "p,grad_ce,grad_focal,grad_asl,grad_alpa\n";
  char buf[64];
  for (std::size_t i = 0; i < rows; ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", by_label[0]->probabilities[i]);
    out << buf;
    for (int j = 0; j < 4; ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", by_label[j]->gradients[i]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace losslab
