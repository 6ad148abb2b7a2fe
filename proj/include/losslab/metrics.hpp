#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "losslab/losses.hpp"  // ClassCounts

namespace losslab {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
};

ConfusionMatrix confusion(const Eigen::VectorXi& true_labels,
                          const Eigen::VectorXi& predicted_labels, int num_classes);

/// Per-class recall/F1 plus overall and balanced accuracy. Classes with no
/// true samples report 0 and are excluded from the balanced mean.
struct MetricsReport {
  Eigen::VectorXd per_class_recall;
  Eigen::VectorXd per_class_f1;
  double overall_accuracy = 0.0;
  double balanced_accuracy = 0.0;
  ClassCounts class_counts;  // true-sample counts (row sums)
};

MetricsReport report(const ConfusionMatrix& cm);

}  // namespace losslab
