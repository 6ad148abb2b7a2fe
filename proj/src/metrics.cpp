#include "losslab/metrics.hpp"

#include <stdexcept>
#include <string>

namespace losslab {

ConfusionMatrix confusion(const Eigen::VectorXi& true_labels,
                          const Eigen::VectorXi& predicted_labels, int num_classes) {
  if (true_labels.size() != predicted_labels.size()) {
    throw std::invalid_argument("label vectors must have equal length");
  }
  if (num_classes < 1) {
    throw std::invalid_argument("need at least one class");
  }
  ConfusionMatrix cm;
  cm.counts.setZero(num_classes, num_classes);
  for (Eigen::Index i = 0; i < true_labels.size(); ++i) {
    const int t = true_labels(i);
    const int p = predicted_labels(i);
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes) {
      throw std::invalid_argument("label out of range at sample " + std::to_string(i));
    }
    ++cm.counts(t, p);
  }
  return cm;
}

MetricsReport report(const ConfusionMatrix& cm) {
  const Eigen::Index k = cm.counts.rows();
  const std::int64_t total = cm.counts.sum();
  if (total == 0) {
    throw std::invalid_argument("empty evaluation: confusion matrix has no samples");
  }
  MetricsReport r;
  r.per_class_recall.setZero(k);
  r.per_class_f1.setZero(k);
  r.class_counts.assign(static_cast<std::size_t>(k), 0);

  double recall_sum = 0.0;
  int present = 0;
  std::int64_t diag = 0;
  for (Eigen::Index c = 0; c < k; ++c) {
    const std::int64_t row = cm.counts.row(c).sum();
    const std::int64_t col = cm.counts.col(c).sum();
    const std::int64_t tp = cm.counts(c, c);
    diag += tp;
    r.class_counts[static_cast<std::size_t>(c)] = row;
    const double recall = row > 0 ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    const double precision = col > 0 ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    r.per_class_recall(c) = recall;
    r.per_class_f1(c) =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    if (row > 0) {
      recall_sum += recall;
      ++present;
    }
  }
  r.overall_accuracy = static_cast<double>(diag) / static_cast<double>(total);
  r.balanced_accuracy = recall_sum / static_cast<double>(present);
  return r;
}

}  // namespace losslab
