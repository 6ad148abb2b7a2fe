#include <doctest.h>

#include "losslab/metrics.hpp"

using namespace losslab;

TEST_CASE("confusion counting") {
  Eigen::VectorXi truth(4), pred(4);
  truth << 0, 0, 1, 1;
  pred << 0, 1, 1, 1;
  const auto cm = confusion(truth, pred, 2);
  CHECK(cm.counts(0, 0) == 1);
  CHECK(cm.counts(0, 1) == 1);
  CHECK(cm.counts(1, 0) == 0);
  CHECK(cm.counts(1, 1) == 2);
  CHECK(cm.counts.sum() == 4);

  Eigen::VectorXi perfect(3);
  perfect << 0, 1, 2;
  const auto diag = confusion(perfect, perfect, 3);
  CHECK(diag.counts.diagonal().sum() == 3);
  CHECK(diag.counts.sum() == 3);

  Eigen::VectorXi bad(1), ok(1);
  bad << 7;
  ok << 0;
  CHECK_THROWS_AS(confusion(bad, ok, 2), std::invalid_argument);
  Eigen::VectorXi shorter(2);
  CHECK_THROWS_AS(confusion(truth, shorter, 2), std::invalid_argument);
}

TEST_CASE("report on a hand-computed matrix") {
  ConfusionMatrix cm;
  cm.counts.resize(2, 2);
  cm.counts << 1, 1, 0, 2;
  const auto r = report(cm);
  CHECK(r.per_class_recall(0) == 0.5);
  CHECK(r.per_class_recall(1) == 1.0);
  CHECK(r.balanced_accuracy == 0.75);
  CHECK(r.overall_accuracy == 0.75);
  CHECK(r.per_class_f1(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.per_class_f1(1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(r.class_counts == ClassCounts{2, 2});
}

TEST_CASE("degenerate rows and columns") {
  ConfusionMatrix cm;
  cm.counts.resize(3, 3);
  cm.counts << 5, 0, 0, 0, 0, 0, 2, 0, 0;  // class 1 absent, class 2 never predicted
  const auto r = report(cm);
  CHECK(r.per_class_recall(1) == 0.0);
  CHECK(r.per_class_f1(2) == 0.0);
  // Absent class excluded from the balanced mean: (1 + 0) / 2.
  CHECK(r.balanced_accuracy == 0.5);

  ConfusionMatrix empty;
  empty.counts.setZero(2, 2);
  CHECK_THROWS_WITH_AS(report(empty), doctest::Contains("empty evaluation"),
                       std::invalid_argument);
}

TEST_CASE("balanced accuracy ignores class size") {
  ConfusionMatrix cm;
  cm.counts.resize(2, 2);
  cm.counts << 6, 2, 3, 9;
  const auto base = report(cm);

  ConfusionMatrix scaled;
  scaled.counts.resize(2, 2);
  scaled.counts << 30, 10, 3, 9;  // first row times 5
  const auto after = report(scaled);
  CHECK(after.balanced_accuracy == doctest::Approx(base.balanced_accuracy).epsilon(1e-15));

  // Overall accuracy is the count-weighted mean of recalls.
  double weighted = 0.0;
  for (int c = 0; c < 2; ++c) {
    weighted += base.per_class_recall(c) * static_cast<double>(base.class_counts[c]);
  }
  weighted /= static_cast<double>(cm.counts.sum());
  CHECK(base.overall_accuracy == doctest::Approx(weighted).epsilon(1e-15));
}

TEST_CASE("balanced equals overall for equal row sums") {
  ConfusionMatrix cm;
  cm.counts.resize(3, 3);
  cm.counts << 8, 1, 1, 2, 7, 1, 0, 3, 7;
  const auto r = report(cm);
  CHECK(std::abs(r.balanced_accuracy - r.overall_accuracy) <= 1e-12);
  for (int c = 0; c < 3; ++c) {
    CHECK(r.per_class_recall(c) >= 0.0);
    CHECK(r.per_class_recall(c) <= 1.0);
    CHECK(r.per_class_f1(c) >= 0.0);
    CHECK(r.per_class_f1(c) <= 1.0);
  }
  CHECK(r.overall_accuracy >= 0.0);
  CHECK(r.overall_accuracy <= 1.0);
  CHECK(r.balanced_accuracy >= 0.0);
  CHECK(r.balanced_accuracy <= 1.0);
}
