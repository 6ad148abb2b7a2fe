#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "losslab/losses.hpp"  // ClassCounts

namespace losslab {

/// Feature matrix with integer class labels; counts are derived from the
/// labels and kept consistent by construction.
struct LabeledDataset {
  Eigen::MatrixXd features;  // n_samples x n_dims
  Eigen::VectorXi labels;    // values in [0, num_classes)
  int num_classes = 0;
  ClassCounts class_counts;  // size num_classes, entries may be 0 for loaded data

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dims() const { return features.cols(); }
};

/// Validates labels, derives counts. num_classes < 0 infers max label + 1.
LabeledDataset make_dataset(Eigen::MatrixXd features, Eigen::VectorXi labels,
                            int num_classes = -1);

enum class DecayKind { Exponential, Step };

struct LongTailProfile {
  int num_classes = 2;
  std::int64_t n_max = 1000;
  double imbalance_ratio = 1.0;  // n_max over n_min
  DecayKind decay = DecayKind::Exponential;
  int dims = 2;
  double cluster_separation = 4.0;  // minimum pairwise center distance
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;
};

/// Per-class sample counts for a profile. Exponential decay follows
/// n_max * ratio^(-k/(K-1)); Step keeps the first half of the classes at
/// n_max and drops the rest to n_max/ratio.
ClassCounts long_tail_counts(const LongTailProfile& profile);

/// Class centers drawn from the profile seed with pairwise distance at least
/// cluster_separation (rejection sampling in a box that grows on failure).
Eigen::MatrixXd cluster_centers(const LongTailProfile& profile);

/// Isotropic Gaussian clusters, one per class, fully reproducible from the
/// profile seed.
LabeledDataset generate(const LongTailProfile& profile);

/// CSV schema: header f0,...,f{d-1},label; decimal floats, integer label.
LabeledDataset load_csv(const std::string& path);
void save_csv(const LabeledDataset& ds, const std::string& path);

/// Per class, round(train_fraction * n_k) samples go to train, the rest to
/// test; the per-class selection is shuffled by the seed.
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           double train_fraction,
                                                           std::uint64_t seed);

/// Stratified folds: every class is partitioned into k shuffled near-equal
/// chunks and fold i validates on chunk i of each class.
std::vector<std::pair<LabeledDataset, LabeledDataset>> kfold(const LabeledDataset& ds, int k,
                                                             std::uint64_t seed);

}  // namespace losslab
