#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "losslab/dataset.hpp"
#include "losslab/losses.hpp"
#include "losslab/metrics.hpp"
#include "losslab/rng.hpp"

namespace losslab {

enum class Architecture { Linear, Mlp1 };

/// One sigmoid logit per class. Linear uses w1/b1 only; Mlp1 adds a relu
/// hidden layer (w1 hidden x dims, w2 classes x hidden).
struct ModelParams {
  Architecture architecture = Architecture::Linear;
  int input_dim = 0;
  int num_classes = 0;
  int hidden_units = 0;
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

struct TrainConfig {
  LossSpec loss;
  Architecture architecture = Architecture::Linear;
  int hidden_units = 32;
  double learning_rate = 1e-4;
  int batch_size = 128;
  int epochs = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double weight_decay = 0.001;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
};

/// Weights uniform in [-init_scale, init_scale]/sqrt(fan_in), biases zero.
ModelParams init_model(Architecture arch, int input_dim, int num_classes, int hidden_units,
                       double init_scale, Rng& rng);

struct ForwardCache {
  Eigen::MatrixXd hidden_pre;  // mlp1 only
  Eigen::MatrixXd hidden_act;
};

/// Logits, samples x classes.
Eigen::MatrixXd forward(const ModelParams& model, const Eigen::MatrixXd& features,
                        ForwardCache* cache = nullptr);

struct ParamGrads {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

/// Reverse-mode accumulation of dL/dparams from dL/dlogits.
ParamGrads backward(const ModelParams& model, const Eigen::MatrixXd& features,
                    const ForwardCache& cache, const Eigen::MatrixXd& dlogits);

struct AdamState {
  ParamGrads m;
  ParamGrads v;
  std::int64_t step = 0;
};

AdamState init_adam_state(const ModelParams& model);

/// Bias-corrected Adam with decoupled weight decay applied before the
/// moment update; eps = 1e-8.
void adam_step(ModelParams& model, const ParamGrads& grads, AdamState& state,
               const TrainConfig& config);

/// Clamped sigmoid probabilities for a logit matrix.
Eigen::MatrixXd probabilities(const Eigen::MatrixXd& logits);

/// Argmax over per-class sigmoid probabilities (lowest index wins ties).
Eigen::VectorXi predict(const ModelParams& model, const Eigen::MatrixXd& features);

struct EpochStats {
  double train_loss = 0.0;              // mean per-sample loss over the epoch
  double val_balanced_accuracy = 0.0;   // on eval set (training set if absent)
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  ModelParams final_model;
};

/// Seeded mini-batch training; bit-deterministic for a fixed
/// (dataset, config) pair. Throws "diverged" naming epoch and step if the
/// loss or a gradient stops being finite.
TrainHistory train(const LabeledDataset& ds, const TrainConfig& config,
                   const LabeledDataset* eval = nullptr);

struct CvResult {
  std::vector<MetricsReport> fold_reports;
  double mean_balanced_accuracy = 0.0;
};

/// Stratified k-fold driver: trains one model per fold, evaluates on the
/// held-out fold.
CvResult train_cv(const LabeledDataset& ds, const TrainConfig& config, int k);

/// JSON checkpoint with architecture tag, shapes, parameters and the config.
void save_checkpoint(const std::string& path, const ModelParams& model,
                     const TrainConfig& config);
ModelParams load_checkpoint(const std::string& path);

MetricsReport evaluate(const ModelParams& model, const LabeledDataset& ds);

}  // namespace losslab
