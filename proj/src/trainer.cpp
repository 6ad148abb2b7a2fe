#include "losslab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "losslab/numeric.hpp"
#include "losslab/serialize.hpp"

namespace losslab {

namespace {

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = rng.uniform(-scale, scale);
    }
  }
  return m;
}

Eigen::MatrixXd onehot_matrix(const Eigen::VectorXi& labels, int num_classes) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(labels.size(), num_classes);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    t(i, labels(i)) = 1.0;
  }
  return t;
}

template <typename Param>
void adam_update_one(Param& param, const Param& grad, Param& m, Param& v, double lr, double b1,
                     double b2, double wd, std::int64_t step) {
  if (!grad.allFinite()) {
    throw std::runtime_error("diverged: non-finite parameter gradient");
  }
  if (wd > 0.0) {
    param -= lr * wd * param;
  }
  m = b1 * m + (1.0 - b1) * grad;
  v = (b2 * v.array() + (1.0 - b2) * grad.array().square()).matrix();
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + 1e-8);
}

std::vector<double> json_to_vector(const nlohmann::json& j) {
  return j.get<std::vector<double>>();
}

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row[static_cast<std::size_t>(c)] = m(r, c);
    }
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd json_to_matrix(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) {
    return Eigen::MatrixXd(0, 0);
  }
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = json_to_vector(j[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)];
    }
  }
  return m;
}

}  // namespace

ModelParams init_model(Architecture arch, int input_dim, int num_classes, int hidden_units,
                       double init_scale, Rng& rng) {
  if (input_dim < 1 || num_classes < 1) {
    throw std::invalid_argument("model needs positive input_dim and num_classes");
  }
  ModelParams m;
  m.architecture = arch;
  m.input_dim = input_dim;
  m.num_classes = num_classes;
  if (arch == Architecture::Linear) {
    const double s = init_scale / std::sqrt(static_cast<double>(input_dim));
    m.w1 = uniform_matrix(num_classes, input_dim, s, rng);
    m.b1 = Eigen::VectorXd::Zero(num_classes);
  } else {
    if (hidden_units < 1) {
      throw std::invalid_argument("mlp1 needs hidden_units >= 1");
    }
    m.hidden_units = hidden_units;
    const double s1 = init_scale / std::sqrt(static_cast<double>(input_dim));
    const double s2 = init_scale / std::sqrt(static_cast<double>(hidden_units));
    m.w1 = uniform_matrix(hidden_units, input_dim, s1, rng);
    m.b1 = Eigen::VectorXd::Zero(hidden_units);
    m.w2 = uniform_matrix(num_classes, hidden_units, s2, rng);
    m.b2 = Eigen::VectorXd::Zero(num_classes);
  }
  return m;
}

Eigen::MatrixXd forward(const ModelParams& model, const Eigen::MatrixXd& features,
                        ForwardCache* cache) {
  if (features.cols() != model.input_dim) {
    throw std::invalid_argument("feature dims do not match the model input");
  }
  if (model.architecture == Architecture::Linear) {
    return (features * model.w1.transpose()).rowwise() + model.b1.transpose();
  }
  Eigen::MatrixXd pre = (features * model.w1.transpose()).rowwise() + model.b1.transpose();
  Eigen::MatrixXd act = pre.cwiseMax(0.0);
  Eigen::MatrixXd logits = (act * model.w2.transpose()).rowwise() + model.b2.transpose();
  if (cache != nullptr) {
    cache->hidden_pre = std::move(pre);
    cache->hidden_act = std::move(act);
  }
  return logits;
}

ParamGrads backward(const ModelParams& model, const Eigen::MatrixXd& features,
                    const ForwardCache& cache, const Eigen::MatrixXd& dlogits) {
  if (dlogits.rows() != features.rows() || dlogits.cols() != model.num_classes) {
    throw std::invalid_argument("dlogits shape must be samples x classes");
  }
  ParamGrads g;
  if (model.architecture == Architecture::Linear) {
    g.w1 = dlogits.transpose() * features;
    g.b1 = dlogits.colwise().sum().transpose();
    return g;
  }
  g.w2 = dlogits.transpose() * cache.hidden_act;
  g.b2 = dlogits.colwise().sum().transpose();
  Eigen::MatrixXd dhidden = (dlogits * model.w2).array() *
                            (cache.hidden_pre.array() > 0.0).cast<double>();
  g.w1 = dhidden.transpose() * features;
  g.b1 = dhidden.colwise().sum().transpose();
  return g;
}

AdamState init_adam_state(const ModelParams& model) {
  AdamState s;
  s.m.w1 = Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols());
  s.m.b1 = Eigen::VectorXd::Zero(model.b1.size());
  s.v.w1 = s.m.w1;
  s.v.b1 = s.m.b1;
  if (model.architecture == Architecture::Mlp1) {
    s.m.w2 = Eigen::MatrixXd::Zero(model.w2.rows(), model.w2.cols());
    s.m.b2 = Eigen::VectorXd::Zero(model.b2.size());
    s.v.w2 = s.m.w2;
    s.v.b2 = s.m.b2;
  }
  s.step = 0;
  return s;
}

void adam_step(ModelParams& model, const ParamGrads& grads, AdamState& state,
               const TrainConfig& config) {
  ++state.step;
  const double lr = config.learning_rate;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double wd = config.weight_decay;
  adam_update_one(model.w1, grads.w1, state.m.w1, state.v.w1, lr, b1, b2, wd, state.step);
  adam_update_one(model.b1, grads.b1, state.m.b1, state.v.b1, lr, b1, b2, wd, state.step);
  if (model.architecture == Architecture::Mlp1) {
    adam_update_one(model.w2, grads.w2, state.m.w2, state.v.w2, lr, b1, b2, wd, state.step);
    adam_update_one(model.b2, grads.b2, state.m.b2, state.v.b2, lr, b1, b2, wd, state.step);
  }
}

Eigen::MatrixXd probabilities(const Eigen::MatrixXd& logits) {
  return logits.unaryExpr([](double z) { return clamp_prob(sigmoid(z)); });
}

Eigen::VectorXi predict(const ModelParams& model, const Eigen::MatrixXd& features) {
  const Eigen::MatrixXd probs = probabilities(forward(model, features));
  Eigen::VectorXi labels(probs.rows());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    probs.row(i).maxCoeff(&best);
    labels(i) = static_cast<int>(best);
  }
  return labels;
}

TrainHistory train(const LabeledDataset& ds, const TrainConfig& config,
                   const LabeledDataset* eval) {
  if (config.epochs < 1) {
    throw std::invalid_argument("epochs must be >= 1");
  }
  if (config.batch_size < 1) {
    throw std::invalid_argument("batch_size must be >= 1");
  }
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be > 0");
  }
  config.loss.validate();
  for (std::size_t c = 0; c < ds.class_counts.size(); ++c) {
    if (ds.class_counts[c] < 1) {
      throw std::invalid_argument("class " + std::to_string(c) + " has no training samples");
    }
  }

  Rng rng(config.seed);
  ModelParams model = init_model(config.architecture, static_cast<int>(ds.dims()),
                                 ds.num_classes, config.hidden_units, config.init_scale, rng);
  AdamState adam = init_adam_state(model);
  const Eigen::MatrixXd targets = onehot_matrix(ds.labels, ds.num_classes);

  // Batch gradients always average over the batch so the step size does not
  // depend on the batch partition; spec.reduction still governs reported
  // loss values elsewhere.
  LossSpec step_spec = config.loss;
  step_spec.reduction = Reduction::MeanOverSamples;

  const LabeledDataset& eval_ds = eval != nullptr ? *eval : ds;

  TrainHistory history;
  history.epochs.reserve(static_cast<std::size_t>(config.epochs));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    int step_in_epoch = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      ++step_in_epoch;
      const auto stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const auto bsize = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd x(bsize, ds.dims());
      Eigen::MatrixXd t(bsize, ds.num_classes);
      for (Eigen::Index i = 0; i < bsize; ++i) {
        x.row(i) = ds.features.row(order[start + static_cast<std::size_t>(i)]);
        t.row(i) = targets.row(order[start + static_cast<std::size_t>(i)]);
      }
      ForwardCache cache;
      const Eigen::MatrixXd logits = forward(model, x, &cache);
      if (!logits.allFinite()) {
        throw std::runtime_error("diverged: non-finite logits at epoch " + std::to_string(epoch) +
                                 ", step " + std::to_string(step_in_epoch));
      }
      const Eigen::MatrixXd probs = probabilities(logits);
      BatchLoss bl = batch_loss(probs, t, step_spec, &ds.class_counts);
      if (!std::isfinite(bl.value)) {
        throw std::runtime_error("diverged: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", step " + std::to_string(step_in_epoch));
      }
      loss_sum += bl.value * static_cast<double>(bsize);
      const ParamGrads grads = backward(model, x, cache, bl.dlogits);
      adam_step(model, grads, adam, config);
    }
    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(ds.size());
    stats.val_balanced_accuracy = evaluate(model, eval_ds).balanced_accuracy;
    history.epochs.push_back(stats);
  }
  history.final_model = std::move(model);
  return history;
}

CvResult train_cv(const LabeledDataset& ds, const TrainConfig& config, int k) {
  const auto folds = kfold(ds, k, config.seed);
  CvResult result;
  result.fold_reports.reserve(folds.size());
  double acc = 0.0;
  for (const auto& [train_ds, val_ds] : folds) {
    TrainHistory h = train(train_ds, config, &val_ds);
    MetricsReport r = evaluate(h.final_model, val_ds);
    acc += r.balanced_accuracy;
    result.fold_reports.push_back(std::move(r));
  }
  result.mean_balanced_accuracy = acc / static_cast<double>(folds.size());
  return result;
}

MetricsReport evaluate(const ModelParams& model, const LabeledDataset& ds) {
  const Eigen::VectorXi predicted = predict(model, ds.features);
  return report(confusion(ds.labels, predicted, ds.num_classes));
}

void save_checkpoint(const std::string& path, const ModelParams& model,
                     const TrainConfig& config) {
  Json j;
  j["schema_version"] = 1;
  j["architecture"] = model.architecture == Architecture::Linear ? "linear" : "mlp1";
  j["input_dim"] = model.input_dim;
  j["num_classes"] = model.num_classes;
  j["hidden_units"] = model.hidden_units;
  Json params;
  params["w1"] = matrix_to_json(model.w1);
  params["b1"] = std::vector<double>(model.b1.data(), model.b1.data() + model.b1.size());
  if (model.architecture == Architecture::Mlp1) {
    params["w2"] = matrix_to_json(model.w2);
    params["b2"] = std::vector<double>(model.b2.data(), model.b2.data() + model.b2.size());
  }
  j["params"] = std::move(params);
  Json cfg;
  cfg["loss"] = loss_spec_to_json(config.loss);
  cfg["learning_rate"] = config.learning_rate;
  cfg["batch_size"] = config.batch_size;
  cfg["epochs"] = config.epochs;
  cfg["adam_beta1"] = config.adam_beta1;
  cfg["adam_beta2"] = config.adam_beta2;
  cfg["weight_decay"] = config.weight_decay;
  cfg["seed"] = config.seed;
  cfg["init_scale"] = config.init_scale;
  j["train_config"] = std::move(cfg);

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open checkpoint file for writing: " + path);
  }
  out << j.dump(2) << '\n';
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint file: " + path);
  }
  nlohmann::json j = nlohmann::json::parse(in);
  ModelParams m;
  m.architecture = j.at("architecture") == "linear" ? Architecture::Linear : Architecture::Mlp1;
  m.input_dim = j.at("input_dim").get<int>();
  m.num_classes = j.at("num_classes").get<int>();
  m.hidden_units = j.at("hidden_units").get<int>();
  const auto& params = j.at("params");
  m.w1 = json_to_matrix(params.at("w1"));
  {
    const auto b = json_to_vector(params.at("b1"));
    m.b1 = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  }
  if (m.architecture == Architecture::Mlp1) {
    m.w2 = json_to_matrix(params.at("w2"));
    const auto b = json_to_vector(params.at("b2"));
    m.b2 = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  }
  return m;
}

}  // namespace losslab
