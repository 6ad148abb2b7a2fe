#include "losslab/serialize.hpp"

#include <cmath>

namespace losslab {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Bce: return "bce";
    case LossKind::Ce: return "ce";
    case LossKind::Focal: return "focal";
    case LossKind::Asl: return "asl";
    case LossKind::Cb: return "cb";
    case LossKind::Alpa: return "alpa";
  }
  return "?";
}

std::string to_string(AlpaVariant variant) {
  switch (variant) {
    case AlpaVariant::V1: return "v1";
    case AlpaVariant::V2: return "v2";
    case AlpaVariant::V3: return "v3";
    case AlpaVariant::Custom: return "custom";
  }
  return "?";
}

std::string to_string(CbMode mode) {
  return mode == CbMode::Standard ? "standard" : "as-printed";
}

std::string to_string(Reduction reduction) {
  return reduction == Reduction::MeanOverSamples ? "mean" : "sum";
}

std::string to_string(DecayKind decay) {
  return decay == DecayKind::Exponential ? "exponential" : "step";
}

Json loss_spec_to_json(const LossSpec& spec) {
  Json j;
  j["kind"] = to_string(spec.kind);
  if (spec.kind == LossKind::Alpa) {
    j["variant"] = to_string(spec.variant);
  }
  j["alpha"] = spec.alpha;
  j["beta"] = spec.beta;
  j["gamma_pos"] = spec.gamma_pos;
  j["gamma_neg"] = spec.gamma_neg;
  j["margin"] = spec.margin;
  if (!std::isnan(spec.lambda)) {
    j["lambda"] = spec.lambda;
  }
  if (spec.kind == LossKind::Cb) {
    j["cb_beta"] = spec.cb_beta;
    j["cb_mode"] = to_string(spec.cb_mode);
  }
  j["reduction"] = to_string(spec.reduction);
  return j;
}

Json profile_to_json(const LongTailProfile& profile) {
  Json j;
  j["num_classes"] = profile.num_classes;
  j["n_max"] = profile.n_max;
  j["imbalance_ratio"] = profile.imbalance_ratio;
  j["decay"] = to_string(profile.decay);
  j["dims"] = profile.dims;
  j["cluster_separation"] = profile.cluster_separation;
  j["noise_sigma"] = profile.noise_sigma;
  j["seed"] = profile.seed;
  return j;
}

Json report_to_json(const MetricsReport& report, const LossSpec& spec, std::uint64_t seed) {
  Json j;
  j["per_class_recall"] = std::vector<double>(
      report.per_class_recall.data(), report.per_class_recall.data() + report.per_class_recall.size());
  j["per_class_f1"] = std::vector<double>(
      report.per_class_f1.data(), report.per_class_f1.data() + report.per_class_f1.size());
  j["overall_accuracy"] = report.overall_accuracy;
  j["balanced_accuracy"] = report.balanced_accuracy;
  j["class_counts"] = report.class_counts;
  j["loss_spec"] = loss_spec_to_json(spec);
  j["seed"] = seed;
  return j;
}

}  // namespace losslab
