#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "losslab/dataset.hpp"
#include "losslab/losses.hpp"
#include "losslab/metrics.hpp"

namespace losslab {

using Json = nlohmann::ordered_json;

std::string to_string(LossKind kind);
std::string to_string(AlpaVariant variant);
std::string to_string(CbMode mode);
std::string to_string(Reduction reduction);
std::string to_string(DecayKind decay);

Json loss_spec_to_json(const LossSpec& spec);
Json profile_to_json(const LongTailProfile& profile);

/// Report JSON with the documented key set: per_class_recall, per_class_f1,
/// overall_accuracy, balanced_accuracy, class_counts, loss_spec, seed.
Json report_to_json(const MetricsReport& report, const LossSpec& spec, std::uint64_t seed);

}  // namespace losslab
