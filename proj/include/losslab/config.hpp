#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "losslab/dataset.hpp"
#include "losslab/losses.hpp"
#include "losslab/trainer.hpp"

namespace losslab {

/// Raised for malformed config files and CLI usage problems; maps to exit
/// code 2 at the command layer.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sections of key = value pairs; '#' starts a comment. Section order and
/// per-section key order are preserved. Keys before any section header live
/// in the unnamed section "".
struct ConfigFile {
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };
  struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;

    const Entry* find(const std::string& key) const;
    std::string require_string(const std::string& key) const;
    std::optional<std::string> get_string(const std::string& key) const;
    double require_double(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::int64_t require_int(const std::string& key) const;
    std::optional<std::int64_t> get_int(const std::string& key) const;
    /// Complain about keys outside the allowed set.
    void expect_keys(const std::vector<std::string>& allowed) const;
  };

  std::vector<Section> sections;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  const Section* find_section(const std::string& name) const;
  const Section& require_section(const std::string& name) const;
};

/// Fully resolved run description: one dataset source, training settings and
/// one or more labeled loss specs.
struct RunConfig {
  int schema_version = 1;
  bool dataset_from_csv = false;
  std::string csv_path;
  LongTailProfile profile;
  double train_fraction = 0.8;
  TrainConfig training;  // training.loss is filled per run from `losses`
  std::vector<std::pair<std::string, LossSpec>> losses;
  std::vector<std::uint64_t> bench_seeds;
  std::string out_dir = "out";
};

LossSpec loss_spec_from_section(const ConfigFile::Section& section);
RunConfig load_run_config(const std::string& path);

}  // namespace losslab
