#include "losslab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace losslab {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double parse_double(const ConfigFile::Entry& e) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(e.line) + ": key '" + e.key +
                      "' expects a number, got '" + e.value + "'");
  }
}

std::int64_t parse_int(const ConfigFile::Entry& e) {
  std::int64_t v = 0;
  const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size()) {
    throw ConfigError("line " + std::to_string(e.line) + ": key '" + e.key +
                      "' expects an integer, got '" + e.value + "'");
  }
  return v;
}

}  // namespace

const ConfigFile::Entry* ConfigFile::Section::find(const std::string& key) const {
  for (const auto& e : entries) {
    if (e.key == key) {
      return &e;
    }
  }
  return nullptr;
}

std::string ConfigFile::Section::require_string(const std::string& key) const {
  const Entry* e = find(key);
  if (e == nullptr) {
    throw ConfigError("section [" + name + "]: missing key '" + key + "'");
  }
  return e->value;
}

std::optional<std::string> ConfigFile::Section::get_string(const std::string& key) const {
  const Entry* e = find(key);
  return e == nullptr ? std::nullopt : std::optional<std::string>(e->value);
}

double ConfigFile::Section::require_double(const std::string& key) const {
  const Entry* e = find(key);
  if (e == nullptr) {
    throw ConfigError("section [" + name + "]: missing key '" + key + "'");
  }
  return parse_double(*e);
}

std::optional<double> ConfigFile::Section::get_double(const std::string& key) const {
  const Entry* e = find(key);
  return e == nullptr ? std::nullopt : std::optional<double>(parse_double(*e));
}

std::int64_t ConfigFile::Section::require_int(const std::string& key) const {
  const Entry* e = find(key);
  if (e == nullptr) {
    throw ConfigError("section [" + name + "]: missing key '" + key + "'");
  }
  return parse_int(*e);
}

std::optional<std::int64_t> ConfigFile::Section::get_int(const std::string& key) const {
  const Entry* e = find(key);
  return e == nullptr ? std::nullopt : std::optional<std::int64_t>(parse_int(*e));
}

void ConfigFile::Section::expect_keys(const std::vector<std::string>& allowed) const {
  for (const auto& e : entries) {
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
      throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key +
                        "' in section [" + name + "]");
    }
  }
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.sections.push_back(Section{"", 0, {}});
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ": line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      cfg.sections.push_back(Section{trim(line.substr(1, line.size() - 2)), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ": line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    Entry e;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty()) {
      throw ConfigError(origin + ": line " + std::to_string(line_no) + ": empty key");
    }
    cfg.sections.back().entries.push_back(std::move(e));
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

const ConfigFile::Section* ConfigFile::find_section(const std::string& name) const {
  for (const auto& s : sections) {
    if (s.name == name) {
      return &s;
    }
  }
  return nullptr;
}

const ConfigFile::Section& ConfigFile::require_section(const std::string& name) const {
  const Section* s = find_section(name);
  if (s == nullptr) {
    throw ConfigError("missing section [" + name + "]");
  }
  return *s;
}

LossSpec loss_spec_from_section(const ConfigFile::Section& section) {
  section.expect_keys({"kind", "variant", "alpha", "beta", "gamma_pos", "gamma_neg", "margin",
                       "lambda", "cb_beta", "cb_mode", "reduction"});
  const std::string kind = section.require_string("kind");

  LossSpec spec;
  if (kind == "bce") {
    spec = LossSpec::bce();
  } else if (kind == "ce") {
    spec = LossSpec::ce();
  } else if (kind == "focal") {
    spec = LossSpec::focal(0.0);
    const auto gp = section.get_double("gamma_pos");
    const auto gn = section.get_double("gamma_neg");
    if (gp && gn && *gp != *gn) {
      throw ConfigError("section [" + section.name + "]: focal uses one gamma for both branches");
    }
    const double g = gp ? *gp : (gn ? *gn : 0.0);
    spec.gamma_pos = g;
    spec.gamma_neg = g;
    if (const auto a = section.get_double("alpha")) spec.alpha = *a;
    if (const auto b = section.get_double("beta")) spec.beta = *b;
  } else if (kind == "asl") {
    spec = LossSpec::asl(0.0, 0.0);
    if (const auto v = section.get_double("gamma_pos")) spec.gamma_pos = *v;
    if (const auto v = section.get_double("gamma_neg")) spec.gamma_neg = *v;
    if (const auto v = section.get_double("margin")) spec.margin = *v;
  } else if (kind == "cb") {
    spec = LossSpec::cb(0.99);
    if (const auto v = section.get_double("cb_beta")) spec.cb_beta = *v;
    if (const auto m = section.get_string("cb_mode")) {
      if (*m == "standard") {
        spec.cb_mode = CbMode::Standard;
      } else if (*m == "as-printed") {
        spec.cb_mode = CbMode::AsPrinted;
      } else {
        throw ConfigError("section [" + section.name + "]: cb_mode must be standard or as-printed");
      }
    }
    if (const auto v = section.get_double("gamma_pos")) spec.gamma_pos = *v;
  } else if (kind == "alpa") {
    const std::string variant = section.get_string("variant").value_or("v2");
    AlpaVariant v;
    if (variant == "v1") {
      v = AlpaVariant::V1;
    } else if (variant == "v2") {
      v = AlpaVariant::V2;
    } else if (variant == "v3") {
      v = AlpaVariant::V3;
    } else if (variant == "custom") {
      v = AlpaVariant::Custom;
    } else {
      throw ConfigError("section [" + section.name + "]: unknown alpa variant '" + variant + "'");
    }
    spec = LossSpec::alpa(v);
    const bool has_params = section.find("alpha") != nullptr || section.find("beta") != nullptr ||
                            section.find("gamma_pos") != nullptr ||
                            section.find("gamma_neg") != nullptr ||
                            section.find("lambda") != nullptr;
    if (v != AlpaVariant::Custom && has_params) {
      throw ConfigError("section [" + section.name +
                        "]: variant presets pin the hyperparameters; use variant = custom");
    }
    if (v == AlpaVariant::Custom) {
      spec.alpha = section.require_double("alpha");
      spec.beta = section.require_double("beta");
      spec.gamma_pos = section.require_double("gamma_pos");
      spec.gamma_neg = section.require_double("gamma_neg");
      if (const auto l = section.get_double("lambda")) spec.lambda = *l;
    }
  } else {
    throw ConfigError("section [" + section.name + "]: unknown loss kind '" + kind + "'");
  }

  if (const auto r = section.get_string("reduction")) {
    if (*r == "mean") {
      spec.reduction = Reduction::MeanOverSamples;
    } else if (*r == "sum") {
      spec.reduction = Reduction::SumOverSamples;
    } else {
      throw ConfigError("section [" + section.name + "]: reduction must be mean or sum");
    }
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("section [" + section.name + "]: " + e.what());
  }
  return spec;
}

RunConfig load_run_config(const std::string& path) {
  using Section = ConfigFile::Section;
  const ConfigFile cfg = ConfigFile::parse_file(path);
  RunConfig run;

  if (const Section* top = cfg.find_section(""); top != nullptr) {
    top->expect_keys({"schema_version"});
    if (const auto v = top->get_int("schema_version")) {
      run.schema_version = static_cast<int>(*v);
      if (run.schema_version != 1) {
        throw ConfigError("unsupported schema_version " + std::to_string(run.schema_version));
      }
    }
  }

  const auto& ds = cfg.require_section("dataset");
  const std::string source = ds.require_string("source");
  if (source == "csv") {
    ds.expect_keys({"source", "path"});
    run.dataset_from_csv = true;
    run.csv_path = ds.require_string("path");
  } else if (source == "generate") {
    ds.expect_keys({"source", "num_classes", "n_max", "imbalance_ratio", "decay", "dims",
                    "cluster_separation", "noise_sigma", "seed"});
    run.dataset_from_csv = false;
    LongTailProfile& p = run.profile;
    p.num_classes = static_cast<int>(ds.require_int("num_classes"));
    p.n_max = ds.require_int("n_max");
    p.imbalance_ratio = ds.require_double("imbalance_ratio");
    if (const auto d = ds.get_string("decay")) {
      if (*d == "exponential") {
        p.decay = DecayKind::Exponential;
      } else if (*d == "step") {
        p.decay = DecayKind::Step;
      } else {
        throw ConfigError("section [dataset]: decay must be exponential or step");
      }
    }
    p.dims = static_cast<int>(ds.require_int("dims"));
    p.cluster_separation = ds.require_double("cluster_separation");
    p.noise_sigma = ds.require_double("noise_sigma");
    p.seed = static_cast<std::uint64_t>(ds.get_int("seed").value_or(0));
  } else {
    throw ConfigError("section [dataset]: source must be generate or csv");
  }

  if (const Section* tr = cfg.find_section("training"); tr != nullptr) {
    tr->expect_keys({"architecture", "hidden_units", "learning_rate", "batch_size", "epochs",
                     "adam_beta1", "adam_beta2", "weight_decay", "seed", "init_scale",
                     "train_fraction"});
    TrainConfig& t = run.training;
    if (const auto a = tr->get_string("architecture")) {
      if (*a == "linear") {
        t.architecture = Architecture::Linear;
      } else if (*a == "mlp1") {
        t.architecture = Architecture::Mlp1;
      } else {
        throw ConfigError("section [training]: architecture must be linear or mlp1");
      }
    }
    if (const auto v = tr->get_int("hidden_units")) t.hidden_units = static_cast<int>(*v);
    if (const auto v = tr->get_double("learning_rate")) t.learning_rate = *v;
    if (const auto v = tr->get_int("batch_size")) t.batch_size = static_cast<int>(*v);
    if (const auto v = tr->get_int("epochs")) t.epochs = static_cast<int>(*v);
    if (const auto v = tr->get_double("adam_beta1")) t.adam_beta1 = *v;
    if (const auto v = tr->get_double("adam_beta2")) t.adam_beta2 = *v;
    if (const auto v = tr->get_double("weight_decay")) t.weight_decay = *v;
    if (const auto v = tr->get_int("seed")) t.seed = static_cast<std::uint64_t>(*v);
    if (const auto v = tr->get_double("init_scale")) t.init_scale = *v;
    if (const auto v = tr->get_double("train_fraction")) run.train_fraction = *v;
  }

  for (const auto& s : cfg.sections) {
    if (s.name == "loss") {
      run.losses.emplace_back("loss", loss_spec_from_section(s));
    } else if (s.name.rfind("loss:", 0) == 0) {
      const std::string label = s.name.substr(5);
      if (label.empty()) {
        throw ConfigError("line " + std::to_string(s.line) + ": loss section needs a label");
      }
      run.losses.emplace_back(label, loss_spec_from_section(s));
    }
  }

  if (const Section* bench = cfg.find_section("bench"); bench != nullptr) {
    bench->expect_keys({"seeds"});
    const std::string seeds = bench->require_string("seeds");
    std::stringstream ss(seeds);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok.erase(std::remove_if(tok.begin(), tok.end(), [](char c) { return c == ' '; }), tok.end());
      if (tok.empty()) {
        continue;
      }
      try {
        run.bench_seeds.push_back(std::stoull(tok));
      } catch (const std::exception&) {
        throw ConfigError("section [bench]: seeds must be a comma-separated integer list");
      }
    }
  }

  if (const Section* out = cfg.find_section("output"); out != nullptr) {
    out->expect_keys({"dir"});
    if (const auto d = out->get_string("dir")) run.out_dir = *d;
  }
  return run;
}

}  // namespace losslab
