#include "losslab/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "losslab/rng.hpp"

namespace losslab {

namespace {

LabeledDataset subset(const LabeledDataset& ds, const std::vector<Eigen::Index>& rows) {
  LabeledDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(rows[i]);
    out.labels(static_cast<Eigen::Index>(i)) = ds.labels(rows[i]);
  }
  out.num_classes = ds.num_classes;
  out.class_counts.assign(static_cast<std::size_t>(ds.num_classes), 0);
  for (Eigen::Index i = 0; i < out.labels.size(); ++i) {
    ++out.class_counts[static_cast<std::size_t>(out.labels(i))];
  }
  return out;
}

std::vector<std::vector<Eigen::Index>> indices_by_class(const LabeledDataset& ds) {
  std::vector<std::vector<Eigen::Index>> by_class(static_cast<std::size_t>(ds.num_classes));
  for (Eigen::Index i = 0; i < ds.labels.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.labels(i))].push_back(i);
  }
  return by_class;
}

}  // namespace

LabeledDataset make_dataset(Eigen::MatrixXd features, Eigen::VectorXi labels, int num_classes) {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("features and labels must have the same number of rows");
  }
  if (!features.allFinite()) {
    throw std::invalid_argument("features must be finite (no NaN/Inf)");
  }
  int max_label = -1;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels(i) < 0) {
      throw std::invalid_argument("labels must be non-negative");
    }
    max_label = std::max(max_label, labels(i));
  }
  LabeledDataset ds;
  ds.num_classes = num_classes < 0 ? max_label + 1 : num_classes;
  if (max_label >= ds.num_classes) {
    throw std::invalid_argument("label out of range for the declared number of classes");
  }
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  ds.class_counts.assign(static_cast<std::size_t>(ds.num_classes), 0);
  for (Eigen::Index i = 0; i < ds.labels.size(); ++i) {
    ++ds.class_counts[static_cast<std::size_t>(ds.labels(i))];
  }
  return ds;
}

ClassCounts long_tail_counts(const LongTailProfile& profile) {
  const int k = profile.num_classes;
  if (k < 2) {
    throw std::invalid_argument("profile needs at least 2 classes");
  }
  if (profile.n_max < k) {
    throw std::invalid_argument("n_max must be at least the number of classes");
  }
  if (profile.imbalance_ratio < 1.0) {
    throw std::invalid_argument("imbalance ratio must be >= 1");
  }
  ClassCounts counts(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    double n;
    if (profile.decay == DecayKind::Exponential) {
      n = static_cast<double>(profile.n_max) *
          std::pow(profile.imbalance_ratio, -static_cast<double>(c) / static_cast<double>(k - 1));
    } else {
      n = c < (k + 1) / 2 ? static_cast<double>(profile.n_max)
                          : static_cast<double>(profile.n_max) / profile.imbalance_ratio;
    }
    counts[static_cast<std::size_t>(c)] = std::llround(n);
  }
  if (*std::min_element(counts.begin(), counts.end()) < 1) {
    throw std::invalid_argument("ratio too large for n_max: a class rounds to zero samples");
  }
  return counts;
}

Eigen::MatrixXd cluster_centers(const LongTailProfile& profile) {
  if (profile.dims < 1) {
    throw std::invalid_argument("dims must be >= 1");
  }
  if (!(profile.cluster_separation > 0.0)) {
    throw std::invalid_argument("cluster separation must be > 0");
  }
  Rng rng(profile.seed);
  const int k = profile.num_classes;
  Eigen::MatrixXd centers(k, profile.dims);
  double side = 2.0 * profile.cluster_separation;
  int placed = 0;
  int attempts_at_side = 0;
  while (placed < k) {
    Eigen::RowVectorXd cand(profile.dims);
    for (int d = 0; d < profile.dims; ++d) {
      cand(d) = rng.uniform(-0.5 * side, 0.5 * side);
    }
    bool ok = true;
    for (int j = 0; j < placed; ++j) {
      if ((centers.row(j) - cand).norm() < profile.cluster_separation) {
        ok = false;
        break;
      }
    }
    if (ok) {
      centers.row(placed++) = cand;
      attempts_at_side = 0;
    } else if (++attempts_at_side > 200) {
      // Box too tight for the requested separation; widen and restart.
      side *= 1.5;
      placed = 0;
      attempts_at_side = 0;
    }
  }
  return centers;
}

LabeledDataset generate(const LongTailProfile& profile) {
  if (!(profile.noise_sigma > 0.0)) {
    throw std::invalid_argument("noise sigma must be > 0");
  }
  const ClassCounts counts = long_tail_counts(profile);
  const Eigen::MatrixXd centers = cluster_centers(profile);

  const auto total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  Eigen::MatrixXd features(total, profile.dims);
  Eigen::VectorXi labels(total);

  // Same stream as the center placement, continued, so the whole dataset is
  // one function of the seed.
  Rng rng(profile.seed + 0x9e3779b97f4a7c15ull);
  Eigen::Index row = 0;
  for (int c = 0; c < profile.num_classes; ++c) {
    for (std::int64_t i = 0; i < counts[static_cast<std::size_t>(c)]; ++i) {
      for (int d = 0; d < profile.dims; ++d) {
        features(row, d) = centers(c, d) + profile.noise_sigma * rng.normal();
      }
      labels(row) = c;
      ++row;
    }
  }
  return make_dataset(std::move(features), std::move(labels), profile.num_classes);
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open csv file: " + path);
  }
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty file: " + path);
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      header.push_back(field);
    }
  }
  if (header.size() < 2 || header.back() != "label") {
    throw std::runtime_error(path + ": header must be f0,...,f{d-1},label");
  }
  const int dims = static_cast<int>(header.size()) - 1;
  for (int d = 0; d < dims; ++d) {
    if (header[static_cast<std::size_t>(d)] != "f" + std::to_string(d)) {
      throw std::runtime_error(path + ": header must be f0,...,f{d-1},label");
    }
  }

  std::vector<double> values;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    if (static_cast<int>(fields.size()) != dims + 1) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected " +
                               std::to_string(dims + 1) + " columns, got " +
                               std::to_string(fields.size()));
    }
    for (int d = 0; d < dims; ++d) {
      const std::string& f = fields[static_cast<std::size_t>(d)];
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": malformed feature value '" + f + "'");
      }
      values.push_back(v);
    }
    const std::string& lf = fields.back();
    int label = 0;
    const auto res = std::from_chars(lf.data(), lf.data() + lf.size(), label);
    if (res.ec != std::errc() || res.ptr != lf.data() + lf.size() || label < 0) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": label must be a non-negative integer, got '" + lf + "'");
    }
    labels.push_back(label);
  }
  if (labels.empty()) {
    throw std::runtime_error(path + ": no data rows");
  }

  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd features(n, dims);
  Eigen::VectorXi label_vec(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int d = 0; d < dims; ++d) {
      features(i, d) = values[static_cast<std::size_t>(i) * static_cast<std::size_t>(dims) +
                              static_cast<std::size_t>(d)];
    }
    label_vec(i) = labels[static_cast<std::size_t>(i)];
  }
  return make_dataset(std::move(features), std::move(label_vec));
}

void save_csv(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  for (Eigen::Index d = 0; d < ds.dims(); ++d) {
    out << 'f' << d << ',';
  }
  out << "label\n";
  char buf[64];
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (Eigen::Index d = 0; d < ds.dims(); ++d) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features(i, d));
      out << buf << ',';
    }
    out << ds.labels(i) << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed writing csv file: " + path);
  }
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           double train_fraction,
                                                           std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  auto by_class = indices_by_class(ds);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < 2) {
      throw std::invalid_argument("class too small to split: class " + std::to_string(c) +
                                  " has fewer than 2 samples");
    }
  }
  Rng rng(seed);
  std::vector<Eigen::Index> train_rows, test_rows;
  for (auto& idx : by_class) {
    rng.shuffle(idx);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(idx.size())));
    train_rows.insert(train_rows.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_rows.insert(test_rows.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {subset(ds, train_rows), subset(ds, test_rows)};
}

std::vector<std::pair<LabeledDataset, LabeledDataset>> kfold(const LabeledDataset& ds, int k,
                                                             std::uint64_t seed) {
  if (k < 2) {
    throw std::invalid_argument("k must be >= 2");
  }
  auto by_class = indices_by_class(ds);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (static_cast<int>(by_class[c].size()) < k) {
      throw std::invalid_argument("class " + std::to_string(c) + " has fewer samples than folds");
    }
  }
  Rng rng(seed);
  for (auto& idx : by_class) {
    rng.shuffle(idx);
  }
  std::vector<std::pair<LabeledDataset, LabeledDataset>> folds;
  folds.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    std::vector<Eigen::Index> val_rows, train_rows;
    for (const auto& idx : by_class) {
      const auto n = idx.size();
      const auto base = n / static_cast<std::size_t>(k);
      const auto extra = n % static_cast<std::size_t>(k);
      // Chunk f covers [start, stop); the first `extra` chunks get one more.
      const auto fi = static_cast<std::size_t>(f);
      const auto start = fi * base + std::min(fi, extra);
      const auto stop = start + base + (fi < extra ? 1 : 0);
      for (std::size_t i = 0; i < n; ++i) {
        (i >= start && i < stop ? val_rows : train_rows).push_back(idx[i]);
      }
    }
    std::sort(val_rows.begin(), val_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    folds.emplace_back(subset(ds, train_rows), subset(ds, val_rows));
  }
  return folds;
}

}  // namespace losslab
