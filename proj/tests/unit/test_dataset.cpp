#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "losslab/dataset.hpp"

using namespace losslab;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

LongTailProfile small_profile() {
  LongTailProfile p;
  p.num_classes = 4;
  p.n_max = 60;
  p.imbalance_ratio = 6.0;
  p.dims = 3;
  p.cluster_separation = 3.0;
  p.noise_sigma = 0.8;
  p.seed = 42;
  return p;
}

}  // namespace

TEST_CASE("long-tail counts") {
  LongTailProfile p;
  p.num_classes = 5;
  p.n_max = 1000;
  p.imbalance_ratio = 10.0;
  CHECK(long_tail_counts(p) == ClassCounts{1000, 562, 316, 178, 100});

  p.imbalance_ratio = 1.0;
  CHECK(long_tail_counts(p) == ClassCounts{1000, 1000, 1000, 1000, 1000});

  p.imbalance_ratio = 10.0;
  const auto counts = long_tail_counts(p);
  CHECK(static_cast<double>(counts.front()) / static_cast<double>(counts.back()) == 10.0);

  p.n_max = 10;
  p.imbalance_ratio = 1000.0;
  CHECK_THROWS_WITH_AS(long_tail_counts(p), doctest::Contains("ratio too large"),
                       std::invalid_argument);

  p.n_max = 1000;
  p.decay = DecayKind::Step;
  p.imbalance_ratio = 10.0;
  CHECK(long_tail_counts(p) == ClassCounts{1000, 1000, 1000, 100, 100});
}

TEST_CASE("generated imbalance ratio tracks the profile") {
  for (std::uint64_t seed : {1ull, 9ull}) {
    for (double ratio : {2.0, 25.0}) {
      LongTailProfile p = small_profile();
      p.n_max = 400;
      p.imbalance_ratio = ratio;
      p.seed = seed;
      const auto counts = long_tail_counts(p);
      const double got = static_cast<double>(counts.front()) / static_cast<double>(counts.back());
      CHECK(std::abs(got - ratio) <= ratio / static_cast<double>(counts.back()));
    }
  }
}

TEST_CASE("generation is a pure function of the profile") {
  const auto a = generate(small_profile());
  const auto b = generate(small_profile());
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  CHECK(a.class_counts == b.class_counts);
  CHECK(a.features.allFinite());

  // Different seed, different draw.
  LongTailProfile p = small_profile();
  p.seed = 43;
  CHECK(generate(p).features != a.features);
}

TEST_CASE("cluster centers respect the separation floor") {
  LongTailProfile p = small_profile();
  p.num_classes = 8;
  p.cluster_separation = 2.5;
  const auto centers = cluster_centers(p);
  REQUIRE(centers.rows() == 8);
  for (int i = 0; i < centers.rows(); ++i) {
    for (int j = i + 1; j < centers.rows(); ++j) {
      CHECK((centers.row(i) - centers.row(j)).norm() >= p.cluster_separation);
    }
  }
}

TEST_CASE("csv round trip") {
  const auto ds = generate(small_profile());
  const auto path = temp_file("losslab_roundtrip.csv");
  save_csv(ds, path.string());
  const auto back = load_csv(path.string());
  CHECK(back.features == ds.features);  // %.17g keeps doubles exact
  CHECK(back.labels == ds.labels);
  CHECK(back.class_counts == ds.class_counts);
  std::filesystem::remove(path);
}

TEST_CASE("csv parsing edges") {
  const auto path = temp_file("losslab_edge.csv");

  auto write = [&](const std::string& text) {
    std::ofstream out(path);
    out << text;
  };

  write("f0,f1,label\n0.5,1.5,0\n-0.25,2,1\n");
  const auto two = load_csv(path.string());
  CHECK(two.num_classes == 2);
  CHECK(two.class_counts == ClassCounts{1, 1});

  // A lone label 5 implies six classes, five of them empty.
  write("f0,label\n1.0,5\n2.0,5\n");
  const auto sparse = load_csv(path.string());
  CHECK(sparse.num_classes == 6);
  CHECK(sparse.class_counts == ClassCounts{0, 0, 0, 0, 0, 2});

  write("f0,f1,label\n0.5,1.5,0\n0.25,1\n");
  CHECK_THROWS_WITH_AS(load_csv(path.string()), doctest::Contains("line 3"), std::runtime_error);

  write("f0,label\n0.5,zebra\n");
  CHECK_THROWS_WITH_AS(load_csv(path.string()), doctest::Contains("label"), std::runtime_error);

  write("f0,label\n0.5,1.5\n");
  CHECK_THROWS_AS(load_csv(path.string()), std::runtime_error);

  write("");
  CHECK_THROWS_WITH_AS(load_csv(path.string()), doctest::Contains("empty file"),
                       std::runtime_error);

  write("banana,label\n1,0\n");
  CHECK_THROWS_WITH_AS(load_csv(path.string()), doctest::Contains("header"), std::runtime_error);

  std::filesystem::remove(path);
}

TEST_CASE("stratified split") {
  LongTailProfile p = small_profile();
  p.num_classes = 2;
  p.n_max = 100;
  p.imbalance_ratio = 10.0;  // counts 100, 10
  const auto ds = generate(p);
  const auto [train, test] = stratified_split(ds, 0.8, 5);
  CHECK(train.class_counts == ClassCounts{80, 8});
  CHECK(test.class_counts == ClassCounts{20, 2});
  CHECK(train.size() + test.size() == ds.size());

  const auto [train2, test2] = stratified_split(ds, 0.8, 5);
  CHECK(train2.features == train.features);
  CHECK(test2.labels == test.labels);

  const auto [train3, _] = stratified_split(ds, 0.8, 6);
  CHECK(train3.features != train.features);
}

TEST_CASE("split proportions stay within one sample per class") {
  for (double fraction : {0.5, 0.8, 0.9}) {
    LongTailProfile p = small_profile();
    p.n_max = 37;
    p.imbalance_ratio = 7.0;
    const auto ds = generate(p);
    const auto [train, test] = stratified_split(ds, fraction, 11);
    for (std::size_t c = 0; c < ds.class_counts.size(); ++c) {
      const double nk = static_cast<double>(ds.class_counts[c]);
      const double got = static_cast<double>(train.class_counts[c]) / nk;
      CHECK(std::abs(got - fraction) <= 1.0 / nk);
    }
  }

  // round(0.8 * 5) = 4
  Eigen::MatrixXd f(5, 1);
  f << 1, 2, 3, 4, 5;
  Eigen::VectorXi l(5);
  l << 0, 0, 0, 0, 0;
  const auto tiny = make_dataset(f, l);
  const auto [tr, te] = stratified_split(tiny, 0.8, 1);
  CHECK(tr.size() == 4);
  CHECK(te.size() == 1);

  Eigen::MatrixXd f1(1, 1);
  f1 << 1;
  Eigen::VectorXi l1(1);
  l1 << 0;
  CHECK_THROWS_WITH_AS(stratified_split(make_dataset(f1, l1), 0.8, 1),
                       doctest::Contains("class too small to split"), std::invalid_argument);
  CHECK_THROWS_AS(stratified_split(tiny, 1.0, 1), std::invalid_argument);
}

TEST_CASE("kfold partitions every class") {
  LongTailProfile p = small_profile();
  p.num_classes = 2;
  p.n_max = 50;
  p.imbalance_ratio = 5.0;  // counts 50, 10
  const auto ds = generate(p);
  const auto folds = kfold(ds, 5, 3);
  REQUIRE(folds.size() == 5);

  std::multiset<double> seen;
  for (const auto& [train, val] : folds) {
    CHECK(val.class_counts == ClassCounts{10, 2});
    CHECK(train.size() + val.size() == ds.size());
    for (Eigen::Index i = 0; i < val.size(); ++i) {
      seen.insert(val.features(i, 0));
    }
  }
  // Validation folds cover the dataset exactly once.
  std::multiset<double> all;
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    all.insert(ds.features(i, 0));
  }
  CHECK(seen == all);

  Eigen::MatrixXd f(4, 1);
  f << 1, 2, 3, 4;
  Eigen::VectorXi l(4);
  l << 0, 0, 0, 0;
  const auto four = make_dataset(f, l);
  const auto two = kfold(four, 2, 9);
  CHECK(two[0].second.size() == 2);
  CHECK(two[1].second.size() == 2);

  CHECK_THROWS_AS(kfold(four, 5, 9), std::invalid_argument);
  CHECK_THROWS_AS(kfold(four, 1, 9), std::invalid_argument);
}
