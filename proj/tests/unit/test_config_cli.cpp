#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "losslab/commands.hpp"
#include "losslab/config.hpp"
#include "losslab/dataset.hpp"

using namespace losslab;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_config(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << text;
  return path;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTrainConfig = R"(
schema_version = 1

[dataset]
source = generate
num_classes = 3
n_max = 60
imbalance_ratio = 5
dims = 2
cluster_separation = 4.0
noise_sigma = 1.0
seed = 3

[training]
learning_rate = 0.01
batch_size = 32
epochs = 8
seed = 9

[loss]
kind = alpa
variant = v2
)";

}  // namespace

TEST_CASE("config parsing basics") {
  const auto cfg = ConfigFile::parse_string(
      "top = 1\n[a]\nx = 2.5  # comment\n# full comment\n[b]\ny = hello\n");
  CHECK(cfg.find_section("") != nullptr);
  CHECK(cfg.require_section("a").require_double("x") == 2.5);
  CHECK(cfg.require_section("b").require_string("y") == "hello");
  CHECK(cfg.find_section("missing") == nullptr);
  CHECK_THROWS_WITH_AS(cfg.require_section("missing"), doctest::Contains("missing section"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(cfg.require_section("a").require_string("nope"),
                       doctest::Contains("nope"), ConfigError);

  CHECK_THROWS_WITH_AS(ConfigFile::parse_string("key value\n"), doctest::Contains("line 1"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(ConfigFile::parse_string("[open\n"), doctest::Contains("unterminated"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(ConfigFile::parse_string("[a]\nx = twelve\n[end]\n")
                           .require_section("a")
                           .require_double("x"),
                       doctest::Contains("line 2"), ConfigError);
}

TEST_CASE("loss specs from config sections") {
  auto section = [](const std::string& body) {
    const auto cfg = ConfigFile::parse_string("[loss]\n" + body);
    return cfg.require_section("loss");
  };

  const LossSpec bce = loss_spec_from_section(section("kind = bce\n"));
  CHECK(bce.kind == LossKind::Bce);

  const LossSpec focal = loss_spec_from_section(section("kind = focal\ngamma_pos = 2\n"));
  CHECK(focal.gamma_pos == 2.0);
  CHECK(focal.gamma_neg == 2.0);

  const LossSpec asl = loss_spec_from_section(
      section("kind = asl\ngamma_neg = 4\nmargin = 0.01\nreduction = sum\n"));
  CHECK(asl.gamma_neg == 4.0);
  CHECK(asl.margin == 0.01);
  CHECK(asl.reduction == Reduction::SumOverSamples);

  const LossSpec v2 = loss_spec_from_section(section("kind = alpa\nvariant = v2\n"));
  CHECK(v2.alpha == 0.875);
  CHECK(v2.beta == 1.625);
  CHECK(v2.gamma_pos == 0.0);
  CHECK(v2.gamma_neg == 4.0);

  const LossSpec custom = loss_spec_from_section(section(
      "kind = alpa\nvariant = custom\nalpha = 1\nbeta = 2\ngamma_pos = 1\ngamma_neg = 3\n"));
  CHECK(custom.beta == 2.0);

  CHECK_THROWS_WITH_AS(loss_spec_from_section(section("kind = alpa\nvariant = v2\nalpha = 9\n")),
                       doctest::Contains("pin"), ConfigError);
  CHECK_THROWS_WITH_AS(loss_spec_from_section(section("kind = alpa\nvariant = custom\n")),
                       doctest::Contains("alpha"), ConfigError);
  CHECK_THROWS_WITH_AS(loss_spec_from_section(section("kind = nope\n")),
                       doctest::Contains("unknown loss kind"), ConfigError);
  CHECK_THROWS_WITH_AS(loss_spec_from_section(section("kind = bce\nwat = 1\n")),
                       doctest::Contains("unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS(
      loss_spec_from_section(section("kind = focal\ngamma_pos = 1\ngamma_neg = 2\n")),
      doctest::Contains("one gamma"), ConfigError);
}

TEST_CASE("run config loading") {
  const auto path = write_config("losslab_run.ini", kTrainConfig);
  const RunConfig run = load_run_config(path.string());
  CHECK(run.schema_version == 1);
  CHECK_FALSE(run.dataset_from_csv);
  CHECK(run.profile.num_classes == 3);
  CHECK(run.profile.imbalance_ratio == 5.0);
  CHECK(run.training.epochs == 8);
  CHECK(run.training.seed == 9);
  REQUIRE(run.losses.size() == 1);
  CHECK(run.losses.front().second.kind == LossKind::Alpa);

  const auto bad = write_config("losslab_bad.ini", "[dataset]\nsource = nope\n");
  CHECK_THROWS_WITH_AS(load_run_config(bad.string()), doctest::Contains("source"), ConfigError);
  std::filesystem::remove(path);
  std::filesystem::remove(bad);
}

TEST_CASE("pade derive command") {
  PadeDeriveArgs args;
  args.target = "bce-neg";
  std::ostringstream out, err;
  REQUIRE(cmd_pade_derive(args, out, err) == 0);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j.at("canonical").at("c0") == -1.0);
  CHECK(j.at("canonical").at("c1") == 1.0);
  CHECK(j.at("canonical").at("d1") == 0.0);
  CHECK(j.at("solver").at("den").size() == 2);
  CHECK(j.contains("note"));

  args.target = "bce-pos";
  std::ostringstream out2;
  REQUIRE(cmd_pade_derive(args, out2, err) == 0);
  const auto j2 = nlohmann::json::parse(out2.str());
  CHECK(j2.at("canonical").at("a0") == -1.5);
  CHECK(j2.at("canonical").at("a1") == 1.5);
  CHECK(j2.at("canonical").at("b1") == 0.0);

  // Truncation: m = 1, n = 0 returns the leading series coefficients.
  args.m = 1;
  args.n = 0;
  std::ostringstream out3;
  REQUIRE(cmd_pade_derive(args, out3, err) == 0);
  const auto j3 = nlohmann::json::parse(out3.str());
  CHECK(j3.at("solver").at("num") == nlohmann::json::array({0.0, 1.0}));
  CHECK(j3.at("solver").at("den") == nlohmann::json::array({1.0}));
  CHECK_FALSE(j3.contains("canonical"));

  PadeDeriveArgs bad;
  bad.target = "what";
  std::ostringstream out4, err4;
  CHECK(cmd_pade_derive(bad, out4, err4) == 2);
  CHECK(err4.str().find("usage") != std::string::npos);
}

TEST_CASE("grad-curve command") {
  const auto dir = temp_dir("losslab_curve_test");
  GradCurveArgs args;
  args.grid_size = 11;
  args.out_path = (dir / "curves.csv").string();
  std::ostringstream out, err;
  REQUIRE(cmd_grad_curve(args, out, err) == 0);
  const std::string text = slurp(dir / "curves.csv");
  CHECK(text.rfind("p,grad_ce,grad_focal,grad_asl,grad_alpa\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 12);
  std::filesystem::remove_all(dir);
}

TEST_CASE("gen-data command") {
  const auto dir = temp_dir("losslab_gen_test");
  const auto cfg = write_config("losslab_gen.ini", kTrainConfig);
  GenDataArgs args;
  args.config_path = cfg.string();
  args.out_path = (dir / "data.csv").string();
  std::ostringstream out, err;
  REQUIRE(cmd_gen_data(args, out, err) == 0);
  const auto ds = load_csv(args.out_path);
  CHECK(ds.num_classes == 3);
  CHECK(ds.class_counts == ClassCounts{60, 27, 12});
  std::filesystem::remove(cfg);
  std::filesystem::remove_all(dir);
}

TEST_CASE("train command writes deterministic artifacts") {
  const auto dir = temp_dir("losslab_train_test");
  const auto cfg = write_config("losslab_train.ini", kTrainConfig);

  TrainArgs args;
  args.config_path = cfg.string();
  args.out_dir = (dir / "run1").string();
  std::ostringstream out, err;
  REQUIRE_MESSAGE(cmd_train(args, out, err) == 0, err.str());
  CHECK(std::filesystem::exists(dir / "run1" / "checkpoint.json"));
  CHECK(std::filesystem::exists(dir / "run1" / "history.json"));
  CHECK(std::filesystem::exists(dir / "run1" / "metrics.json"));

  const auto metrics = nlohmann::json::parse(slurp(dir / "run1" / "metrics.json"));
  CHECK(metrics.contains("per_class_recall"));
  CHECK(metrics.contains("per_class_f1"));
  CHECK(metrics.contains("overall_accuracy"));
  CHECK(metrics.contains("balanced_accuracy"));
  CHECK(metrics.contains("class_counts"));
  CHECK(metrics.contains("loss_spec"));
  CHECK(metrics.contains("seed"));

  args.out_dir = (dir / "run2").string();
  std::ostringstream out2, err2;
  REQUIRE(cmd_train(args, out2, err2) == 0);
  CHECK(slurp(dir / "run1" / "metrics.json") == slurp(dir / "run2" / "metrics.json"));
  CHECK(slurp(dir / "run1" / "history.json") == slurp(dir / "run2" / "history.json"));
  CHECK(slurp(dir / "run1" / "checkpoint.json") == slurp(dir / "run2" / "checkpoint.json"));

  // Cross-validation adds per-fold metrics.
  args.out_dir = (dir / "runcv").string();
  args.cv_folds = 3;
  std::ostringstream out3, err3;
  REQUIRE_MESSAGE(cmd_train(args, out3, err3) == 0, err3.str());
  const auto cv = nlohmann::json::parse(slurp(dir / "runcv" / "cv_metrics.json"));
  CHECK(cv.at("folds").size() == 3);
  CHECK(cv.contains("mean_balanced_accuracy"));

  // Missing loss section is a config error naming the key.
  const auto noloss = write_config("losslab_noloss.ini",
                                   "[dataset]\nsource = generate\nnum_classes = 2\nn_max = 20\n"
                                   "imbalance_ratio = 1\ndims = 2\ncluster_separation = 3\n"
                                   "noise_sigma = 1\n");
  TrainArgs bad;
  bad.config_path = noloss.string();
  bad.out_dir = (dir / "none").string();
  std::ostringstream out4, err4;
  CHECK(cmd_train(bad, out4, err4) == 2);
  CHECK(err4.str().find("[loss]") != std::string::npos);

  std::filesystem::remove(cfg);
  std::filesystem::remove(noloss);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bench command") {
  const auto dir = temp_dir("losslab_bench_test");
  const std::string base = R"(
[dataset]
source = generate
num_classes = 3
n_max = 60
imbalance_ratio = 5
dims = 2
cluster_separation = 4.0
noise_sigma = 1.0
seed = 3

[training]
learning_rate = 0.01
batch_size = 32
epochs = 5

[loss:ce]
kind = ce

[loss:alpa_v2]
kind = alpa
variant = v2

[bench]
seeds = 1, 2
)";
  const auto cfg = write_config("losslab_bench.ini", base);
  BenchArgs args;
  args.config_path = cfg.string();
  args.out_dir = (dir / "bench").string();
  std::ostringstream out, err;
  REQUIRE_MESSAGE(cmd_bench(args, out, err) == 0, err.str());
  CHECK(out.str().find("balanced accuracy") != std::string::npos);

  const auto j = nlohmann::json::parse(slurp(dir / "bench" / "bench.json"));
  REQUIRE(j.at("losses").size() == 2);
  CHECK(j.at("losses")[0].at("label") == "ce");
  CHECK(j.at("losses")[1].at("label") == "alpa_v2");
  CHECK(j.at("losses")[0].at("per_seed").size() == 2);
  CHECK(j.at("losses")[0].contains("median_balanced_accuracy"));
  CHECK(j.at("losses")[0].contains("median_worst3_recall"));

  // A single loss is a usage error.
  const auto single = write_config("losslab_single.ini", R"(
[dataset]
source = generate
num_classes = 2
n_max = 20
imbalance_ratio = 1
dims = 2
cluster_separation = 3
noise_sigma = 1

[loss:only]
kind = bce

[bench]
seeds = 1
)");
  BenchArgs bad;
  bad.config_path = single.string();
  bad.out_dir = (dir / "bad").string();
  std::ostringstream out2, err2;
  CHECK(cmd_bench(bad, out2, err2) == 2);
  CHECK(err2.str().find(">= 2 losses") != std::string::npos);

  std::filesystem::remove(cfg);
  std::filesystem::remove(single);
  std::filesystem::remove_all(dir);
}

TEST_CASE("shipped smoke config trains and writes all artifacts") {
  const char* src = std::getenv("LOSSLAB_SOURCE_DIR");
  REQUIRE_MESSAGE(src != nullptr, "LOSSLAB_SOURCE_DIR not set; run through ctest");
  const auto cfg = std::filesystem::path(src) / "configs" / "smoke_train.ini";
  REQUIRE(std::filesystem::exists(cfg));

  const auto dir = temp_dir("losslab_smoke_shipped");
  TrainArgs args;
  args.config_path = cfg.string();
  args.out_dir = (dir / "out").string();
  std::ostringstream out, err;
  REQUIRE_MESSAGE(cmd_train(args, out, err) == 0, err.str());
  CHECK(std::filesystem::exists(dir / "out" / "checkpoint.json"));
  CHECK(std::filesystem::exists(dir / "out" / "history.json"));
  CHECK(std::filesystem::exists(dir / "out" / "metrics.json"));
  const auto metrics = nlohmann::json::parse(slurp(dir / "out" / "metrics.json"));
  CHECK(metrics.at("balanced_accuracy").get<double>() >= 0.95);
  std::filesystem::remove_all(dir);
}

TEST_CASE("gradcheck command") {
  GradCheckArgs args;
  args.grid_points = 41;
  std::ostringstream out, err;
  CHECK(cmd_gradcheck(args, out, err) == 0);
  CHECK(out.str().find("PASS") != std::string::npos);
  CHECK(out.str().find("FAIL") == std::string::npos);
}
