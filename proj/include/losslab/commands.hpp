#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace losslab {

// Command implementations behind the CLI. Each returns a process exit code:
// 0 success, 1 runtime failure, 2 usage/config error.

struct PadeDeriveArgs {
  std::string target;  // bce-pos | bce-neg
  int m = 1;
  int n = 1;
  int order = -1;  // defaults to m + n
};
int cmd_pade_derive(const PadeDeriveArgs& args, std::ostream& out, std::ostream& err);

struct GradCurveArgs {
  int grid_size = 1001;
  double alpa_gamma_neg = 4.0;
  std::string out_path = "grad_curves.csv";
};
int cmd_grad_curve(const GradCurveArgs& args, std::ostream& out, std::ostream& err);

struct GenDataArgs {
  std::string config_path;
  std::string out_path = "dataset.csv";
  std::optional<std::uint64_t> seed_override;
};
int cmd_gen_data(const GenDataArgs& args, std::ostream& out, std::ostream& err);

struct TrainArgs {
  std::string config_path;
  std::string out_dir;  // empty keeps the config's choice
  std::optional<std::uint64_t> seed_override;
  int cv_folds = 0;  // 0 disables cross-validation
};
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);

struct BenchArgs {
  std::string config_path;
  std::string out_dir;
};
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

struct GradCheckArgs {
  int grid_points = 101;
  double h = 1e-5;
  double tolerance = 1e-6;
};
int cmd_gradcheck(const GradCheckArgs& args, std::ostream& out, std::ostream& err);

}  // namespace losslab
