#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "losslab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"loss-function laboratory for long-tailed classification"};
  app.require_subcommand(1);

  // pade derive
  auto* pade = app.add_subcommand("pade", "rational-approximation tools");
  pade->require_subcommand(1);
  losslab::PadeDeriveArgs derive_args;
  auto* derive = pade->add_subcommand("derive", "derive coefficients from a series");
  derive->add_option("--target", derive_args.target, "bce-pos or bce-neg")->required();
  derive->add_option("--m", derive_args.m, "numerator order");
  derive->add_option("--n", derive_args.n, "denominator order");
  derive->add_option("--order", derive_args.order, "series order (default m + n)");

  // grad-curve
  losslab::GradCurveArgs curve_args;
  auto* curve = app.add_subcommand("grad-curve", "emit negative-branch gradient curves as CSV");
  curve->add_option("--grid", curve_args.grid_size, "number of probability grid points");
  curve->add_option("--gamma-neg", curve_args.alpa_gamma_neg, "alpa negative focusing exponent");
  curve->add_option("--out", curve_args.out_path, "output CSV path");

  // gen-data
  losslab::GenDataArgs gen_args;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen-data", "generate a long-tailed dataset CSV");
  gen->add_option("--config", gen_args.config_path, "run config with a [dataset] section")
      ->required();
  gen->add_option("--out", gen_args.out_path, "output CSV path");
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "override the profile seed");

  // train
  losslab::TrainArgs train_args;
  std::uint64_t train_seed = 0;
  auto* train = app.add_subcommand("train", "train one model and evaluate on the test split");
  train->add_option("--config", train_args.config_path, "run config path")->required();
  train->add_option("--out", train_args.out_dir, "artifact directory (overrides config)");
  auto* train_seed_opt = train->add_option("--seed", train_seed, "override the training seed");
  train->add_option("--cv", train_args.cv_folds, "also run stratified k-fold cross-validation");

  // bench
  losslab::BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "compare several losses on identical splits");
  bench->add_option("--config", bench_args.config_path, "run config path")->required();
  bench->add_option("--out", bench_args.out_dir, "artifact directory (overrides config)");

  // gradcheck
  losslab::GradCheckArgs check_args;
  auto* check = app.add_subcommand("gradcheck", "verify analytic gradients against differences");
  check->add_option("--points", check_args.grid_points, "logit grid points");
  check->add_option("--step", check_args.h, "central-difference step");
  check->add_option("--tol", check_args.tolerance, "max relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*gen_seed_opt) {
    gen_args.seed_override = gen_seed;
  }
  if (*train_seed_opt) {
    train_args.seed_override = train_seed;
  }

  if (derive->parsed()) {
    return losslab::cmd_pade_derive(derive_args, std::cout, std::cerr);
  }
  if (curve->parsed()) {
    return losslab::cmd_grad_curve(curve_args, std::cout, std::cerr);
  }
  if (gen->parsed()) {
    return losslab::cmd_gen_data(gen_args, std::cout, std::cerr);
  }
  if (train->parsed()) {
    return losslab::cmd_train(train_args, std::cout, std::cerr);
  }
  if (bench->parsed()) {
    return losslab::cmd_bench(bench_args, std::cout, std::cerr);
  }
  if (check->parsed()) {
    return losslab::cmd_gradcheck(check_args, std::cout, std::cerr);
  }
  std::cerr << "no subcommand\n";
  return 2;
}
