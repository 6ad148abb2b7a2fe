#include "losslab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "losslab/config.hpp"
#include "losslab/dataset.hpp"
#include "losslab/gradcheck.hpp"
#include "losslab/losses.hpp"
#include "losslab/metrics.hpp"
#include "losslab/numeric.hpp"
#include "losslab/pade.hpp"
#include "losslab/serialize.hpp"
#include "losslab/trainer.hpp"

namespace losslab {

namespace {

template <typename Fn>
int run_command(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) {
    return 0.0;
  }
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double worst3_mean_recall(const MetricsReport& r) {
  std::vector<double> recalls(r.per_class_recall.data(),
                              r.per_class_recall.data() + r.per_class_recall.size());
  std::sort(recalls.begin(), recalls.end());
  const std::size_t take = std::min<std::size_t>(3, recalls.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < take; ++i) {
    acc += recalls[i];
  }
  return acc / static_cast<double>(take);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  out << text;
  if (!out) {
    throw std::runtime_error("failed writing output file: " + path);
  }
}

struct GradientPreset {
  std::string name;
  LossSpec spec;
  double weight = 1.0;  // class weight, exercised by the class-balanced preset
};

std::vector<GradientPreset> gradient_presets() {
  std::vector<GradientPreset> presets;
  presets.push_back({"bce", LossSpec::bce(), 1.0});
  presets.push_back({"ce", LossSpec::ce(), 1.0});
  presets.push_back({"focal g=0.5", LossSpec::focal(0.5), 1.0});
  presets.push_back({"focal g=2", LossSpec::focal(2.0), 1.0});
  presets.push_back({"asl g-=4 m=0", LossSpec::asl(0.0, 4.0, 0.0), 1.0});
  presets.push_back({"asl g-=4 m=0.01", LossSpec::asl(0.0, 4.0, 0.01), 1.0});
  presets.push_back({"cb b=0.99", LossSpec::cb(0.99), cb_raw_weight(10, 0.99)});
  presets.push_back({"alpa v1", LossSpec::alpa(AlpaVariant::V1), 1.0});
  presets.push_back({"alpa v2", LossSpec::alpa(AlpaVariant::V2), 1.0});
  presets.push_back({"alpa v3", LossSpec::alpa(AlpaVariant::V3), 1.0});
  return presets;
}

double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-12});
  return std::abs(a - b) / denom;
}

/// Worst analytic-vs-central-difference mismatch over the z grid, both targets.
double preset_max_rel_error(const GradientPreset& preset, int grid_points, double h) {
  double worst = 0.0;
  for (int y = 0; y <= 1; ++y) {
    for (int i = 0; i < grid_points; ++i) {
      const double z = -5.0 + 10.0 * static_cast<double>(i) / static_cast<double>(grid_points - 1);
      const double p = clamp_prob(sigmoid(z));
      const double analytic = preset.weight * loss_term(p, y, preset.spec).dvalue_dlogit;
      const double fd = fd_gradient(
          [&](double zz) {
            return preset.weight * loss_term(clamp_prob(sigmoid(zz)), y, preset.spec).value;
          },
          z, h);
      worst = std::max(worst, relative_error(analytic, fd));
    }
  }
  return worst;
}

}  // namespace

int cmd_pade_derive(const PadeDeriveArgs& args, std::ostream& out, std::ostream& err) {
  if (args.target != "bce-pos" && args.target != "bce-neg") {
    err << "usage: pade derive --target {bce-pos|bce-neg} [--m M] [--n N] [--order K]\n";
    return 2;
  }
  return run_command(err, [&]() {
    const int order = args.order < 0 ? args.m + args.n : args.order;
    const TaylorSeries<double> series =
        args.target == "bce-pos" ? taylor_pos_bce(order) : taylor_neg_bce(order);
    const PadeApproximant<double> approx = pade_from_taylor(series, args.m, args.n);

    Json j;
    j["target"] = args.target;
    j["m"] = args.m;
    j["n"] = args.n;
    j["order"] = order;
    Json solver;
    solver["num"] = approx.num_coeffs;
    solver["den"] = approx.den_coeffs;
    solver["expansion_point"] = approx.expansion_point;
    j["solver"] = std::move(solver);
    if (args.m == 1 && args.n == 1) {
      const AlpaCoefficients canon;
      Json c;
      if (args.target == "bce-pos") {
        c["a0"] = canon.a0;
        c["a1"] = canon.a1;
        c["b1"] = canon.b1;
      } else {
        c["c0"] = canon.c0;
        c["c1"] = canon.c1;
        c["d1"] = canon.d1;
      }
      j["canonical"] = std::move(c);
      j["note"] =
          "canonical first-order constants are not the order-matched solution; "
          "the solver output above is the standard [1/1] match of the same series";
    }
    out << j.dump(2) << '\n';
    return 0;
  });
}

int cmd_grad_curve(const GradCurveArgs& args, std::ostream& out, std::ostream& err) {
  return run_command(err, [&]() {
    const auto curves = grad_curves(args.grid_size, default_curve_specs(args.alpa_gamma_neg));
    std::ostringstream csv;
    write_grad_curve_csv(csv, curves);
    write_text_file(args.out_path, csv.str());
    out << "wrote " << args.grid_size << " rows to " << args.out_path << '\n';
    return 0;
  });
}

int cmd_gen_data(const GenDataArgs& args, std::ostream& out, std::ostream& err) {
  return run_command(err, [&]() {
    RunConfig run = load_run_config(args.config_path);
    if (run.dataset_from_csv) {
      throw ConfigError("gen-data needs a [dataset] section with source = generate");
    }
    if (args.seed_override) {
      run.profile.seed = *args.seed_override;
    }
    const LabeledDataset ds = generate(run.profile);
    save_csv(ds, args.out_path);
    out << "wrote " << ds.size() << " samples (" << ds.num_classes << " classes) to "
        << args.out_path << '\n';
    return 0;
  });
}

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return run_command(err, [&]() {
    RunConfig run = load_run_config(args.config_path);
    if (run.losses.empty()) {
      throw ConfigError("missing section [loss]");
    }
    if (run.losses.size() > 1) {
      throw ConfigError("train expects exactly one loss section; use bench for several");
    }
    if (args.seed_override) {
      run.training.seed = *args.seed_override;
    }
    const std::string out_dir = args.out_dir.empty() ? run.out_dir : args.out_dir;
    std::filesystem::create_directories(out_dir);

    const LabeledDataset ds =
        run.dataset_from_csv ? load_csv(run.csv_path) : generate(run.profile);
    const auto [train_ds, test_ds] = stratified_split(ds, run.train_fraction, run.training.seed);

    TrainConfig config = run.training;
    config.loss = run.losses.front().second;

    if (args.cv_folds > 0) {
      const CvResult cv = train_cv(train_ds, config, args.cv_folds);
      Json jcv;
      jcv["folds"] = Json::array();
      for (std::size_t f = 0; f < cv.fold_reports.size(); ++f) {
        Json jf = report_to_json(cv.fold_reports[f], config.loss, config.seed);
        jf["fold"] = f;
        jcv["folds"].push_back(std::move(jf));
        out << "fold " << f << ": balanced accuracy "
            << cv.fold_reports[f].balanced_accuracy << '\n';
      }
      jcv["mean_balanced_accuracy"] = cv.mean_balanced_accuracy;
      write_text_file(out_dir + "/cv_metrics.json", jcv.dump(2) + "\n");
      out << "cv mean balanced accuracy: " << cv.mean_balanced_accuracy << '\n';
    }

    const TrainHistory history = train(train_ds, config, &test_ds);
    const MetricsReport test_report = evaluate(history.final_model, test_ds);

    save_checkpoint(out_dir + "/checkpoint.json", history.final_model, config);
    Json jh;
    jh["epochs"] = Json::array();
    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
      Json je;
      je["epoch"] = e + 1;
      je["train_loss"] = history.epochs[e].train_loss;
      je["val_balanced_accuracy"] = history.epochs[e].val_balanced_accuracy;
      jh["epochs"].push_back(std::move(je));
    }
    write_text_file(out_dir + "/history.json", jh.dump(2) + "\n");
    write_text_file(out_dir + "/metrics.json",
                    report_to_json(test_report, config.loss, config.seed).dump(2) + "\n");

    out << "test balanced accuracy: " << test_report.balanced_accuracy << '\n';
    out << "test overall accuracy:  " << test_report.overall_accuracy << '\n';
    out << "artifacts written to " << out_dir << '\n';
    return 0;
  });
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  return run_command(err, [&]() {
    RunConfig run = load_run_config(args.config_path);
    if (run.losses.size() < 2) {
      throw ConfigError("benchmark needs >= 2 losses");
    }
    if (run.bench_seeds.empty()) {
      throw ConfigError("benchmark needs a [bench] section with a seeds list");
    }
    const std::string out_dir = args.out_dir.empty() ? run.out_dir : args.out_dir;
    std::filesystem::create_directories(out_dir);

    struct Cell {
      std::uint64_t seed;
      MetricsReport report;
    };
    std::vector<std::vector<Cell>> cells(run.losses.size());
    ClassCounts train_counts;

    for (const std::uint64_t seed : run.bench_seeds) {
      LabeledDataset ds;
      if (run.dataset_from_csv) {
        ds = load_csv(run.csv_path);
      } else {
        LongTailProfile profile = run.profile;
        profile.seed = run.profile.seed + seed;
        ds = generate(profile);
      }
      // One split per seed, shared by every loss.
      const auto [train_ds, test_ds] = stratified_split(ds, run.train_fraction, seed);
      train_counts = train_ds.class_counts;
      for (std::size_t li = 0; li < run.losses.size(); ++li) {
        TrainConfig config = run.training;
        config.loss = run.losses[li].second;
        config.seed = seed;
        const TrainHistory history = train(train_ds, config, &test_ds);
        cells[li].push_back({seed, evaluate(history.final_model, test_ds)});
      }
    }

    const int k = static_cast<int>(train_counts.size());
    Json j;
    j["schema_version"] = 1;
    if (run.dataset_from_csv) {
      j["dataset"] = Json{{"source", "csv"}, {"path", run.csv_path}};
    } else {
      Json d = profile_to_json(run.profile);
      d["source"] = "generate";
      j["dataset"] = std::move(d);
    }
    j["train_fraction"] = run.train_fraction;
    j["seeds"] = run.bench_seeds;
    Json jt;
    jt["architecture"] = run.training.architecture == Architecture::Linear ? "linear" : "mlp1";
    jt["hidden_units"] = run.training.hidden_units;
    jt["learning_rate"] = run.training.learning_rate;
    jt["batch_size"] = run.training.batch_size;
    jt["epochs"] = run.training.epochs;
    jt["adam_beta1"] = run.training.adam_beta1;
    jt["adam_beta2"] = run.training.adam_beta2;
    jt["weight_decay"] = run.training.weight_decay;
    jt["init_scale"] = run.training.init_scale;
    j["training"] = std::move(jt);

    j["losses"] = Json::array();
    std::vector<std::vector<double>> median_recall(run.losses.size());
    std::vector<std::vector<double>> median_f1(run.losses.size());
    std::vector<double> median_bal(run.losses.size());

    for (std::size_t li = 0; li < run.losses.size(); ++li) {
      Json jl;
      jl["label"] = run.losses[li].first;
      jl["loss_spec"] = loss_spec_to_json(run.losses[li].second);
      jl["per_seed"] = Json::array();
      std::vector<double> bals, worst3;
      median_recall[li].resize(static_cast<std::size_t>(k));
      median_f1[li].resize(static_cast<std::size_t>(k));
      for (const Cell& cell : cells[li]) {
        Json js = report_to_json(cell.report, run.losses[li].second, cell.seed);
        jl["per_seed"].push_back(std::move(js));
        bals.push_back(cell.report.balanced_accuracy);
        worst3.push_back(worst3_mean_recall(cell.report));
      }
      for (int c = 0; c < k; ++c) {
        std::vector<double> rs, fs;
        for (const Cell& cell : cells[li]) {
          rs.push_back(cell.report.per_class_recall(c));
          fs.push_back(cell.report.per_class_f1(c));
        }
        median_recall[li][static_cast<std::size_t>(c)] = median(rs);
        median_f1[li][static_cast<std::size_t>(c)] = median(fs);
      }
      median_bal[li] = median(bals);
      jl["median_per_class_recall"] = median_recall[li];
      jl["median_per_class_f1"] = median_f1[li];
      jl["median_balanced_accuracy"] = median_bal[li];
      jl["median_worst3_recall"] = median(worst3);
      j["losses"].push_back(std::move(jl));
    }
    write_text_file(out_dir + "/bench.json", j.dump(2) + "\n");

    // Table mirrors the usual comparison layout: one Acc/F1 column pair per
    // loss, per-class medians across seeds, balanced accuracy at the bottom.
    out << std::left << std::setw(8) << "class" << std::setw(10) << "train_n";
    for (const auto& [label, spec] : run.losses) {
      out << std::setw(9) << (label + " Acc") << std::setw(9) << "F1";
    }
    out << '\n';
    for (int c = 0; c < k; ++c) {
      out << std::left << std::setw(8) << c << std::setw(10)
          << train_counts[static_cast<std::size_t>(c)];
      for (std::size_t li = 0; li < run.losses.size(); ++li) {
        out << std::setw(9) << std::fixed << std::setprecision(2)
            << 100.0 * median_recall[li][static_cast<std::size_t>(c)] << std::setw(9)
            << std::setprecision(2) << median_f1[li][static_cast<std::size_t>(c)];
      }
      out << '\n';
      out.unsetf(std::ios::fixed);
    }
    out << std::left << std::setw(18) << "balanced accuracy";
    for (std::size_t li = 0; li < run.losses.size(); ++li) {
      out << std::setw(18) << std::fixed << std::setprecision(4) << median_bal[li];
      out.unsetf(std::ios::fixed);
    }
    out << '\n';
    out << "bench report written to " << out_dir << "/bench.json\n";
    return 0;
  });
}

int cmd_gradcheck(const GradCheckArgs& args, std::ostream& out, std::ostream& err) {
  return run_command(err, [&]() {
    bool all_ok = true;
    for (const auto& preset : gradient_presets()) {
      const double worst = preset_max_rel_error(preset, args.grid_points, args.h);
      const bool ok = worst <= args.tolerance;
      all_ok = all_ok && ok;
      out << (ok ? "PASS" : "FAIL") << "  " << std::left << std::setw(18) << preset.name
          << "max rel err " << std::scientific << std::setprecision(3) << worst << '\n';
      out.unsetf(std::ios::scientific);
    }
    return all_ok ? 0 : 1;
  });
}

}  // namespace losslab
