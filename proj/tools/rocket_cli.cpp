// Command-line front end: train, eval, predict, transform, repro,
// sensitivity and bench.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rocket/bench.hpp"
#include "rocket/data.hpp"
#include "rocket/errors.hpp"
#include "rocket/model_io.hpp"
#include "rocket/parallel.hpp"
#include "rocket/pipeline.hpp"
#include "rocket/sensitivity.hpp"

using namespace rocket;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct PipelineFlags {
  std::size_t kernels = 10'000;
  std::uint64_t seed = 0;
  std::string classifier = "ridge";
  std::string normalize = "on";
  std::string config;
  std::string variant;
  double learning_rate = 0.0;
  CLI::Option* kernels_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* cmd) {
    kernels_opt = cmd->add_option("--kernels,-k", kernels, "Number of kernels")->capture_default_str();
    seed_opt = cmd->add_option("--seed,-s", seed, "Random seed")->capture_default_str();
    cmd->add_option("--classifier", classifier, "ridge or sgd")
        ->check(CLI::IsMember({"ridge", "sgd", "logistic"}))
        ->capture_default_str();
    cmd->add_option("--normalize", normalize, "Z-normalize series (on/off)")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    cmd->add_option("--config", config, "Generator config JSON, or a variant catalog with --variant")
        ->check(CLI::ExistingFile);
    cmd->add_option("--variant", variant, "Variant name inside a catalog given by --config");
    cmd->add_option("--learning-rate", learning_rate, "Initial learning rate for sgd (default: searched)")
        ->check(CLI::PositiveNumber);
  }

  // Flags given explicitly override the config file.
  PipelineOptions options() const {
    PipelineOptions o;
    if (!config.empty()) {
      std::ifstream in(config);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(config + ": " + e.what());
      }
      if (j.contains("variants")) {
        if (variant.empty()) throw ConfigError("--config is a variant catalog; choose one with --variant");
        bool found = false;
        for (const Variant& v : parse_variants(j))
          if (v.name == variant) {
            o.generator = v.config;
            found = true;
          }
        if (!found) throw ConfigError("no variant '" + variant + "' in " + config);
      } else {
        o.generator = generator_config_from_json(j);
      }
    } else if (!variant.empty()) {
      throw ConfigError("--variant requires --config");
    }
    if (config.empty() || kernels_opt->count()) o.generator.num_kernels = kernels;
    if (config.empty() || seed_opt->count()) o.generator.seed = seed;
    o.schedule.seed = o.generator.seed;
    if (learning_rate > 0.0) o.schedule.initial_lr = learning_rate;
    o.classifier = parse_classifier_kind(classifier);
    o.normalize = normalize == "on";
    o.generator.validate();
    return o;
  }
};

std::vector<std::size_t> parse_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("invalid number '" + item + "' in list '" + s + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw DataError("cannot write " + path);
  return file;
}

void print_features(const FeatureMatrix& f, std::ostream& out) {
  const std::size_t per = features_per_kernel(f.mode);
  for (std::size_t c = 0; c < f.cols(); ++c) {
    if (c) out << ',';
    const std::size_t kernel = c / per;
    const bool is_ppv = f.mode == FeatureMode::ppv_only || (f.mode == FeatureMode::ppv_and_max && c % 2 == 0);
    out << (is_ppv ? "ppv_" : "max_") << kernel;
  }
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < f.rows(); ++r) {
    for (std::size_t c = 0; c < f.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", f.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random convolutional kernel time series classification"};
  app.require_subcommand(1);
  app.fallthrough();
  std::size_t threads = 0;
  app.add_option("--threads,-t", threads, "Worker thread cap (0 = all cores)")->capture_default_str();

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit a model on a UCR-format training file");
  PipelineFlags train_flags;
  std::string train_file, model_out;
  train_cmd->add_option("train_file", train_file, "Training data")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--model,-o", model_out, "Model output path")->required();
  train_flags.attach(train_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Report test accuracy of a saved model");
  std::string eval_model, eval_file;
  eval_cmd->add_option("--model,-m", eval_model, "Model file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("test_file", eval_file, "Test data")->required()->check(CLI::ExistingFile);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Print one predicted label per series");
  std::string predict_model, predict_file;
  predict_cmd->add_option("--model,-m", predict_model, "Model file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("input", predict_file, "UCR-format input (labels are ignored)")
      ->required()
      ->check(CLI::ExistingFile);

  // transform
  auto* transform_cmd = app.add_subcommand("transform", "Write transformed features as CSV");
  PipelineFlags transform_flags;
  std::string transform_model, transform_file, transform_out;
  transform_cmd->add_option("input", transform_file, "UCR-format input")->required()->check(CLI::ExistingFile);
  transform_cmd->add_option("--model,-m", transform_model, "Use the kernels of a saved model")
      ->check(CLI::ExistingFile);
  transform_cmd->add_option("--output,-o", transform_out, "CSV output (default stdout)");
  transform_flags.attach(transform_cmd);

  // repro
  auto* repro_cmd = app.add_subcommand("repro", "Mean and std test accuracy over seeds for a dataset manifest");
  PipelineFlags repro_flags;
  std::string manifest, repro_out, repro_cells;
  std::size_t repro_seeds = 10;
  repro_cmd->add_option("manifest", manifest, "Dataset manifest (JSON)")->required()->check(CLI::ExistingFile);
  repro_cmd->add_option("--seeds", repro_seeds, "Seeds 0..N-1")->capture_default_str();
  repro_cmd->add_option("--output,-o", repro_out, "Summary CSV (default stdout)");
  repro_cmd->add_option("--cells", repro_cells, "Per-seed results CSV (resumable)");
  repro_flags.attach(repro_cmd);

  // sensitivity
  auto* sens_cmd = app.add_subcommand("sensitivity", "Run a variant x dataset x seed plan");
  std::string plan_file, results_file, summary_file, ranks_file, reference = "default";
  double tolerance = 0.0;
  sens_cmd->add_option("plan", plan_file, "Plan file (JSON)")->required()->check(CLI::ExistingFile);
  sens_cmd->add_option("--results", results_file, "Per-cell results CSV (resumable)")->required();
  sens_cmd->add_option("--summary", summary_file, "Per variant/dataset mean and std CSV");
  sens_cmd->add_option("--ranks", ranks_file, "Mean ranks and win/draw/loss CSV");
  sens_cmd->add_option("--reference", reference, "Variant for win/draw/loss")->capture_default_str();
  sens_cmd->add_option("--tolerance", tolerance, "Win/draw/loss draw tolerance")->capture_default_str();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Time the transform and classifier on synthetic data");
  std::string axis = "n", values, bench_out;
  std::size_t bench_n = 1000, bench_l = 100, bench_k = 10'000;
  BenchOptions bench_opts;
  bool no_train = false;
  bench_cmd->add_option("--axis", axis, "n, l or k")->check(CLI::IsMember({"n", "l", "k"}))->capture_default_str();
  bench_cmd->add_option("--values", values, "Comma-separated values along the axis")->required();
  bench_cmd->add_option("--n", bench_n, "Training size when not varied")->capture_default_str();
  bench_cmd->add_option("--length", bench_l, "Series length when not varied")->capture_default_str();
  bench_cmd->add_option("--kernels,-k", bench_k, "Kernel count when not varied")->capture_default_str();
  bench_cmd->add_option("--repeats", bench_opts.repeats, "Repeats per cell (median)")->capture_default_str();
  bench_cmd->add_option("--bench-threads", bench_opts.threads, "Threads inside timed regions")->capture_default_str();
  bench_cmd->add_option("--classes", bench_opts.num_classes)->capture_default_str();
  bench_cmd->add_option("--test-size", bench_opts.test_size)->capture_default_str();
  bench_cmd->add_option("--sgd-threshold", bench_opts.sgd_threshold)->capture_default_str();
  bench_cmd->add_option("--noise", bench_opts.noise)->capture_default_str();
  bench_cmd->add_option("--seed,-s", bench_opts.seed)->capture_default_str();
  bench_cmd->add_flag("--no-train", no_train, "Time the transform only");
  bench_cmd->add_option("--output,-o", bench_out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    set_thread_cap(threads);

    if (*train_cmd) {
      const PipelineOptions options = train_flags.options();
      const Dataset train = read_ucr(train_file);
      FitTimings t;
      const RocketClassifier model = RocketClassifier::fit(train, options, &t);
      save_model(model, model_out);
      std::cerr << "trained on " << train.size() << " series, " << model.kernels().size() << " kernels, policy "
                << to_string(model.length_policy().kind) << "(" << model.length_policy().length << "); transform "
                << t.transform_seconds << " s, train " << t.train_seconds << " s\n";
    } else if (*eval_cmd) {
      const RocketClassifier model = load_model(eval_model);
      const Dataset test = read_ucr(eval_file, &model.class_labels());
      const Evaluation e = evaluate(model, test);
      std::printf("accuracy %.4f\n", e.accuracy);
      for (std::size_t c = 0; c < e.per_class_accuracy.size(); ++c)
        std::printf("class %s %.4f\n", model.class_labels()[c].c_str(), e.per_class_accuracy[c]);
      std::printf("transform_seconds %.3f\npredict_seconds %.3f\n", e.transform_seconds, e.predict_seconds);
    } else if (*predict_cmd) {
      const RocketClassifier model = load_model(predict_model);
      const Dataset input = read_ucr(predict_file);
      for (int p : model.predict(input)) std::cout << model.class_labels()[static_cast<std::size_t>(p)] << '\n';
    } else if (*transform_cmd) {
      const Dataset input = read_ucr(transform_file);
      FeatureMatrix features;
      if (!transform_model.empty()) {
        features = load_model(transform_model).transform(input.series);
      } else {
        const PipelineOptions o = transform_flags.options();
        Dataset prepared = input;
        prepare(prepared, o.normalize);
        if (!prepared.equal_length()) throw DataError("transform without --model needs equal-length series");
        const auto kernels = generate_kernels(o.generator, prepared.max_length());
        TransformOptions topts;
        topts.mode = o.generator.feature_mode;
        features = apply_kernels(prepared.series, kernels, topts);
      }
      std::ofstream file;
      print_features(features, open_output(transform_out, file));
    } else if (*repro_cmd) {
      const PipelineOptions options = repro_flags.options();
      ExperimentPlan plan;
      plan.base = options;
      plan.variants = {{"default", options.generator}};
      plan.datasets = load_manifest(manifest);
      plan.seeds = default_seeds(repro_seeds);
      std::ofstream file;
      std::ostream& out = open_output(repro_out, file);
      out << "dataset,mean_accuracy,std_accuracy,runs,failures\n";
      if (!plan.datasets.empty()) {
        RunOptions run;
        run.results_csv = repro_cells;
        run.on_cell = [](const CellResult& c) {
          if (c.ok())
            std::fprintf(stderr, "%s seed %llu: %.4f\n", c.dataset.c_str(), static_cast<unsigned long long>(c.seed),
                         c.accuracy);
          else
            std::fprintf(stderr, "%s seed %llu failed: %s\n", c.dataset.c_str(),
                         static_cast<unsigned long long>(c.seed), c.error.c_str());
        };
        for (const SummaryRow& r : summarize(run_plan(plan, run))) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "%.4f,%.4f,%zu,%zu", r.mean, r.std, r.runs, r.failures);
          out << r.dataset << ',' << buf << '\n';
        }
      }
    } else if (*sens_cmd) {
      const ExperimentPlan plan = load_plan(plan_file);
      RunOptions run;
      run.results_csv = results_file;
      run.on_cell = [](const CellResult& c) {
        std::fprintf(stderr, "%s %s seed %llu: %s\n", c.variant.c_str(), c.dataset.c_str(),
                     static_cast<unsigned long long>(c.seed),
                     c.ok() ? std::to_string(c.accuracy).c_str() : ("failed: " + c.error).c_str());
      };
      const auto cells = run_plan(plan, run);
      const auto rows = summarize(cells);
      std::ofstream summary;
      write_summary_csv(rows, open_output(summary_file, summary));
      if (!ranks_file.empty()) {
        std::ofstream ranks;
        write_ranks_csv(rows, reference, open_output(ranks_file, ranks), tolerance);
      }
    } else if (*bench_cmd) {
      bench_opts.train = !no_train;
      const auto list = parse_list(values);
      std::vector<BenchRow> rows;
      if (axis == "n")
        rows = scale_n(list, bench_l, bench_k, bench_opts);
      else if (axis == "l")
        rows = scale_l(list, bench_n, bench_k, bench_opts);
      else
        rows = scale_k(list, bench_n, bench_l, bench_opts);
      std::ofstream file;
      write_bench_csv(rows, open_output(bench_out, file));
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const DomainError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
