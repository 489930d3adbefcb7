#include "rocket/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "rocket/errors.hpp"
#include "rocket/logistic.hpp"
#include "rocket/pipeline.hpp"
#include "rocket/random.hpp"
#include "rocket/ridge.hpp"
#include "rocket/transform.hpp"

namespace rocket {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kTranche = 4096;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Template {
  double f1, f2, phi1, phi2;
};

std::vector<Template> class_templates(std::size_t classes, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x7e1ULL));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> jitter(0.0, 0.5);
  std::vector<Template> t(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    // Frequencies are spaced by class so templates stay distinct.
    t[c].f1 = 1.0 + static_cast<double>(c) + jitter(rng);
    t[c].f2 = 3.0 + 1.5 * static_cast<double>(c) + jitter(rng);
    t[c].phi1 = phase(rng);
    t[c].phi2 = phase(rng);
  }
  return t;
}

Dataset synthesize(std::size_t n, std::size_t length, std::size_t classes, std::uint64_t seed, double noise,
                   std::uint64_t stream) {
  if (classes < 2 || n < classes) throw ConfigError("synthetic data needs n >= classes >= 2");
  if (length < 8) throw ConfigError("synthetic series length must be at least 8");
  if (!(noise >= 0.0)) throw ConfigError("noise must be non-negative");
  const auto templates = class_templates(classes, seed);
  Rng rng(derive_seed(seed, stream));
  std::normal_distribution<double> gauss(0.0, noise);

  Dataset ds;
  for (std::size_t c = 0; c < classes; ++c) ds.label_vocabulary.push_back(std::to_string(c));
  ds.series.reserve(n);
  ds.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    const Template& t = templates[c];
    Series s(length);
    for (std::size_t j = 0; j < length; ++j) {
      const double x = static_cast<double>(j) / static_cast<double>(length);
      s[j] = std::sin(2.0 * std::numbers::pi * t.f1 * x + t.phi1) +
             0.75 * std::sin(2.0 * std::numbers::pi * t.f2 * x + t.phi2) + (noise > 0.0 ? gauss(rng) : 0.0);
    }
    ds.series.push_back(znormalize(s));
    ds.labels.push_back(static_cast<int>(c));
  }
  ds.length_policy = LengthPolicy::fixed(length);
  return ds;
}

struct Trained {
  double train_s = 0.0;
  double accuracy = 0.0;
};

// Fits the size-appropriate classifier on pre-transformed (ridge) or raw (sgd)
// data and scores it on `test`.
Trained train_once(const Dataset& train, const FeatureMatrix& features, const Dataset& test,
                   std::span<const Kernel> kernels, const BenchOptions& options) {
  TransformOptions topts;
  topts.threads = options.threads;
  Trained out;
  std::vector<int> predicted;
  if (train.size() <= options.sgd_threshold) {
    const auto start = Clock::now();
    const RidgeModel model = fit_ridge(features, train.labels, train.label_vocabulary);
    out.train_s = seconds_since(start);
    predicted = predict_ridge(model, apply_kernels(test.series, kernels, topts));
  } else {
    TrainSchedule schedule;
    schedule.seed = options.seed;
    const std::size_t held = std::min(schedule.validation_size, train.size() / 5);
    Tranche validation{{train.series.begin(), train.series.begin() + static_cast<std::ptrdiff_t>(held)},
                       {train.labels.begin(), train.labels.begin() + static_cast<std::ptrdiff_t>(held)}};
    VectorTrancheSource stream({train.series.begin() + static_cast<std::ptrdiff_t>(held), train.series.end()},
                               {train.labels.begin() + static_cast<std::ptrdiff_t>(held), train.labels.end()}, kTranche);
    const auto start = Clock::now();
    const LogisticModel model = fit_logistic(stream, kernels, schedule, validation, train.label_vocabulary, topts);
    out.train_s = seconds_since(start);
    predicted = predict_logistic(model, apply_kernels(test.series, kernels, topts));
  }
  out.accuracy = accuracy(predicted, test.labels);
  return out;
}

BenchRow run_cell(std::size_t n, std::size_t length, std::size_t k, std::size_t reported, const BenchOptions& options) {
  if (options.repeats < 1) throw ConfigError("repeats must be at least 1");
  const Dataset train = gen_synthetic(n, length, options.num_classes, options.seed, options.noise);
  GeneratorConfig config;
  config.num_kernels = k;
  config.seed = options.seed;
  const std::vector<Kernel> kernels = generate_kernels(config, length);
  TransformOptions topts;
  topts.threads = options.threads;

  BenchRow row;
  row.n_or_l = reported;
  row.k = k;
  row.threads = options.threads;
  row.accuracy = std::nan("");

  std::vector<double> transform_times, train_times;
  const bool sgd = n > options.sgd_threshold;
  FeatureMatrix features;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    const auto start = Clock::now();
    if (!sgd) {
      features = apply_kernels(train.series, kernels, topts);
    } else {
      // Too large to hold at once: time a pass in tranche-sized chunks.
      const std::span<const Series> all(train.series);
      for (std::size_t i = 0; i < all.size(); i += kTranche)
        apply_kernels(all.subspan(i, std::min(kTranche, all.size() - i)), kernels, topts);
    }
    transform_times.push_back(seconds_since(start));
  }
  row.transform_s = median(transform_times);
  if (options.train) {
    const Dataset test = gen_synthetic_test(options.test_size, length, options.num_classes, options.seed, options.noise);
    for (std::size_t r = 0; r < options.repeats; ++r) {
      const Trained t = train_once(train, features, test, kernels, options);
      train_times.push_back(t.train_s);
      row.accuracy = t.accuracy;
    }
    row.train_s = median(train_times);
  }
  return row;
}

}  // namespace

Dataset gen_synthetic(std::size_t n, std::size_t length, std::size_t num_classes, std::uint64_t seed, double noise) {
  return synthesize(n, length, num_classes, seed, noise, 0x7a1aULL);
}

Dataset gen_synthetic_test(std::size_t n, std::size_t length, std::size_t num_classes, std::uint64_t seed,
                           double noise) {
  return synthesize(n, length, num_classes, seed, noise, 0x7e57ULL);
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

double time_transform(std::span<const Series> series, std::span<const Kernel> kernels, std::size_t threads,
                      std::size_t repeats, FeatureMode mode) {
  TransformOptions topts;
  topts.threads = threads;
  topts.mode = mode;
  std::vector<double> times;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, repeats); ++r) {
    const auto start = Clock::now();
    const FeatureMatrix f = apply_kernels(series, kernels, topts);
    times.push_back(seconds_since(start));
    if (f.rows() != series.size()) throw NumericalError("transform returned the wrong row count");
  }
  return median(times);
}

std::vector<BenchRow> scale_n(std::span<const std::size_t> sizes, std::size_t length, std::size_t k,
                              const BenchOptions& options) {
  std::vector<BenchRow> rows;
  for (std::size_t n : sizes) rows.push_back(run_cell(n, length, k, n, options));
  return rows;
}

std::vector<BenchRow> scale_l(std::span<const std::size_t> lengths, std::size_t n, std::size_t k,
                              const BenchOptions& options) {
  std::vector<BenchRow> rows;
  for (std::size_t l : lengths) rows.push_back(run_cell(n, l, k, l, options));
  return rows;
}

std::vector<BenchRow> scale_k(std::span<const std::size_t> ks, std::size_t n, std::size_t length,
                              const BenchOptions& options) {
  std::vector<BenchRow> rows;
  for (std::size_t k : ks) rows.push_back(run_cell(n, length, k, n, options));
  return rows;
}

void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out) {
  out << "n_or_l,k,transform_s,train_s,accuracy,threads\n";
  char buf[128];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f,%.4f,%zu\n", r.n_or_l, r.k, r.transform_s, r.train_s, r.accuracy,
                  r.threads);
    out << buf;
  }
}

}  // namespace rocket
