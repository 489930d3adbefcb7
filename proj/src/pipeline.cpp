#include "rocket/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "rocket/errors.hpp"
#include "rocket/random.hpp"

namespace rocket {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(ClassifierKind kind) { return kind == ClassifierKind::ridge ? "ridge" : "sgd"; }

ClassifierKind parse_classifier_kind(std::string_view s) {
  if (s == "ridge") return ClassifierKind::ridge;
  if (s == "sgd" || s == "logistic") return ClassifierKind::sgd;
  throw ConfigError("unknown classifier '" + std::string(s) + "' (expected ridge or sgd)");
}

RocketClassifier::RocketClassifier(PipelineOptions options, std::vector<Kernel> kernels, LengthPolicy policy, Model model)
    : options_(std::move(options)), kernels_(std::move(kernels)), policy_(policy), model_(std::move(model)) {}

TransformOptions RocketClassifier::transform_options() const {
  TransformOptions t;
  t.mode = options_.generator.feature_mode;
  t.threads = options_.threads;
  t.short_series = policy_.kind == LengthPolicy::Kind::as_is ? ShortSeriesPolicy::fallback : ShortSeriesPolicy::error;
  return t;
}

const std::vector<std::string>& RocketClassifier::class_labels() const {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.class_labels; }, model_);
}

RocketClassifier RocketClassifier::fit(const Dataset& train, const PipelineOptions& options, FitTimings* timings) {
  options.generator.validate();
  if (train.size() < 2) throw DataError("training set needs at least 2 series");
  if (train.num_classes() < 2) throw DataError("training set needs at least 2 classes");

  Dataset prepared = train;
  prepare(prepared, options.normalize);

  LengthPolicy policy = prepared.equal_length() ? LengthPolicy::fixed(prepared.max_length()) : prepared.length_policy;
  if (policy.kind == LengthPolicy::Kind::pending) {
    LengthPolicyOptions lp = options.length_policy;
    lp.generator = options.generator;
    lp.seed = derive_seed(options.generator.seed, 0x1e6a7ULL);
    lp.threads = options.threads;
    policy = resolve_length_policy(prepared, lp);
  }
  prepared = apply_length_policy(prepared, policy);

  RocketClassifier result;
  result.options_ = options;
  result.policy_ = policy;
  result.kernels_ = generate_kernels(options.generator, policy.length);
  const TransformOptions topts = result.transform_options();

  FitTimings t;
  if (options.classifier == ClassifierKind::ridge) {
    auto start = Clock::now();
    const FeatureMatrix features = apply_kernels(prepared.series, result.kernels_, topts);
    t.transform_seconds = seconds_since(start);
    start = Clock::now();
    result.model_ = fit_ridge(features, prepared.labels, prepared.label_vocabulary, options.alpha_grid);
    t.train_seconds = seconds_since(start);
  } else {
    // Hold out a validation set; the rest is streamed in tranches.
    std::vector<std::size_t> order(prepared.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(options.schedule.seed, 0x7a11ULL));
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t held =
        std::max<std::size_t>(1, std::min(options.schedule.validation_size, prepared.size() / 5));

    Tranche validation;
    std::vector<Series> rest;
    std::vector<int> rest_labels;
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto& series = prepared.series[order[i]];
      const int label = prepared.labels[order[i]];
      if (i < held) {
        validation.series.push_back(std::move(series));
        validation.labels.push_back(label);
      } else {
        rest.push_back(std::move(series));
        rest_labels.push_back(label);
      }
    }
    VectorTrancheSource stream(std::move(rest), std::move(rest_labels), options.tranche_size);
    const auto start = Clock::now();
    result.model_ = fit_logistic(stream, result.kernels_, options.schedule, validation, prepared.label_vocabulary, topts);
    t.train_seconds = seconds_since(start);
  }
  if (timings) *timings = t;
  return result;
}

std::vector<Series> RocketClassifier::prepare_series(std::span<const Series> series) const {
  std::vector<Series> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    Series s = interpolate_missing(series[i]);
    if (options_.normalize) s = znormalize(s);
    switch (policy_.kind) {
      case LengthPolicy::Kind::rescaled:
        if (s.size() != policy_.length) s = rescale(s, policy_.length);
        break;
      case LengthPolicy::Kind::fixed:
        if (s.size() != policy_.length)
          throw DataError("series " + std::to_string(i) + " has length " + std::to_string(s.size()) +
                          " but the model was trained on length " + std::to_string(policy_.length));
        break;
      default: break;
    }
    out.push_back(std::move(s));
  }
  return out;
}

FeatureMatrix RocketClassifier::transform(std::span<const Series> series) const {
  return apply_kernels(prepare_series(series), kernels_, transform_options());
}

std::vector<int> RocketClassifier::predict(std::span<const Series> series) const {
  return classify(transform(series));
}

std::vector<int> RocketClassifier::classify(const FeatureMatrix& features) const {
  if (const auto* ridge = std::get_if<RidgeModel>(&model_)) return predict_ridge(*ridge, features);
  return predict_logistic(std::get<LogisticModel>(model_), features);
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw DataError("prediction and label counts differ");
  if (truth.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

Evaluation evaluate(const RocketClassifier& classifier, const Dataset& test) {
  if (test.label_vocabulary != classifier.class_labels())
    throw DataError("test labels do not share the model's label vocabulary");
  Evaluation e;
  auto start = Clock::now();
  const FeatureMatrix features = classifier.transform(test.series);
  e.transform_seconds = seconds_since(start);
  start = Clock::now();
  e.predictions = classifier.classify(features);
  e.predict_seconds = seconds_since(start);
  e.accuracy = accuracy(e.predictions, test.labels);

  const std::size_t classes = classifier.class_labels().size();
  std::vector<std::size_t> hits(classes, 0), totals(classes, 0);
  for (std::size_t i = 0; i < test.labels.size(); ++i) {
    const auto c = static_cast<std::size_t>(test.labels[i]);
    ++totals[c];
    hits[c] += e.predictions[i] == test.labels[i];
  }
  e.per_class_accuracy.resize(classes);
  for (std::size_t c = 0; c < classes; ++c)
    e.per_class_accuracy[c] = totals[c] ? static_cast<double>(hits[c]) / static_cast<double>(totals[c])
                                        : std::numeric_limits<double>::quiet_NaN();
  return e;
}

}  // namespace rocket
