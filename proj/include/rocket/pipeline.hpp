#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rocket/data.hpp"
#include "rocket/kernel.hpp"
#include "rocket/logistic.hpp"
#include "rocket/ridge.hpp"
#include "rocket/transform.hpp"

namespace rocket {

enum class ClassifierKind { ridge, sgd };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view s);

struct PipelineOptions {
  GeneratorConfig generator;
  ClassifierKind classifier = ClassifierKind::ridge;
  /// Z-normalize each series (after filling missing values).
  bool normalize = true;
  std::vector<double> alpha_grid = default_alpha_grid();
  TrainSchedule schedule;
  /// Rows per tranche for the sgd classifier.
  std::size_t tranche_size = 4096;
  LengthPolicyOptions length_policy;
  std::size_t threads = 0;
};

struct FitTimings {
  double transform_seconds = 0.0;
  double train_seconds = 0.0;
};

/// Random-kernel transform followed by a linear classifier.
class RocketClassifier {
 public:
  using Model = std::variant<RidgeModel, LogisticModel>;

  RocketClassifier() = default;
  RocketClassifier(PipelineOptions options, std::vector<Kernel> kernels, LengthPolicy policy, Model model);

  /// Prepares `train` (missing values, normalization), resolves its length
  /// policy, generates kernels for the resulting length, transforms, and fits
  /// the configured classifier. With the sgd classifier, up to
  /// schedule.validation_size examples (at most a fifth of the data) are held
  /// out for validation.
  static RocketClassifier fit(const Dataset& train, const PipelineOptions& options, FitTimings* timings = nullptr);

  /// Applies the stored preparation and length policy to raw series.
  std::vector<Series> prepare_series(std::span<const Series> series) const;
  FeatureMatrix transform(std::span<const Series> series) const;
  std::vector<int> predict(std::span<const Series> series) const;
  /// Classifies already-transformed features.
  std::vector<int> classify(const FeatureMatrix& features) const;
  std::vector<int> predict(const Dataset& dataset) const { return predict(dataset.series); }

  const PipelineOptions& options() const { return options_; }
  const std::vector<Kernel>& kernels() const { return kernels_; }
  const LengthPolicy& length_policy() const { return policy_; }
  const Model& model() const { return model_; }
  const std::vector<std::string>& class_labels() const;
  std::size_t threads() const { return options_.threads; }
  void set_threads(std::size_t threads) { options_.threads = threads; }

 private:
  TransformOptions transform_options() const;

  PipelineOptions options_;
  std::vector<Kernel> kernels_;
  LengthPolicy policy_;
  Model model_;
};

/// Fraction of matching entries.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

struct Evaluation {
  double accuracy = 0.0;
  /// Per class index: accuracy over test rows of that class (NaN if absent).
  std::vector<double> per_class_accuracy;
  std::vector<int> predictions;
  double transform_seconds = 0.0;
  double predict_seconds = 0.0;
};

Evaluation evaluate(const RocketClassifier& classifier, const Dataset& test);

}  // namespace rocket
