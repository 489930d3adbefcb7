#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rocket/kernel.hpp"
#include "rocket/ridge.hpp"
#include "rocket/transform.hpp"

namespace rocket {

/// Adam with bias-corrected moment estimates.
struct AdamOptimizer {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step_count = 0;

  void reset(Eigen::Index size);
  /// params -= lr * mhat / (sqrt(vhat) + epsilon)
  void step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad, double lr);
};

struct TrainSchedule {
  std::size_t minibatch_size = 256;
  /// Unset: pick the largest of lr_candidates that does not diverge on the
  /// first tranche within lr_search_updates updates.
  std::optional<double> initial_lr;
  std::vector<double> lr_candidates{1e-2, 1e-3, 1e-4};
  std::size_t lr_search_updates = 50;
  std::size_t patience_val_updates = 20;
  std::size_t patience_train_updates = 100;
  std::size_t min_epochs = 1;
  std::size_t max_epochs = 100;
  std::size_t validation_size = 2048;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Early-stopping and learning-rate bookkeeping.
struct ScheduleState {
  double best_validation_loss = 0.0;
  std::size_t updates_since_val_improvement = 0;
  double best_training_loss = 0.0;
  std::size_t updates_since_train_improvement = 0;
  double learning_rate = 0.0;
  std::size_t updates = 0;
  std::size_t epochs = 0;
  std::size_t lr_halvings = 0;
  bool stopped_early = false;
};

/// Multinomial logistic regression over standardized features.
struct LogisticModel {
  Eigen::MatrixXd weights;  // classes x features
  Eigen::VectorXd biases;
  Standardizer standardizer;
  std::vector<std::string> class_labels;
  AdamOptimizer optimizer;
  ScheduleState schedule;
  /// Largest number of transformed rows held at once (tranche or validation set).
  std::size_t peak_feature_rows = 0;
  std::vector<double> validation_history;

  std::size_t num_features() const { return static_cast<std::size_t>(weights.cols()); }
};

struct LossGradient {
  double loss = 0.0;
  Eigen::MatrixXd grad_weights;
  Eigen::VectorXd grad_biases;
};

/// Row-wise softmax of logits.
Eigen::MatrixXd softmax(const Eigen::Ref<const Eigen::MatrixXd>& logits);

/// Mean softmax cross-entropy over the rows of x and its gradient with
/// respect to (weights, biases).
LossGradient softmax_cross_entropy(const Eigen::Ref<const RowMatrix>& x, std::span<const int> labels,
                                   const Eigen::Ref<const Eigen::MatrixXd>& weights,
                                   const Eigen::Ref<const Eigen::VectorXd>& biases);

/// A chunk of raw training series.
struct Tranche {
  std::vector<Series> series;
  std::vector<int> labels;
};

/// Restartable sequence of tranches; one full pass is one epoch.
class TrancheSource {
 public:
  virtual ~TrancheSource() = default;
  virtual void reset() = 0;
  virtual std::optional<Tranche> next() = 0;
};

/// Serves an in-memory dataset in fixed-size tranches.
class VectorTrancheSource : public TrancheSource {
 public:
  VectorTrancheSource(std::vector<Series> series, std::vector<int> labels, std::size_t tranche_size);
  void reset() override { position_ = 0; }
  std::optional<Tranche> next() override;

 private:
  std::vector<Series> series_;
  std::vector<int> labels_;
  std::size_t tranche_size_;
  std::size_t position_ = 0;
};

/// Trains softmax regression with minibatch Adam. Each tranche is
/// transformed with `kernels` and split into shuffled minibatches.
/// Standardization statistics come from the first tranche and stay frozen.
/// Validation loss is evaluated after every update; after min_epochs,
/// training stops once it has not improved for max(1, patience_val_updates)
/// consecutive updates, and the parameters with the best validation loss are
/// kept. The learning rate halves whenever the minibatch training loss has
/// not improved for patience_train_updates updates.
/// Throws NumericalError when the loss becomes non-finite.
LogisticModel fit_logistic(TrancheSource& stream, std::span<const Kernel> kernels, const TrainSchedule& schedule,
                           const Tranche& validation, std::vector<std::string> class_labels,
                           const TransformOptions& transform = {});

/// Softmax class probabilities (rows x classes).
Eigen::MatrixXd predict_proba(const LogisticModel& model, const FeatureMatrix& features);

/// Argmax of the class probabilities, ties to the lowest class index.
std::vector<int> predict_logistic(const LogisticModel& model, const FeatureMatrix& features);

}  // namespace rocket
