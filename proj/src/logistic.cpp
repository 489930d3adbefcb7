#include "rocket/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "rocket/errors.hpp"
#include "rocket/random.hpp"

namespace rocket {

void AdamOptimizer::reset(Eigen::Index size) {
  m = Eigen::VectorXd::Zero(size);
  v = Eigen::VectorXd::Zero(size);
  step_count = 0;
}

void AdamOptimizer::step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad, double lr) {
  if (m.size() != params.size()) reset(params.size());
  ++step_count;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
  params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon);
}

void TrainSchedule::validate() const {
  if (minibatch_size == 0) throw ConfigError("minibatch_size must be positive");
  if (initial_lr && !(*initial_lr > 0.0)) throw ConfigError("initial_lr must be positive");
  if (!initial_lr && lr_candidates.empty()) throw ConfigError("no learning-rate candidates to search");
  for (double lr : lr_candidates)
    if (!(lr > 0.0)) throw ConfigError("learning-rate candidates must be positive");
  if (lr_search_updates == 0) throw ConfigError("lr_search_updates must be positive");
  if (patience_train_updates == 0) throw ConfigError("patience_train_updates must be positive");
  if (max_epochs == 0 || max_epochs < min_epochs) throw ConfigError("max_epochs must be >= max(1, min_epochs)");
}

Eigen::MatrixXd softmax(const Eigen::Ref<const Eigen::MatrixXd>& logits) {
  Eigen::MatrixXd p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

namespace {

Eigen::MatrixXd logits_of(const Eigen::Ref<const RowMatrix>& x, const Eigen::Ref<const Eigen::MatrixXd>& weights,
                          const Eigen::Ref<const Eigen::VectorXd>& biases) {
  Eigen::MatrixXd z = x * weights.transpose();
  z.rowwise() += biases.transpose();
  return z;
}

// Mean cross-entropy from logits via log-sum-exp.
double mean_cross_entropy(const Eigen::MatrixXd& z, std::span<const int> labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double zmax = z.row(i).maxCoeff();
    const double lse = zmax + std::log((z.row(i).array() - zmax).exp().sum());
    total += lse - z(i, labels[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(z.rows());
}

// Parameters packed as [vec(weights) (column-major), biases].
struct PackedParams {
  Eigen::VectorXd theta;
  Eigen::Index classes;
  Eigen::Index features;

  PackedParams(Eigen::Index c, Eigen::Index f) : theta(Eigen::VectorXd::Zero(c * f + c)), classes(c), features(f) {}

  Eigen::Map<const Eigen::MatrixXd> weights() const { return {theta.data(), classes, features}; }
  Eigen::Map<const Eigen::VectorXd> biases() const { return {theta.data() + classes * features, classes}; }

  Eigen::VectorXd pack(const LossGradient& g) const {
    Eigen::VectorXd out(theta.size());
    Eigen::Map<Eigen::MatrixXd>(out.data(), classes, features) = g.grad_weights;
    out.tail(classes) = g.grad_biases;
    return out;
  }
};

struct Batch {
  RowMatrix x;
  std::vector<int> labels;
};

Batch gather(const RowMatrix& x, std::span<const int> labels, std::span<const std::size_t> rows) {
  Batch b;
  b.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  b.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    b.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    b.labels[i] = labels[rows[i]];
  }
  return b;
}

void check_labels(std::span<const int> labels, std::size_t classes) {
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= classes)
      throw DataError("label index " + std::to_string(y) + " out of range for " + std::to_string(classes) +
                      " classes");
}

// Whether lr keeps the training loss on the first tranche below the loss of
// the all-zero model after `updates` Adam steps.
bool converges(const RowMatrix& x, std::span<const int> labels, Eigen::Index classes, double lr,
               const TrainSchedule& schedule) {
  PackedParams params(classes, x.cols());
  AdamOptimizer adam;
  adam.reset(params.theta.size());
  Rng rng(derive_seed(schedule.seed, 0x1a5eedULL));
  std::vector<std::size_t> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), 0);

  const double baseline = std::log(static_cast<double>(classes));
  const std::size_t tail = std::min<std::size_t>(10, schedule.lr_search_updates);
  double tail_loss = 0.0;
  std::size_t pos = order.size();
  for (std::size_t u = 0; u < schedule.lr_search_updates; ++u) {
    if (pos >= order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      pos = 0;
    }
    const std::size_t count = std::min(schedule.minibatch_size, order.size() - pos);
    const Batch b = gather(x, labels, std::span(order).subspan(pos, count));
    pos += count;
    const LossGradient g = softmax_cross_entropy(b.x, b.labels, params.weights(), params.biases());
    if (!std::isfinite(g.loss) || !g.grad_weights.allFinite()) return false;
    if (u + tail >= schedule.lr_search_updates) tail_loss += g.loss;
    adam.step(params.theta, params.pack(g), lr);
  }
  return tail_loss / static_cast<double>(tail) < baseline;
}

}  // namespace

LossGradient softmax_cross_entropy(const Eigen::Ref<const RowMatrix>& x, std::span<const int> labels,
                                   const Eigen::Ref<const Eigen::MatrixXd>& weights,
                                   const Eigen::Ref<const Eigen::VectorXd>& biases) {
  if (static_cast<std::size_t>(x.rows()) != labels.size() || x.rows() == 0)
    throw DataError("batch rows and labels differ or batch is empty");
  if (weights.cols() != x.cols() || weights.rows() != biases.size())
    throw DataError("parameter shape does not match the batch");
  check_labels(labels, static_cast<std::size_t>(weights.rows()));

  const Eigen::MatrixXd z = logits_of(x, weights, biases);
  LossGradient out;
  out.loss = mean_cross_entropy(z, labels);

  Eigen::MatrixXd dz = softmax(z);
  for (std::size_t i = 0; i < labels.size(); ++i) dz(static_cast<Eigen::Index>(i), labels[i]) -= 1.0;
  dz /= static_cast<double>(x.rows());
  out.grad_weights = dz.transpose() * x;
  out.grad_biases = dz.colwise().sum().transpose();
  return out;
}

VectorTrancheSource::VectorTrancheSource(std::vector<Series> series, std::vector<int> labels, std::size_t tranche_size)
    : series_(std::move(series)), labels_(std::move(labels)), tranche_size_(tranche_size) {
  if (series_.size() != labels_.size()) throw DataError("series and labels differ in count");
  if (tranche_size_ == 0) throw ConfigError("tranche size must be positive");
}

std::optional<Tranche> VectorTrancheSource::next() {
  if (position_ >= series_.size()) return std::nullopt;
  const std::size_t end = std::min(series_.size(), position_ + tranche_size_);
  Tranche t;
  t.series.assign(series_.begin() + static_cast<std::ptrdiff_t>(position_),
                  series_.begin() + static_cast<std::ptrdiff_t>(end));
  t.labels.assign(labels_.begin() + static_cast<std::ptrdiff_t>(position_),
                  labels_.begin() + static_cast<std::ptrdiff_t>(end));
  position_ = end;
  return t;
}

LogisticModel fit_logistic(TrancheSource& stream, std::span<const Kernel> kernels, const TrainSchedule& schedule,
                           const Tranche& validation, std::vector<std::string> class_labels,
                           const TransformOptions& transform) {
  schedule.validate();
  const auto classes = static_cast<Eigen::Index>(class_labels.size());
  if (classes < 2) throw DataError("logistic regression needs at least 2 classes");
  if (validation.series.empty()) throw DataError("validation set is empty");
  check_labels(validation.labels, class_labels.size());

  LogisticModel model;
  model.class_labels = std::move(class_labels);

  stream.reset();
  std::optional<Tranche> first = stream.next();
  if (!first || first->series.empty()) throw DataError("training stream is empty");
  check_labels(first->labels, model.class_labels.size());

  FeatureMatrix first_features = apply_kernels(first->series, kernels, transform);
  model.standardizer = Standardizer::fit(first_features.values);
  const RowMatrix val_x = model.standardizer.apply(apply_kernels(validation.series, kernels, transform).values);
  model.peak_feature_rows = std::max<std::size_t>(first->series.size(), validation.series.size());

  RowMatrix tranche_x = model.standardizer.apply(first_features.values);
  first_features = {};
  std::vector<int> tranche_labels = first->labels;

  double lr = 0.0;
  if (schedule.initial_lr) {
    lr = *schedule.initial_lr;
  } else {
    std::vector<double> candidates = schedule.lr_candidates;
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    for (double c : candidates) {
      if (converges(tranche_x, tranche_labels, classes, c, schedule)) {
        lr = c;
        break;
      }
    }
    if (lr == 0.0)
      throw NumericalError("training loss diverged for every initial learning rate searched; supply a smaller "
                           "initial learning rate");
  }

  const Eigen::Index features = tranche_x.cols();
  PackedParams params(classes, features);
  Eigen::VectorXd best_theta = params.theta;
  model.optimizer.reset(params.theta.size());

  ScheduleState& state = model.schedule;
  state.learning_rate = lr;
  state.best_validation_loss = std::numeric_limits<double>::infinity();
  state.best_training_loss = std::numeric_limits<double>::infinity();

  Rng rng(derive_seed(schedule.seed, 0x5eed5ULL));
  const std::size_t val_patience = std::max<std::size_t>(1, schedule.patience_val_updates);
  bool stop = false;
  bool have_tranche = true;

  for (std::size_t epoch = 0; epoch < schedule.max_epochs && !stop; ++epoch) {
    if (epoch > 0) {
      stream.reset();
      have_tranche = false;
    }
    while (!stop) {
      if (!have_tranche) {
        std::optional<Tranche> t = stream.next();
        if (!t) break;
        if (t->series.empty()) continue;
        check_labels(t->labels, model.class_labels.size());
        tranche_x = model.standardizer.apply(apply_kernels(t->series, kernels, transform).values);
        tranche_labels = std::move(t->labels);
        model.peak_feature_rows = std::max<std::size_t>(model.peak_feature_rows, tranche_labels.size());
      }
      have_tranche = false;

      std::vector<std::size_t> order(tranche_labels.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);

      for (std::size_t pos = 0; pos < order.size() && !stop; pos += schedule.minibatch_size) {
        const std::size_t count = std::min(schedule.minibatch_size, order.size() - pos);
        const Batch b = gather(tranche_x, tranche_labels, std::span(order).subspan(pos, count));
        const LossGradient g = softmax_cross_entropy(b.x, b.labels, params.weights(), params.biases());
        if (!std::isfinite(g.loss))
          throw NumericalError("training loss became non-finite at update " + std::to_string(state.updates) +
                               " (learning rate " + std::to_string(state.learning_rate) +
                               "); use a smaller initial learning rate");
        model.optimizer.step(params.theta, params.pack(g), state.learning_rate);
        ++state.updates;

        if (g.loss < state.best_training_loss) {
          state.best_training_loss = g.loss;
          state.updates_since_train_improvement = 0;
        } else if (++state.updates_since_train_improvement >= schedule.patience_train_updates) {
          state.learning_rate /= 2.0;
          ++state.lr_halvings;
          state.updates_since_train_improvement = 0;
        }

        const double val_loss =
            mean_cross_entropy(logits_of(val_x, params.weights(), params.biases()), validation.labels);
        if (!std::isfinite(val_loss))
          throw NumericalError("validation loss became non-finite; use a smaller initial learning rate");
        model.validation_history.push_back(val_loss);
        if (val_loss < state.best_validation_loss) {
          state.best_validation_loss = val_loss;
          state.updates_since_val_improvement = 0;
          best_theta = params.theta;
        } else {
          ++state.updates_since_val_improvement;
        }

        if (epoch >= schedule.min_epochs && state.updates_since_val_improvement >= val_patience) {
          stop = true;
          state.stopped_early = true;
        }
      }
    }
    state.epochs = epoch + 1;
  }

  params.theta = best_theta;
  model.weights = params.weights();
  model.biases = params.biases();
  return model;
}

Eigen::MatrixXd predict_proba(const LogisticModel& model, const FeatureMatrix& features) {
  const RowMatrix x = model.standardizer.apply(features.values);
  return softmax(logits_of(x, model.weights, model.biases));
}

std::vector<int> predict_logistic(const LogisticModel& model, const FeatureMatrix& features) {
  // Argmax of the logits equals argmax of the probabilities, without rounding ties.
  const RowMatrix x = model.standardizer.apply(features.values);
  return argmax_rows(logits_of(x, model.weights, model.biases));
}

}  // namespace rocket
