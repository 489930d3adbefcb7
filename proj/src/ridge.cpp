#include "rocket/ridge.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rocket/errors.hpp"

namespace rocket {

namespace {

// Householder reflector H = I - beta v v^T mapping the unit constant vector
// onto e_0. Columns 1..n-1 of H span the complement of the constant vector.
struct ConstantReflector {
  Eigen::VectorXd v;
  double beta;

  explicit ConstantReflector(Eigen::Index n) {
    v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    v(0) -= 1.0;
    beta = 2.0 / v.squaredNorm();
  }

  // H [0; p] for p with n-1 rows.
  Eigen::MatrixXd lift(const Eigen::MatrixXd& p) const {
    const Eigen::Index n = v.size();
    Eigen::MatrixXd out(n, p.cols());
    out.row(0).setZero();
    out.bottomRows(n - 1) = p;
    const Eigen::RowVectorXd vp = v.tail(n - 1).transpose() * p;
    out.noalias() -= beta * v * vp;
    return out;
  }
};

constexpr double kMinResidualLeverage = 1e-14;

}  // namespace

Standardizer Standardizer::fit(const Eigen::Ref<const RowMatrix>& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.mean = x.colwise().sum().transpose() / n;
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale(j) = sd > 0.0 && std::isfinite(sd) ? sd : 1.0;
  }
  return s;
}

RowMatrix Standardizer::apply(const Eigen::Ref<const RowMatrix>& x) const {
  if (static_cast<std::size_t>(x.cols()) != size())
    throw DataError("feature count " + std::to_string(x.cols()) + " does not match the model's " +
                    std::to_string(size()));
  RowMatrix out = x;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid(10);
  for (int i = 0; i < 10; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, -3.0 + 6.0 * i / 9.0);
  return grid;
}

Eigen::MatrixXd one_vs_rest_targets(std::span<const int> labels, std::size_t num_classes) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(labels.size()),
                                                static_cast<Eigen::Index>(num_classes), -1.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes)
      throw DataError("label index " + std::to_string(labels[i]) + " out of range");
    y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

RidgeSolver::RidgeSolver(const Eigen::Ref<const RowMatrix>& x)
    : RidgeSolver(x, x.cols() > x.rows() ? Path::gram_eigen : Path::svd) {}

RidgeSolver::RidgeSolver(const Eigen::Ref<const RowMatrix>& x, Path path) : path_(path), rows_(x.rows()) {
  if (x.rows() < 2) throw DataError("ridge regression needs at least 2 rows");
  if (!x.allFinite()) throw NumericalError("design matrix contains non-finite values");
  if (path == Path::gram_eigen)
    decompose_gram(x);
  else
    decompose_svd(x);
}

void RidgeSolver::decompose_gram(const Eigen::Ref<const RowMatrix>& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

  // H K H, restricted to the complement of the constant vector.
  const ConstantReflector h(n);
  const Eigen::VectorXd kv = gram * h.v;
  const double vkv = h.v.dot(kv);
  Eigen::MatrixXd reflected = gram;
  reflected.noalias() -= h.beta * h.v * kv.transpose();
  reflected.noalias() -= h.beta * kv * h.v.transpose();
  reflected.noalias() += (h.beta * h.beta * vkv) * h.v * h.v.transpose();
  const Eigen::MatrixXd inner = reflected.bottomRightCorner(n - 1, n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner);
  if (eig.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "Gram eigendecomposition failed (n=" << n << ", trace=" << gram.trace() << ")";
    throw NumericalError(msg.str());
  }
  eigenvalues_ = eig.eigenvalues().cwiseMax(0.0);
  basis_ = h.lift(eig.eigenvectors());
  x_ = x;
}

void RidgeSolver::decompose_svd(const Eigen::Ref<const RowMatrix>& x) {
  const Eigen::Index n = x.rows();
  const ConstantReflector h(n);
  Eigen::MatrixXd reflected = x;
  reflected.noalias() -= h.beta * h.v * (h.v.transpose() * x);
  const Eigen::MatrixXd inner = reflected.bottomRows(n - 1);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(inner, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "SVD of the " << n << "x" << x.cols() << " design failed";
    throw NumericalError(msg.str());
  }
  eigenvalues_ = svd.singularValues().array().square();
  basis_ = h.lift(svd.matrixU());
  right_ = svd.matrixV();
}

Eigen::MatrixXd RidgeSolver::loo_residuals(const Eigen::Ref<const Eigen::MatrixXd>& y, double alpha) const {
  if (y.rows() != rows_) throw DataError("target row count does not match the design");
  const Eigen::Index n = rows_;
  const Eigen::MatrixXd proj = basis_.transpose() * y;
  const bool complete = basis_.cols() == n - 1;

  Eigen::MatrixXd residual;
  Eigen::VectorXd one_minus_h(n);
  if (complete) {
    // The basis spans the whole complement, so I - 11^T/n - H is diagonal in it
    // with entries alpha / (lambda + alpha); no cancellation.
    const Eigen::VectorXd shrink = (alpha / (eigenvalues_.array() + alpha)).matrix();
    residual = basis_ * (shrink.asDiagonal() * proj);
    one_minus_h = basis_.array().square().matrix() * shrink;
  } else {
    const Eigen::VectorXd keep = (eigenvalues_.array() / (eigenvalues_.array() + alpha)).matrix();
    residual = y.rowwise() - y.colwise().mean();
    residual.noalias() -= basis_ * (keep.asDiagonal() * proj);
    one_minus_h = (Eigen::VectorXd::Constant(n, 1.0 - 1.0 / static_cast<double>(n)) -
                   basis_.array().square().matrix() * keep);
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (one_minus_h(i) <= kMinResidualLeverage)
      residual.row(i).setConstant(std::numeric_limits<double>::infinity());
    else
      residual.row(i) /= one_minus_h(i);
  }
  return residual;
}

double RidgeSolver::loo_error(const Eigen::Ref<const Eigen::MatrixXd>& y, double alpha) const {
  const Eigen::MatrixXd r = loo_residuals(y, alpha);
  if (!r.allFinite()) return std::numeric_limits<double>::infinity();
  return r.squaredNorm();
}

RidgeSolver::Solution RidgeSolver::solve(const Eigen::Ref<const Eigen::MatrixXd>& y, double alpha) const {
  if (y.rows() != rows_) throw DataError("target row count does not match the design");
  const Eigen::MatrixXd proj = basis_.transpose() * y;
  Solution s;
  if (path_ == Path::gram_eigen) {
    const Eigen::VectorXd inv = (1.0 / (eigenvalues_.array() + alpha)).matrix();
    const Eigen::MatrixXd dual = basis_ * (inv.asDiagonal() * proj);  // n x targets
    s.coefficients = (x_.transpose() * dual).transpose();
  } else {
    const Eigen::VectorXd sv = eigenvalues_.array().sqrt().matrix();
    const Eigen::VectorXd gain = (sv.array() / (eigenvalues_.array() + alpha)).matrix();
    s.coefficients = (right_ * (gain.asDiagonal() * proj)).transpose();
  }
  s.intercepts = y.colwise().mean().transpose();
  return s;
}

double RidgeSolver::condition_number() const {
  if (eigenvalues_.size() == 0) return std::numeric_limits<double>::infinity();
  const double hi = eigenvalues_.maxCoeff();
  const double lo = eigenvalues_.minCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

RidgeModel fit_ridge(const FeatureMatrix& features, std::span<const int> labels, std::vector<std::string> class_labels,
                     std::vector<double> alpha_grid) {
  const auto& x = features.values;
  if (static_cast<std::size_t>(x.rows()) != labels.size())
    throw DataError("feature rows (" + std::to_string(x.rows()) + ") and labels (" + std::to_string(labels.size()) +
                    ") differ");
  if (labels.size() < 2) throw DataError("ridge classifier needs at least 2 training examples");
  if (alpha_grid.empty()) throw ConfigError("alpha grid is empty");
  for (double a : alpha_grid)
    if (!(a > 0.0)) throw ConfigError("alpha values must be positive");
  if (std::set<int>(labels.begin(), labels.end()).size() < 2)
    throw DataError("ridge classifier needs at least 2 distinct classes in the training data");
  if (!x.allFinite()) throw NumericalError("feature matrix contains non-finite values");

  RidgeModel model;
  model.class_labels = std::move(class_labels);
  model.standardizer = Standardizer::fit(x);
  const RowMatrix xs = model.standardizer.apply(x);
  const Eigen::MatrixXd y = one_vs_rest_targets(labels, model.class_labels.size());

  const RidgeSolver solver(xs);
  model.alpha_grid = alpha_grid;
  model.loo_errors.reserve(alpha_grid.size());
  std::size_t best = alpha_grid.size();
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    model.loo_errors.push_back(solver.loo_error(y, alpha_grid[i]));
    if (std::isfinite(model.loo_errors[i]) && (best == alpha_grid.size() || model.loo_errors[i] < model.loo_errors[best]))
      best = i;
  }
  if (best == alpha_grid.size()) {
    std::ostringstream msg;
    msg << "leave-one-out error is undefined for every alpha (condition number " << solver.condition_number()
        << ")";
    throw NumericalError(msg.str());
  }

  model.chosen_alpha = alpha_grid[best];
  auto solution = solver.solve(y, model.chosen_alpha);
  model.coefficients = std::move(solution.coefficients);
  model.intercepts = std::move(solution.intercepts);
  return model;
}

Eigen::MatrixXd decision_function(const RidgeModel& model, const FeatureMatrix& features) {
  const RowMatrix xs = model.standardizer.apply(features.values);
  Eigen::MatrixXd scores = xs * model.coefficients.transpose();
  scores.rowwise() += model.intercepts.transpose();
  return scores;
}

std::vector<int> predict_ridge(const RidgeModel& model, const FeatureMatrix& features) {
  return argmax_rows(decision_function(model, features));
}

std::vector<int> argmax_rows(const Eigen::Ref<const Eigen::MatrixXd>& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c)
      if (scores(i, c) > scores(i, best)) best = c;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace rocket
