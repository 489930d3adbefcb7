#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rocket/transform.hpp"

namespace rocket {

/// Per-column standardization fitted on training features.
struct Standardizer {
  Eigen::VectorXd mean;
  /// Population standard deviation; zero-variance columns use 1.
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::Ref<const RowMatrix>& x);
  RowMatrix apply(const Eigen::Ref<const RowMatrix>& x) const;
  std::size_t size() const { return static_cast<std::size_t>(mean.size()); }
};

/// Ten log-spaced values from 1e-3 to 1e3.
std::vector<double> default_alpha_grid();

/// Targets for one-vs-rest regression: +1 for the row's class, -1 otherwise.
Eigen::MatrixXd one_vs_rest_targets(std::span<const int> labels, std::size_t num_classes);

/// Closed-form ridge regression with an unpenalized intercept over a fixed,
/// column-centred design, sharing one decomposition across all
/// regularization strengths.
///
/// With more columns than rows the n x n Gram matrix is eigendecomposed,
/// otherwise the design is factored by a thin SVD. Either way the
/// decomposition is restricted to the complement of the constant vector, so
/// the intercept direction is exact and never shrunk.
class RidgeSolver {
 public:
  enum class Path { gram_eigen, svd };

  struct Solution {
    Eigen::MatrixXd coefficients;  // targets x features
    Eigen::VectorXd intercepts;    // targets
  };

  /// `x` must have (numerically) zero column means. Throws NumericalError if
  /// the decomposition fails.
  explicit RidgeSolver(const Eigen::Ref<const RowMatrix>& x);
  RidgeSolver(const Eigen::Ref<const RowMatrix>& x, Path path);

  Path path() const { return path_; }

  /// Leave-one-out residuals y_i - yhat_{-i}(x_i) for every row and target.
  /// Rows whose leverage is numerically 1 yield +inf.
  Eigen::MatrixXd loo_residuals(const Eigen::Ref<const Eigen::MatrixXd>& y, double alpha) const;

  /// Sum of squared leave-one-out residuals over rows and targets.
  double loo_error(const Eigen::Ref<const Eigen::MatrixXd>& y, double alpha) const;

  Solution solve(const Eigen::Ref<const Eigen::MatrixXd>& y, double alpha) const;

  /// Ratio of the largest to the smallest retained squared singular value.
  double condition_number() const;

 private:
  void decompose_gram(const Eigen::Ref<const RowMatrix>& x);
  void decompose_svd(const Eigen::Ref<const RowMatrix>& x);

  Path path_;
  Eigen::Index rows_ = 0;
  // Orthonormal basis (n x r) and eigenvalues (squared singular values) of x x^T
  // restricted to the complement of the constant vector.
  Eigen::MatrixXd basis_;
  Eigen::VectorXd eigenvalues_;
  // Gram path: x itself (for coefficients). SVD path: right singular vectors.
  RowMatrix x_;
  Eigen::MatrixXd right_;
};

/// One-vs-rest ridge classifier with training-set standardization.
struct RidgeModel {
  Eigen::MatrixXd coefficients;  // classes x features, in standardized units
  Eigen::VectorXd intercepts;
  double chosen_alpha = 0.0;
  Standardizer standardizer;
  std::vector<std::string> class_labels;
  /// Aggregate leave-one-out error for each alpha in the searched grid.
  std::vector<double> alpha_grid;
  std::vector<double> loo_errors;

  std::size_t num_features() const { return standardizer.size(); }
};

/// Fits one ridge regression per class (targets +-1) and selects alpha by
/// minimum aggregate leave-one-out squared error; ties go to the earlier
/// grid entry. Requires n >= 2, at least two distinct labels and finite
/// features.
RidgeModel fit_ridge(const FeatureMatrix& features, std::span<const int> labels,
                     std::vector<std::string> class_labels, std::vector<double> alpha_grid = default_alpha_grid());

/// Raw one-vs-rest scores (rows x classes).
Eigen::MatrixXd decision_function(const RidgeModel& model, const FeatureMatrix& features);

/// Class index per row: argmax of the scores, exact ties to the lowest index.
std::vector<int> predict_ridge(const RidgeModel& model, const FeatureMatrix& features);

/// Row-wise argmax with ties to the lowest column.
std::vector<int> argmax_rows(const Eigen::Ref<const Eigen::MatrixXd>& scores);

}  // namespace rocket
