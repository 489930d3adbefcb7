#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rocket/kernel.hpp"

namespace rocket {

using Series = std::vector<double>;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n x f transformed features. For ppv_and_max, column 2j holds the ppv of
/// kernel j and column 2j+1 its max; otherwise column j holds the single
/// feature of kernel j.
struct FeatureMatrix {
  RowMatrix values;
  FeatureMode mode = FeatureMode::ppv_and_max;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

/// How apply_kernels treats a kernel whose span does not fit a series.
enum class ShortSeriesPolicy {
  /// Throw IncompatibleKernelError.
  error,
  /// Retry with centred padding; if that still does not fit, emit ppv = 0, max = 0.
  fallback,
};

struct TransformOptions {
  FeatureMode mode = FeatureMode::ppv_and_max;
  /// Worker threads over series (0 = global cap).
  std::size_t threads = 0;
  ShortSeriesPolicy short_series = ShortSeriesPolicy::error;
};

/// Length of the feature map of a kernel with padding `padding` over a
/// series of `series_length`, or 0 when the span does not fit.
std::size_t feature_map_length(std::size_t series_length, const Kernel& kernel, int padding);

/// Dilated sliding dot product plus bias, stride 1, zero padding applied
/// virtually. Throws DataError when the kernel span exceeds the padded series.
std::vector<double> convolve(std::span<const double> series, const Kernel& kernel);

/// Proportion of strictly positive values. Throws DomainError on empty input.
double ppv(std::span<const double> feature_map);

/// Largest value. Throws DomainError on empty input.
double fmap_max(std::span<const double> feature_map);

/// Transforms every series with every kernel. Rows are independent and may
/// be computed in parallel; the output does not depend on the thread count.
FeatureMatrix apply_kernels(std::span<const Series> series, std::span<const Kernel> kernels,
                            const TransformOptions& options = {});

}  // namespace rocket
