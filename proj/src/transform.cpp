#include "rocket/transform.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "rocket/errors.hpp"
#include "rocket/parallel.hpp"

namespace rocket {

namespace {

// Fills `out` (sized by feature_map_length) with the feature map. Each output
// accumulates bias first and then the weights in index order, so results are
// bit-identical to an explicit zero-padded evaluation.
void compute_feature_map(std::span<const double> x, const Kernel& kernel, int padding, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto out_len = static_cast<std::ptrdiff_t>(out.size());
  std::fill(out.begin(), out.end(), kernel.bias);
  for (std::size_t j = 0; j < kernel.weights.size(); ++j) {
    const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(j) * kernel.dilation - padding;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -offset);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(out_len, n - offset);
    const double w = kernel.weights[j];
    double* o = out.data();
    const double* in = x.data() + offset;
    for (std::ptrdiff_t i = lo; i < hi; ++i) o[i] += w * in[i];
  }
}

struct PpvMax {
  double ppv;
  double max;
};

PpvMax summarize(std::span<const double> fmap) {
  std::size_t positive = 0;
  double max = -std::numeric_limits<double>::infinity();
  for (double v : fmap) {
    positive += v > 0.0;
    max = std::max(max, v);
  }
  return {static_cast<double>(positive) / static_cast<double>(fmap.size()), max};
}

}  // namespace

std::size_t feature_map_length(std::size_t series_length, const Kernel& kernel, int padding) {
  const std::size_t padded = series_length + 2 * static_cast<std::size_t>(padding);
  const std::size_t span = kernel.span();
  return span > padded ? 0 : padded - span + 1;
}

std::vector<double> convolve(std::span<const double> series, const Kernel& kernel) {
  const std::size_t len = feature_map_length(series.size(), kernel, kernel.padding);
  if (len == 0)
    throw DataError("kernel span " + std::to_string(kernel.span()) + " exceeds padded series length " +
                    std::to_string(series.size() + 2 * static_cast<std::size_t>(kernel.padding)));
  std::vector<double> out(len);
  compute_feature_map(series, kernel, kernel.padding, out);
  return out;
}

double ppv(std::span<const double> feature_map) {
  if (feature_map.empty()) throw DomainError("ppv of an empty feature map");
  return summarize(feature_map).ppv;
}

double fmap_max(std::span<const double> feature_map) {
  if (feature_map.empty()) throw DomainError("max of an empty feature map");
  return *std::max_element(feature_map.begin(), feature_map.end());
}

FeatureMatrix apply_kernels(std::span<const Series> series, std::span<const Kernel> kernels,
                            const TransformOptions& options) {
  const std::size_t per_kernel = features_per_kernel(options.mode);
  FeatureMatrix result;
  result.mode = options.mode;
  result.values.resize(static_cast<Eigen::Index>(series.size()), static_cast<Eigen::Index>(kernels.size() * per_kernel));

  parallel_for(series.size(), options.threads, [&](std::size_t row) {
    const Series& x = series[row];
    std::vector<double> scratch;
    double* out = result.values.row(static_cast<Eigen::Index>(row)).data();
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      const Kernel& kernel = kernels[k];
      int padding = kernel.padding;
      std::size_t len = feature_map_length(x.size(), kernel, padding);
      if (len == 0 && options.short_series == ShortSeriesPolicy::fallback) {
        padding = std::max(padding, kernel.centred_padding());
        len = feature_map_length(x.size(), kernel, padding);
      }

      PpvMax f{0.0, 0.0};
      if (len == 0) {
        if (options.short_series == ShortSeriesPolicy::error)
          throw IncompatibleKernelError(row, k,
                                        "series " + std::to_string(row) + " (length " + std::to_string(x.size()) +
                                            ") is too short for kernel " + std::to_string(k) + " (span " +
                                            std::to_string(kernel.span()) + ", padding " +
                                            std::to_string(kernel.padding) + ")");
      } else {
        scratch.resize(len);
        compute_feature_map(x, kernel, padding, scratch);
        f = summarize(scratch);
      }

      switch (options.mode) {
        case FeatureMode::ppv_and_max:
          out[2 * k] = f.ppv;
          out[2 * k + 1] = f.max;
          break;
        case FeatureMode::ppv_only: out[k] = f.ppv; break;
        case FeatureMode::max_only: out[k] = f.max; break;
      }
    }
  });
  return result;
}

}  // namespace rocket
