#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "rocket/data.hpp"
#include "rocket/kernel.hpp"

namespace rocket {

/// Synthetic classification data. Class c has a template
///   sin(2 pi f1 t + phi1) + 0.75 sin(2 pi f2 t + phi2),  t in [0, 1),
/// with f1, f2, phi1, phi2 drawn per class from `seed`; every series is its
/// class template plus N(0, noise^2) noise, then z-normalized. Labels cycle
/// through the classes. Requires n >= num_classes >= 2 and length >= 8.
Dataset gen_synthetic(std::size_t n, std::size_t length, std::size_t num_classes, std::uint64_t seed,
                      double noise = 0.5);

/// A second draw from the same class templates as gen_synthetic(…, seed).
Dataset gen_synthetic_test(std::size_t n, std::size_t length, std::size_t num_classes, std::uint64_t seed,
                           double noise = 0.5);

struct BenchOptions {
  std::size_t repeats = 3;
  std::size_t threads = 1;
  std::size_t num_classes = 3;
  /// Training sizes above this use the sgd classifier, otherwise ridge.
  std::size_t sgd_threshold = 20'000;
  std::size_t test_size = 1'000;
  /// Also time classifier training and report test accuracy.
  bool train = true;
  double noise = 0.5;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::size_t n_or_l = 0;
  std::size_t k = 0;
  /// Medians over the repeats. For the sgd classifier the tranche transforms
  /// happen inside training and are counted in train_s.
  double transform_s = 0.0;
  double train_s = 0.0;
  /// NaN when training is disabled.
  double accuracy = 0.0;
  std::size_t threads = 1;
};

/// One row per training-set size at fixed length and kernel count.
std::vector<BenchRow> scale_n(std::span<const std::size_t> sizes, std::size_t length, std::size_t k,
                              const BenchOptions& options = {});
/// One row per series length at fixed size and kernel count.
std::vector<BenchRow> scale_l(std::span<const std::size_t> lengths, std::size_t n, std::size_t k,
                              const BenchOptions& options = {});
/// One row per kernel count at fixed size and length (n_or_l holds n).
std::vector<BenchRow> scale_k(std::span<const std::size_t> ks, std::size_t n, std::size_t length,
                              const BenchOptions& options = {});

/// Median wall time of `repeats` transforms of `series`.
double time_transform(std::span<const Series> series, std::span<const Kernel> kernels, std::size_t threads,
                      std::size_t repeats, FeatureMode mode = FeatureMode::ppv_and_max);

double median(std::vector<double> values);

void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out);

}  // namespace rocket
