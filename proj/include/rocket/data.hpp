#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rocket/kernel.hpp"
#include "rocket/transform.hpp"

namespace rocket {

/// How series of differing lengths are presented to the transform.
struct LengthPolicy {
  enum class Kind { fixed, rescaled, as_is, pending };

  Kind kind = Kind::pending;
  /// fixed/rescaled: the common length; as_is: the longest training series.
  std::size_t length = 0;

  static LengthPolicy fixed(std::size_t l) { return {Kind::fixed, l}; }
  static LengthPolicy rescaled(std::size_t l) { return {Kind::rescaled, l}; }
  static LengthPolicy as_is(std::size_t l) { return {Kind::as_is, l}; }
  static LengthPolicy pending() { return {Kind::pending, 0}; }

  bool operator==(const LengthPolicy&) const = default;
};

std::string_view to_string(LengthPolicy::Kind kind);
LengthPolicy::Kind parse_length_policy_kind(std::string_view s);

/// Labelled univariate series. Labels index into label_vocabulary.
struct Dataset {
  std::vector<Series> series;
  std::vector<int> labels;
  std::vector<std::string> label_vocabulary;
  LengthPolicy length_policy;

  std::size_t size() const { return series.size(); }
  std::size_t num_classes() const { return label_vocabulary.size(); }
  std::size_t min_length() const;
  std::size_t max_length() const;
  bool equal_length() const { return min_length() == max_length(); }
  bool has_missing() const;
};

/// Reads one UCR-format file: one series per line, the label first, values
/// separated by tabs, commas or whitespace (detected from the first line).
/// "NaN", "?" and empty fields are missing values; trailing missing values
/// mark the end of a shorter series. With `vocabulary`, labels outside it are
/// rejected; otherwise the vocabulary is built from the file and ordered
/// numerically when every label is a number, lexicographically otherwise.
/// Throws DataError with the line number on malformed rows.
Dataset read_ucr(const std::filesystem::path& path, const std::vector<std::string>* vocabulary = nullptr);

/// Reads a train/test pair; the test file shares the training vocabulary.
std::pair<Dataset, Dataset> load_ucr(const std::filesystem::path& train_path, const std::filesystem::path& test_path);

/// Writes a dataset in tab-separated UCR format with 17 significant digits.
void write_ucr(const Dataset& dataset, const std::filesystem::path& path);

/// Zero mean, unit population standard deviation; constant series map to zeros.
Series znormalize(std::span<const double> series);

/// Linear interpolation across NaN gaps; leading and trailing gaps take the
/// nearest observed value. Throws DataError when nothing is observed.
Series interpolate_missing(std::span<const double> series);

/// Linear resampling onto `length` evenly spaced points spanning the series.
Series rescale(std::span<const double> series, std::size_t length);

/// Fills missing values and, when `normalize` is set, z-normalizes every series.
void prepare(Dataset& dataset, bool normalize);

struct LengthPolicyOptions {
  std::size_t folds = 10;
  std::size_t num_kernels = 500;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  /// Kernel configuration for the cross-validation pipeline (num_kernels and
  /// seed are overridden).
  GeneratorConfig generator;
};

/// Chooses how to handle variable-length training data. Equal-length data
/// gives fixed(L). Otherwise `folds`-fold cross-validation compares
/// rescaling to the longest training length against as-is application of
/// kernels generated for that length, and the higher mean accuracy wins
/// (ties favour rescaling). Fewer than `folds` examples fall back to
/// rescaling without cross-validation.
LengthPolicy resolve_length_policy(const Dataset& train, const LengthPolicyOptions& options = {});

/// Returns a copy of `dataset` conforming to `policy`: rescaled series are
/// resampled to policy.length; fixed requires every series to have that
/// length (DataError otherwise); as_is leaves series untouched.
Dataset apply_length_policy(const Dataset& dataset, const LengthPolicy& policy);

}  // namespace rocket
