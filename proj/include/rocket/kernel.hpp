#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rocket {

enum class WeightMode { normal, uniform, integer };
enum class CenteringMode { always, never, random };
enum class BiasMode { uniform, zero, normal };
enum class DilationMode { exponential, none, uniform };
enum class PaddingMode { random, always, uniform, never };
enum class FeatureMode { ppv_and_max, ppv_only, max_only };

std::string_view to_string(WeightMode m);
std::string_view to_string(CenteringMode m);
std::string_view to_string(BiasMode m);
std::string_view to_string(DilationMode m);
std::string_view to_string(PaddingMode m);
std::string_view to_string(FeatureMode m);

// Parsers throw ConfigError on unknown names.
WeightMode parse_weight_mode(std::string_view s);
CenteringMode parse_centering_mode(std::string_view s);
BiasMode parse_bias_mode(std::string_view s);
DilationMode parse_dilation_mode(std::string_view s);
PaddingMode parse_padding_mode(std::string_view s);
FeatureMode parse_feature_mode(std::string_view s);

/// Number of feature columns each kernel contributes.
constexpr std::size_t features_per_kernel(FeatureMode m) { return m == FeatureMode::ppv_and_max ? 2 : 1; }

/// One random convolutional kernel.
struct Kernel {
  std::vector<double> weights;
  double bias = 0.0;
  int dilation = 1;
  /// Zeros conceptually added to each end of the series.
  int padding = 0;

  std::size_t length() const { return weights.size(); }
  /// Number of input positions covered by one placement, including dilation gaps.
  std::size_t span() const { return (weights.size() - 1) * static_cast<std::size_t>(dilation) + 1; }
  /// Padding that centres the middle weight on every input point.
  int centred_padding() const { return static_cast<int>((weights.size() - 1) * dilation / 2); }

  bool operator==(const Kernel&) const = default;
};

/// The kernel-generation configuration, covering every sensitivity axis.
struct GeneratorConfig {
  std::size_t num_kernels = 10'000;
  /// Candidate lengths, drawn uniformly. A single entry means a fixed length.
  std::vector<int> lengths{7, 9, 11};
  WeightMode weight_mode = WeightMode::normal;
  CenteringMode centering_mode = CenteringMode::always;
  BiasMode bias_mode = BiasMode::uniform;
  DilationMode dilation_mode = DilationMode::exponential;
  PaddingMode padding_mode = PaddingMode::random;
  FeatureMode feature_mode = FeatureMode::ppv_and_max;
  std::uint64_t seed = 0;

  /// Throws ConfigError if the configuration cannot be used.
  void validate() const;

  bool operator==(const GeneratorConfig&) const = default;
};

/// A = log2((input_length - 1) / (kernel_length - 1)); throws DomainError
/// when input_length < kernel_length or kernel_length < 2.
double dilation_bound(std::size_t input_length, std::size_t kernel_length);

/// Candidate kernel lengths usable for series of `input_length`. Lengths that
/// are not shorter than the series are dropped; if none remain, a single odd
/// length below the series length is substituted.
std::vector<int> usable_lengths(const std::vector<int>& lengths, std::size_t input_length);

/// Draws config.num_kernels kernels for series of `input_length` (>= 2).
/// Per kernel the random draws happen in the order length, weights, bias,
/// dilation, padding. The result depends only on (config, input_length).
std::vector<Kernel> generate_kernels(const GeneratorConfig& config, std::size_t input_length);

}  // namespace rocket
