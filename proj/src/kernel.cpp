#include "rocket/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "rocket/errors.hpp"
#include "rocket/random.hpp"

namespace rocket {

namespace {

template <typename Enum, std::size_t N>
using NameTable = std::array<std::pair<Enum, std::string_view>, N>;

constexpr NameTable<WeightMode, 3> kWeightNames{{
    {WeightMode::normal, "normal"}, {WeightMode::uniform, "uniform"}, {WeightMode::integer, "integer"}}};
constexpr NameTable<CenteringMode, 3> kCenteringNames{{
    {CenteringMode::always, "always"}, {CenteringMode::never, "never"}, {CenteringMode::random, "random"}}};
constexpr NameTable<BiasMode, 3> kBiasNames{{
    {BiasMode::uniform, "uniform"}, {BiasMode::zero, "zero"}, {BiasMode::normal, "normal"}}};
constexpr NameTable<DilationMode, 3> kDilationNames{{
    {DilationMode::exponential, "exponential"}, {DilationMode::none, "none"}, {DilationMode::uniform, "uniform"}}};
constexpr NameTable<PaddingMode, 4> kPaddingNames{{{PaddingMode::random, "random"},
                                                   {PaddingMode::always, "always"},
                                                   {PaddingMode::uniform, "uniform"},
                                                   {PaddingMode::never, "never"}}};
constexpr NameTable<FeatureMode, 3> kFeatureNames{{
    {FeatureMode::ppv_and_max, "ppv_and_max"}, {FeatureMode::ppv_only, "ppv_only"}, {FeatureMode::max_only, "max_only"}}};

template <typename Enum, std::size_t N>
std::string_view name_of(const NameTable<Enum, N>& table, Enum value) {
  for (const auto& [e, name] : table)
    if (e == value) return name;
  return "?";
}

template <typename Enum, std::size_t N>
Enum parse(const NameTable<Enum, N>& table, std::string_view s, std::string_view what) {
  for (const auto& [e, name] : table)
    if (name == s) return e;
  std::string expected;
  for (const auto& [e, name] : table) expected += (expected.empty() ? "" : ", ") + std::string(name);
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(s) + "' (expected one of: " + expected + ")");
}

}  // namespace

std::string_view to_string(WeightMode m) { return name_of(kWeightNames, m); }
std::string_view to_string(CenteringMode m) { return name_of(kCenteringNames, m); }
std::string_view to_string(BiasMode m) { return name_of(kBiasNames, m); }
std::string_view to_string(DilationMode m) { return name_of(kDilationNames, m); }
std::string_view to_string(PaddingMode m) { return name_of(kPaddingNames, m); }
std::string_view to_string(FeatureMode m) { return name_of(kFeatureNames, m); }

WeightMode parse_weight_mode(std::string_view s) { return parse(kWeightNames, s, "weight mode"); }
CenteringMode parse_centering_mode(std::string_view s) { return parse(kCenteringNames, s, "centering mode"); }
BiasMode parse_bias_mode(std::string_view s) { return parse(kBiasNames, s, "bias mode"); }
DilationMode parse_dilation_mode(std::string_view s) { return parse(kDilationNames, s, "dilation mode"); }
PaddingMode parse_padding_mode(std::string_view s) { return parse(kPaddingNames, s, "padding mode"); }
FeatureMode parse_feature_mode(std::string_view s) {
  // Short aliases used by the variant catalog.
  if (s == "both") return FeatureMode::ppv_and_max;
  if (s == "ppv") return FeatureMode::ppv_only;
  if (s == "max") return FeatureMode::max_only;
  return parse(kFeatureNames, s, "feature mode");
}

void GeneratorConfig::validate() const {
  if (num_kernels == 0) throw ConfigError("num_kernels must be at least 1");
  if (lengths.empty()) throw ConfigError("kernel length set is empty");
  for (int len : lengths)
    if (len < 2) throw ConfigError("kernel lengths must be at least 2, got " + std::to_string(len));
}

double dilation_bound(std::size_t input_length, std::size_t kernel_length) {
  if (kernel_length < 2) throw DomainError("kernel length must be at least 2");
  if (input_length < kernel_length)
    throw DomainError("input length " + std::to_string(input_length) + " is shorter than kernel length " +
                      std::to_string(kernel_length));
  return std::log2(static_cast<double>(input_length - 1) / static_cast<double>(kernel_length - 1));
}

std::vector<int> usable_lengths(const std::vector<int>& lengths, std::size_t input_length) {
  std::vector<int> usable;
  for (int len : lengths)
    if (static_cast<std::size_t>(len) < input_length) usable.push_back(len);
  if (!usable.empty()) return usable;

  // Largest odd length below the series; very short series use their own length.
  int len = static_cast<int>(input_length) - 1;
  if (len % 2 == 0) --len;
  if (len < 3) len = std::min<int>(3, static_cast<int>(input_length));
  return {len};
}

std::vector<Kernel> generate_kernels(const GeneratorConfig& config, std::size_t input_length) {
  config.validate();
  if (input_length < 2) throw DomainError("input length must be at least 2");

  const std::vector<int> lengths = usable_lengths(config.lengths, input_length);
  Rng rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick_length(0, lengths.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> symmetric(-1.0, 1.0);
  std::uniform_int_distribution<int> ternary(-1, 1);
  std::bernoulli_distribution coin(0.5);

  std::vector<Kernel> kernels(config.num_kernels);
  for (Kernel& kernel : kernels) {
    // length
    const int length = lengths.size() == 1 ? lengths.front() : lengths[pick_length(rng)];

    // weights
    kernel.weights.resize(static_cast<std::size_t>(length));
    for (double& w : kernel.weights) {
      switch (config.weight_mode) {
        case WeightMode::normal: w = normal(rng); break;
        case WeightMode::uniform: w = symmetric(rng); break;
        case WeightMode::integer: w = ternary(rng); break;
      }
    }
    bool centre = config.centering_mode == CenteringMode::always;
    if (config.centering_mode == CenteringMode::random) centre = coin(rng);
    if (centre) {
      const double mean = std::accumulate(kernel.weights.begin(), kernel.weights.end(), 0.0) / length;
      for (double& w : kernel.weights) w -= mean;
    }

    // bias
    switch (config.bias_mode) {
      case BiasMode::uniform: kernel.bias = symmetric(rng); break;
      case BiasMode::zero: kernel.bias = 0.0; break;
      case BiasMode::normal: kernel.bias = normal(rng); break;
    }

    // dilation
    const double ratio = static_cast<double>(input_length - 1) / static_cast<double>(length - 1);
    switch (config.dilation_mode) {
      case DilationMode::exponential: {
        const double bound = dilation_bound(input_length, static_cast<std::size_t>(length));
        const double x = bound > 0.0 ? std::uniform_real_distribution<double>(0.0, bound)(rng) : 0.0;
        kernel.dilation = static_cast<int>(std::floor(std::exp2(x)));
        break;
      }
      case DilationMode::none: kernel.dilation = 1; break;
      case DilationMode::uniform: {
        const double x = ratio > 1.0 ? std::uniform_real_distribution<double>(1.0, ratio)(rng) : 1.0;
        kernel.dilation = static_cast<int>(std::floor(x));
        break;
      }
    }
    // Guards against rounding at the top of the range.
    const int max_dilation = std::max(1, static_cast<int>(std::floor(ratio)));
    kernel.dilation = std::clamp(kernel.dilation, 1, max_dilation);

    // padding
    const int full = kernel.centred_padding();
    switch (config.padding_mode) {
      case PaddingMode::random: kernel.padding = coin(rng) ? full : 0; break;
      case PaddingMode::always: kernel.padding = full; break;
      case PaddingMode::uniform: kernel.padding = std::uniform_int_distribution<int>(0, full)(rng); break;
      case PaddingMode::never: kernel.padding = 0; break;
    }
  }
  return kernels;
}

}  // namespace rocket
