#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "rocket/errors.hpp"
#include "rocket/kernel.hpp"

using namespace rocket;

namespace {

GeneratorConfig config_with(std::size_t k, std::uint64_t seed) {
  GeneratorConfig c;
  c.num_kernels = k;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("dilation bound") {
  CHECK(dilation_bound(100, 7) == doctest::Approx(std::log2(99.0 / 6.0)));
  CHECK(dilation_bound(100, 7) == doctest::Approx(4.044).epsilon(1e-3));
  CHECK(dilation_bound(7, 7) == 0.0);
  CHECK(dilation_bound(287, 9) == doctest::Approx(5.160).epsilon(1e-3));
  CHECK_THROWS_AS(dilation_bound(6, 7), DomainError);
  CHECK_THROWS_AS(dilation_bound(10, 1), DomainError);
}

TEST_CASE("single default kernel for length 100") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto kernels = generate_kernels(config_with(1, seed), 100);
    REQUIRE(kernels.size() == 1);
    const Kernel& k = kernels[0];
    CHECK((k.length() == 7 || k.length() == 9 || k.length() == 11));
    // 2^A with A = log2(99/(l-1)) bounds the dilation
    CHECK(k.dilation >= 1);
    CHECK(k.dilation <= static_cast<int>(std::floor(99.0 / static_cast<double>(k.length() - 1))));
    if (k.length() == 7) CHECK(k.dilation <= 16);
  }
}

TEST_CASE("default invariants over many kernels") {
  const std::size_t input = 500;
  const auto kernels = generate_kernels(config_with(100'000, 42), input);
  REQUIRE(kernels.size() == 100'000);
  std::map<std::size_t, std::size_t> lengths;
  std::size_t padded = 0;
  for (const Kernel& k : kernels) {
    ++lengths[k.length()];
    CHECK_LE(k.span(), input);
    CHECK(k.dilation >= 1);
    const double sum = std::accumulate(k.weights.begin(), k.weights.end(), 0.0);
    CHECK(std::abs(sum) <= 1e-9 * static_cast<double>(k.length()));
    CHECK(std::abs(sum / static_cast<double>(k.length())) <= 1e-9);
    CHECK(k.bias >= -1.0);
    CHECK(k.bias < 1.0);
    const bool ok_padding = k.padding == 0 || k.padding == static_cast<int>((k.length() - 1) * k.dilation / 2);
    CHECK(ok_padding);
    padded += k.padding > 0;
  }
  REQUIRE(lengths.size() == 3);
  for (const auto& [len, count] : lengths) {
    CHECK((len == 7 || len == 9 || len == 11));
    const double freq = static_cast<double>(count) / 100'000.0;
    CHECK(freq >= 0.32);
    CHECK(freq <= 0.35);
  }
  const double rate = static_cast<double>(padded) / 100'000.0;
  CHECK(rate >= 0.48);
  CHECK(rate <= 0.52);
}

TEST_CASE("exponential dilation follows floor(2^U(0,A))") {
  // P(d >= 2^j) = 1 - j / A for the exponential scale; check the median.
  GeneratorConfig c = config_with(50'000, 3);
  c.lengths = {9};
  const auto kernels = generate_kernels(c, 1025);  // A = log2(1024 / 8) = 7
  std::size_t at_least_8 = 0;
  for (const Kernel& k : kernels) at_least_8 += k.dilation >= 8;
  const double p = static_cast<double>(at_least_8) / 50'000.0;
  CHECK(p == doctest::Approx(1.0 - 3.0 / 7.0).epsilon(0.03));
}

TEST_CASE("determinism and seed sensitivity") {
  const auto a = generate_kernels(config_with(10'000, 5), 300);
  const auto b = generate_kernels(config_with(10'000, 5), 300);
  CHECK(a == b);
  const auto c = generate_kernels(config_with(10'000, 6), 300);
  CHECK(a != c);
}

TEST_CASE("variant axes") {
  SUBCASE("integer weights, no centering") {
    GeneratorConfig c = config_with(2000, 1);
    c.weight_mode = WeightMode::integer;
    c.centering_mode = CenteringMode::never;
    std::map<double, int> seen;
    for (const Kernel& k : generate_kernels(c, 200))
      for (double w : k.weights) ++seen[w];
    CHECK(seen.size() == 3);
    for (const auto& [w, n] : seen) CHECK((w == -1.0 || w == 0.0 || w == 1.0));
  }
  SUBCASE("uniform weights without centering lie in [-1, 1)") {
    GeneratorConfig c = config_with(2000, 2);
    c.weight_mode = WeightMode::uniform;
    c.centering_mode = CenteringMode::never;
    bool any_uncentred = false;
    for (const Kernel& k : generate_kernels(c, 200)) {
      for (double w : k.weights) {
        CHECK(w >= -1.0);
        CHECK(w < 1.0);
      }
      any_uncentred |= std::abs(std::accumulate(k.weights.begin(), k.weights.end(), 0.0)) > 1e-6;
    }
    CHECK(any_uncentred);
  }
  SUBCASE("random centering centres about half the kernels") {
    GeneratorConfig c = config_with(20'000, 3);
    c.centering_mode = CenteringMode::random;
    std::size_t centred = 0;
    for (const Kernel& k : generate_kernels(c, 200))
      centred += std::abs(std::accumulate(k.weights.begin(), k.weights.end(), 0.0)) <= 1e-9 * k.length();
    const double rate = static_cast<double>(centred) / 20'000.0;
    CHECK(rate > 0.47);
    CHECK(rate < 0.53);
  }
  SUBCASE("bias modes") {
    GeneratorConfig c = config_with(5000, 4);
    c.bias_mode = BiasMode::zero;
    for (const Kernel& k : generate_kernels(c, 200)) CHECK(k.bias == 0.0);
    c.bias_mode = BiasMode::normal;
    bool outside = false;
    for (const Kernel& k : generate_kernels(c, 200)) outside |= std::abs(k.bias) > 1.0;
    CHECK(outside);
  }
  SUBCASE("bias=zero keeps the length and dilation distributions") {
    GeneratorConfig c = config_with(30'000, 9);
    c.bias_mode = BiasMode::zero;
    std::map<std::size_t, std::size_t> lengths;
    std::size_t dilated = 0;
    for (const Kernel& k : generate_kernels(c, 500)) {
      ++lengths[k.length()];
      CHECK_LE(k.span(), 500u);
      dilated += k.dilation > 1;
    }
    for (const auto& [len, n] : lengths) {
      CHECK(n / 30'000.0 >= 0.32);
      CHECK(n / 30'000.0 <= 0.35);
    }
    CHECK(dilated > 20'000);
  }
  SUBCASE("dilation modes") {
    GeneratorConfig c = config_with(5000, 5);
    c.dilation_mode = DilationMode::none;
    for (const Kernel& k : generate_kernels(c, 300)) CHECK(k.dilation == 1);
    c.dilation_mode = DilationMode::uniform;
    int largest = 0;
    for (const Kernel& k : generate_kernels(c, 300)) {
      CHECK(k.dilation >= 1);
      CHECK_LE(k.span(), 300u);
      largest = std::max(largest, k.dilation);
    }
    CHECK(largest > 20);
  }
  SUBCASE("padding modes") {
    GeneratorConfig c = config_with(5000, 6);
    c.padding_mode = PaddingMode::never;
    for (const Kernel& k : generate_kernels(c, 300)) CHECK(k.padding == 0);
    c.padding_mode = PaddingMode::always;
    for (const Kernel& k : generate_kernels(c, 300)) CHECK(k.padding == k.centred_padding());
    c.padding_mode = PaddingMode::uniform;
    bool partial = false;
    for (const Kernel& k : generate_kernels(c, 300)) {
      CHECK(k.padding >= 0);
      CHECK(k.padding <= k.centred_padding());
      partial |= k.padding > 0 && k.padding < k.centred_padding();
    }
    CHECK(partial);
  }
  SUBCASE("fixed length") {
    GeneratorConfig c = config_with(500, 7);
    c.lengths = {13};
    for (const Kernel& k : generate_kernels(c, 300)) CHECK(k.length() == 13u);
  }
}

TEST_CASE("short inputs clamp the kernel length") {
  CHECK(usable_lengths({7, 9, 11}, 10) == std::vector<int>{7, 9});
  CHECK(usable_lengths({7, 9, 11}, 8) == std::vector<int>{7});
  CHECK(usable_lengths({7, 9, 11}, 7) == std::vector<int>{5});
  CHECK(usable_lengths({7, 9, 11}, 6) == std::vector<int>{5});
  CHECK(usable_lengths({7, 9, 11}, 5) == std::vector<int>{3});
  CHECK(usable_lengths({7, 9, 11}, 3) == std::vector<int>{3});
  CHECK(usable_lengths({7, 9, 11}, 2) == std::vector<int>{2});
  for (std::size_t input : {2u, 3u, 5u, 6u, 8u, 12u}) {
    for (const Kernel& k : generate_kernels(config_with(300, input), input)) {
      CHECK_LE(k.span(), input);
      CHECK(k.dilation >= 1);
    }
  }
}

TEST_CASE("configuration errors") {
  GeneratorConfig c;
  c.num_kernels = 0;
  CHECK_THROWS_AS(generate_kernels(c, 100), ConfigError);
  c.num_kernels = 1;
  c.lengths.clear();
  CHECK_THROWS_AS(generate_kernels(c, 100), ConfigError);
  CHECK_THROWS_AS(generate_kernels(GeneratorConfig{}, 1), DomainError);
  CHECK_THROWS_AS(parse_weight_mode("gaussian"), ConfigError);
  CHECK(parse_padding_mode("uniform") == PaddingMode::uniform);
  CHECK(parse_feature_mode("ppv") == FeatureMode::ppv_only);
  CHECK(parse_feature_mode(to_string(FeatureMode::max_only)) == FeatureMode::max_only);
}
