#pragma once

#include <filesystem>

#include "json.hpp"
#include "rocket/kernel.hpp"
#include "rocket/pipeline.hpp"

namespace rocket {

/// Version written into model files; files with a newer version are rejected.
inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const GeneratorConfig& config);

/// Reads a generator configuration. Keys absent from `j` keep the value in
/// `base`, so the same function reads full configs and single-axis
/// variant overrides. Keys: num_kernels, length (fixed) or lengths, weights,
/// centering, bias, dilation, padding, features, seed.
GeneratorConfig generator_config_from_json(const nlohmann::json& j, GeneratorConfig base = {});

nlohmann::json to_json(const Kernel& kernel);
Kernel kernel_from_json(const nlohmann::json& j);

/// The unified model document: header (format, version, classifier kind,
/// kernel count, input length), options, kernels, and classifier parameters.
nlohmann::json to_json(const RocketClassifier& classifier);
RocketClassifier classifier_from_json(const nlohmann::json& j);

void save_model(const RocketClassifier& classifier, const std::filesystem::path& path);
RocketClassifier load_model(const std::filesystem::path& path);

}  // namespace rocket
