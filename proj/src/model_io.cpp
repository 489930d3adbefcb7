#include "rocket/model_io.hpp"

#include <fstream>
#include <sstream>

#include "rocket/errors.hpp"

namespace rocket {

using nlohmann::json;

namespace {

constexpr const char* kFormatName = "rocket-model";

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Eigen::VectorXd row = vector_from(j.at(r));
    if (row.size() != cols) throw DataError("model file: ragged matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

json standardizer_json(const Standardizer& s) { return {{"mean", vector_json(s.mean)}, {"scale", vector_json(s.scale)}}; }

Standardizer standardizer_from(const json& j) {
  Standardizer s;
  s.mean = vector_from(j.at("mean"));
  s.scale = vector_from(j.at("scale"));
  if (s.mean.size() != s.scale.size()) throw DataError("model file: standardizer size mismatch");
  return s;
}

json schedule_json(const TrainSchedule& s) {
  json j = {{"minibatch_size", s.minibatch_size},
            {"lr_candidates", s.lr_candidates},
            {"lr_search_updates", s.lr_search_updates},
            {"patience_val_updates", s.patience_val_updates},
            {"patience_train_updates", s.patience_train_updates},
            {"min_epochs", s.min_epochs},
            {"max_epochs", s.max_epochs},
            {"validation_size", s.validation_size},
            {"seed", s.seed}};
  j["initial_lr"] = s.initial_lr ? json(*s.initial_lr) : json(nullptr);
  return j;
}

TrainSchedule schedule_from(const json& j) {
  TrainSchedule s;
  s.minibatch_size = j.value("minibatch_size", s.minibatch_size);
  s.lr_candidates = j.value("lr_candidates", s.lr_candidates);
  s.lr_search_updates = j.value("lr_search_updates", s.lr_search_updates);
  s.patience_val_updates = j.value("patience_val_updates", s.patience_val_updates);
  s.patience_train_updates = j.value("patience_train_updates", s.patience_train_updates);
  s.min_epochs = j.value("min_epochs", s.min_epochs);
  s.max_epochs = j.value("max_epochs", s.max_epochs);
  s.validation_size = j.value("validation_size", s.validation_size);
  s.seed = j.value("seed", s.seed);
  if (j.contains("initial_lr") && !j["initial_lr"].is_null()) s.initial_lr = j["initial_lr"].get<double>();
  return s;
}

json ridge_json(const RidgeModel& m) {
  return {{"coefficients", matrix_json(m.coefficients)},
          {"intercepts", vector_json(m.intercepts)},
          {"alpha", m.chosen_alpha},
          {"alpha_grid", m.alpha_grid},
          {"loo_errors", m.loo_errors},
          {"standardizer", standardizer_json(m.standardizer)},
          {"class_labels", m.class_labels}};
}

RidgeModel ridge_from(const json& j) {
  RidgeModel m;
  m.standardizer = standardizer_from(j.at("standardizer"));
  m.coefficients = matrix_from(j.at("coefficients"), m.standardizer.mean.size());
  m.intercepts = vector_from(j.at("intercepts"));
  m.chosen_alpha = j.at("alpha").get<double>();
  m.alpha_grid = j.value("alpha_grid", std::vector<double>{});
  m.loo_errors = j.value("loo_errors", std::vector<double>{});
  m.class_labels = j.at("class_labels").get<std::vector<std::string>>();
  return m;
}

json logistic_json(const LogisticModel& m) {
  const ScheduleState& s = m.schedule;
  return {{"weights", matrix_json(m.weights)},
          {"biases", vector_json(m.biases)},
          {"standardizer", standardizer_json(m.standardizer)},
          {"class_labels", m.class_labels},
          {"optimizer",
           {{"beta1", m.optimizer.beta1},
            {"beta2", m.optimizer.beta2},
            {"epsilon", m.optimizer.epsilon},
            {"m", vector_json(m.optimizer.m)},
            {"v", vector_json(m.optimizer.v)},
            {"step_count", m.optimizer.step_count}}},
          {"schedule_state",
           {{"best_validation_loss", s.best_validation_loss},
            {"best_training_loss", s.best_training_loss},
            {"learning_rate", s.learning_rate},
            {"updates", s.updates},
            {"epochs", s.epochs},
            {"lr_halvings", s.lr_halvings},
            {"stopped_early", s.stopped_early}}}};
}

LogisticModel logistic_from(const json& j) {
  LogisticModel m;
  m.standardizer = standardizer_from(j.at("standardizer"));
  m.weights = matrix_from(j.at("weights"), m.standardizer.mean.size());
  m.biases = vector_from(j.at("biases"));
  m.class_labels = j.at("class_labels").get<std::vector<std::string>>();
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    m.optimizer.beta1 = o.value("beta1", m.optimizer.beta1);
    m.optimizer.beta2 = o.value("beta2", m.optimizer.beta2);
    m.optimizer.epsilon = o.value("epsilon", m.optimizer.epsilon);
    m.optimizer.m = vector_from(o.at("m"));
    m.optimizer.v = vector_from(o.at("v"));
    m.optimizer.step_count = o.value("step_count", std::int64_t{0});
  }
  if (j.contains("schedule_state")) {
    const json& s = j["schedule_state"];
    m.schedule.best_validation_loss = s.value("best_validation_loss", 0.0);
    m.schedule.best_training_loss = s.value("best_training_loss", 0.0);
    m.schedule.learning_rate = s.value("learning_rate", 0.0);
    m.schedule.updates = s.value("updates", std::size_t{0});
    m.schedule.epochs = s.value("epochs", std::size_t{0});
    m.schedule.lr_halvings = s.value("lr_halvings", std::size_t{0});
    m.schedule.stopped_early = s.value("stopped_early", false);
  }
  return m;
}

template <typename T, typename Parse>
void read_mode(const json& j, const char* key, T& out, Parse parse) {
  if (j.contains(key)) out = parse(j[key].get<std::string>());
}

}  // namespace

json to_json(const GeneratorConfig& c) {
  return {{"num_kernels", c.num_kernels},
          {"lengths", c.lengths},
          {"weights", to_string(c.weight_mode)},
          {"centering", to_string(c.centering_mode)},
          {"bias", to_string(c.bias_mode)},
          {"dilation", to_string(c.dilation_mode)},
          {"padding", to_string(c.padding_mode)},
          {"features", to_string(c.feature_mode)},
          {"seed", c.seed}};
}

GeneratorConfig generator_config_from_json(const json& j, GeneratorConfig c) {
  if (!j.is_object()) throw ConfigError("generator config must be a JSON object");
  try {
    if (j.contains("num_kernels")) {
      const auto k = j["num_kernels"].get<long long>();
      if (k < 1) throw ConfigError("num_kernels must be positive");
      c.num_kernels = static_cast<std::size_t>(k);
    }
    if (j.contains("length")) c.lengths = {j["length"].get<int>()};
    if (j.contains("lengths")) c.lengths = j["lengths"].get<std::vector<int>>();
    read_mode(j, "weights", c.weight_mode, parse_weight_mode);
    read_mode(j, "centering", c.centering_mode, parse_centering_mode);
    read_mode(j, "bias", c.bias_mode, parse_bias_mode);
    read_mode(j, "dilation", c.dilation_mode, parse_dilation_mode);
    read_mode(j, "padding", c.padding_mode, parse_padding_mode);
    read_mode(j, "features", c.feature_mode, parse_feature_mode);
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const Kernel& k) {
  return {{"weights", k.weights}, {"bias", k.bias}, {"dilation", k.dilation}, {"padding", k.padding}};
}

Kernel kernel_from_json(const json& j) {
  Kernel k;
  k.weights = j.at("weights").get<std::vector<double>>();
  k.bias = j.at("bias").get<double>();
  k.dilation = j.at("dilation").get<int>();
  k.padding = j.at("padding").get<int>();
  if (k.weights.empty() || k.dilation < 1 || k.padding < 0) throw DataError("model file: invalid kernel");
  return k;
}

json to_json(const RocketClassifier& classifier) {
  const PipelineOptions& o = classifier.options();
  json kernels = json::array();
  for (const Kernel& k : classifier.kernels()) kernels.push_back(to_json(k));

  json j;
  j["format"] = kFormatName;
  j["version"] = kModelFormatVersion;
  j["classifier"] = to_string(o.classifier);
  j["num_kernels"] = classifier.kernels().size();
  j["input_length"] = classifier.length_policy().length;
  j["config"] = to_json(o.generator);
  j["normalize"] = o.normalize;
  j["length_policy"] = {{"kind", to_string(classifier.length_policy().kind)},
                        {"length", classifier.length_policy().length}};
  j["alpha_grid"] = o.alpha_grid;
  j["schedule"] = schedule_json(o.schedule);
  j["tranche_size"] = o.tranche_size;
  j["kernels"] = std::move(kernels);
  if (const auto* ridge = std::get_if<RidgeModel>(&classifier.model()))
    j["model"] = ridge_json(*ridge);
  else
    j["model"] = logistic_json(std::get<LogisticModel>(classifier.model()));
  return j;
}

RocketClassifier classifier_from_json(const json& j) {
  try {
    if (j.value("format", std::string{}) != kFormatName) throw DataError("not a rocket model file");
    const int version = j.at("version").get<int>();
    if (version > kModelFormatVersion)
      throw DataError("model file version " + std::to_string(version) + " is newer than supported version " +
                      std::to_string(kModelFormatVersion));
    if (version < 1) throw DataError("invalid model file version " + std::to_string(version));

    PipelineOptions o;
    o.classifier = parse_classifier_kind(j.at("classifier").get<std::string>());
    o.generator = generator_config_from_json(j.at("config"));
    o.normalize = j.at("normalize").get<bool>();
    o.alpha_grid = j.value("alpha_grid", o.alpha_grid);
    if (j.contains("schedule")) o.schedule = schedule_from(j["schedule"]);
    o.tranche_size = j.value("tranche_size", o.tranche_size);

    const json& lp = j.at("length_policy");
    LengthPolicy policy{parse_length_policy_kind(lp.at("kind").get<std::string>()), lp.at("length").get<std::size_t>()};

    std::vector<Kernel> kernels;
    for (const json& k : j.at("kernels")) kernels.push_back(kernel_from_json(k));
    if (kernels.size() != j.at("num_kernels").get<std::size_t>()) throw DataError("model file: kernel count mismatch");

    RocketClassifier::Model model;
    if (o.classifier == ClassifierKind::ridge)
      model = ridge_from(j.at("model"));
    else
      model = logistic_from(j.at("model"));

    const std::size_t features = kernels.size() * features_per_kernel(o.generator.feature_mode);
    const std::size_t stored = std::visit([](const auto& m) { return m.num_features(); }, model);
    if (stored != features) throw DataError("model file: feature count does not match the kernels");
    return RocketClassifier(std::move(o), std::move(kernels), policy, std::move(model));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const RocketClassifier& classifier, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json(classifier).dump() << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

RocketClassifier load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return classifier_from_json(j);
}

}  // namespace rocket
