#include "rocket/data.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "rocket/errors.hpp"
#include "rocket/parallel.hpp"
#include "rocket/random.hpp"
#include "rocket/ridge.hpp"

namespace rocket {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  if (delimiter == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      fields.push_back(line.substr(i, j - i));
      i = j;
    }
    return fields;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

bool is_missing_token(std::string_view s) {
  return s.empty() || s == "?" || s == "NaN" || s == "nan" || s == "NAN" || s == "NA";
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool numeric_label(const std::string& s, double& value) { return parse_double(trim(s), value); }

std::vector<std::string> ordered_vocabulary(const std::set<std::string>& labels) {
  std::vector<std::string> vocab(labels.begin(), labels.end());
  bool all_numeric = true;
  std::map<std::string, double> numbers;
  for (const auto& l : vocab) {
    double v;
    if (!numeric_label(l, v)) {
      all_numeric = false;
      break;
    }
    numbers[l] = v;
  }
  if (all_numeric)
    std::stable_sort(vocab.begin(), vocab.end(),
                     [&](const std::string& a, const std::string& b) { return numbers[a] < numbers[b]; });
  return vocab;
}

struct RawRow {
  std::string label;
  Series values;
};

}  // namespace

std::string_view to_string(LengthPolicy::Kind kind) {
  switch (kind) {
    case LengthPolicy::Kind::fixed: return "fixed";
    case LengthPolicy::Kind::rescaled: return "rescaled";
    case LengthPolicy::Kind::as_is: return "as_is";
    case LengthPolicy::Kind::pending: return "pending";
  }
  return "?";
}

LengthPolicy::Kind parse_length_policy_kind(std::string_view s) {
  if (s == "fixed") return LengthPolicy::Kind::fixed;
  if (s == "rescaled") return LengthPolicy::Kind::rescaled;
  if (s == "as_is") return LengthPolicy::Kind::as_is;
  if (s == "pending") return LengthPolicy::Kind::pending;
  throw ConfigError("unknown length policy '" + std::string(s) + "'");
}

std::size_t Dataset::min_length() const {
  std::size_t m = series.empty() ? 0 : std::numeric_limits<std::size_t>::max();
  for (const auto& s : series) m = std::min(m, s.size());
  return m;
}

std::size_t Dataset::max_length() const {
  std::size_t m = 0;
  for (const auto& s : series) m = std::max(m, s.size());
  return m;
}

bool Dataset::has_missing() const {
  for (const auto& s : series)
    for (double v : s)
      if (std::isnan(v)) return true;
  return false;
}

Dataset read_ucr(const std::filesystem::path& path, const std::vector<std::string>* vocabulary) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::vector<RawRow> rows;
  std::string line;
  char delimiter = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    if (delimiter == 0) {
      delimiter = content.find('\t') != std::string_view::npos   ? '\t'
                  : content.find(',') != std::string_view::npos ? ','
                                                                : ' ';
    }
    const auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
    const std::vector<std::string_view> fields = split_fields(content, delimiter);
    if (fields.size() < 2) throw DataError(where() + "row has a label but no values");
    if (fields[0].empty()) throw DataError(where() + "missing label");

    RawRow row;
    row.label = std::string(fields[0]);
    row.values.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = kNaN;
      if (!is_missing_token(fields[i]) && !parse_double(fields[i], v))
        throw DataError(where() + "cannot parse value '" + std::string(fields[i]) + "' in column " +
                        std::to_string(i + 1));
      if (std::isinf(v)) throw DataError(where() + "infinite value in column " + std::to_string(i + 1));
      row.values.push_back(v);
    }
    while (!row.values.empty() && std::isnan(row.values.back())) row.values.pop_back();
    if (row.values.empty()) throw DataError(where() + "row has a label but no observed values");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path.string() + ": no data rows");

  Dataset ds;
  if (vocabulary) {
    ds.label_vocabulary = *vocabulary;
  } else {
    std::set<std::string> labels;
    for (const auto& r : rows) labels.insert(r.label);
    ds.label_vocabulary = ordered_vocabulary(labels);
  }
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < ds.label_vocabulary.size(); ++i) index[ds.label_vocabulary[i]] = static_cast<int>(i);

  ds.series.reserve(rows.size());
  ds.labels.reserve(rows.size());
  for (auto& r : rows) {
    const auto it = index.find(r.label);
    if (it == index.end()) throw DataError(path.string() + ": label '" + r.label + "' does not occur in the training data");
    ds.labels.push_back(it->second);
    ds.series.push_back(std::move(r.values));
  }
  ds.length_policy = ds.equal_length() ? LengthPolicy::fixed(ds.max_length()) : LengthPolicy::pending();
  return ds;
}

std::pair<Dataset, Dataset> load_ucr(const std::filesystem::path& train_path, const std::filesystem::path& test_path) {
  Dataset train = read_ucr(train_path);
  Dataset test = read_ucr(test_path, &train.label_vocabulary);
  return {std::move(train), std::move(test)};
}

void write_ucr(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  char buf[64];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << dataset.label_vocabulary.at(static_cast<std::size_t>(dataset.labels[i]));
    for (double v : dataset.series[i]) {
      if (std::isnan(v)) {
        out << "\tNaN";
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << '\t' << buf;
      }
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

Series znormalize(std::span<const double> series) {
  Series out(series.begin(), series.end());
  if (out.empty()) return out;
  const double n = static_cast<double>(out.size());
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 1e-10 * (1.0 + std::abs(mean)))) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  for (double& v : out) v = (v - mean) / sd;
  return out;
}

Series interpolate_missing(std::span<const double> series) {
  Series out(series.begin(), series.end());
  std::vector<std::size_t> observed;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!std::isnan(out[i])) observed.push_back(i);
  if (observed.empty()) throw DataError("series has no observed values");

  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(observed.front()), out[observed.front()]);
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(observed.back()) + 1, out.end(), out[observed.back()]);
  for (std::size_t k = 0; k + 1 < observed.size(); ++k) {
    const std::size_t a = observed[k];
    const std::size_t b = observed[k + 1];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double t = static_cast<double>(i - a) / static_cast<double>(b - a);
      out[i] = out[a] + t * (out[b] - out[a]);
    }
  }
  return out;
}

Series rescale(std::span<const double> series, std::size_t length) {
  if (series.empty()) throw DataError("cannot rescale an empty series");
  if (length == 0) throw DataError("cannot rescale to length 0");
  Series out(length);
  if (series.size() == 1 || length == 1) {
    std::fill(out.begin(), out.end(), series.front());
    return out;
  }
  const double step = static_cast<double>(series.size() - 1) / static_cast<double>(length - 1);
  for (std::size_t j = 0; j < length; ++j) {
    const double pos = static_cast<double>(j) * step;
    const auto i = std::min(static_cast<std::size_t>(pos), series.size() - 2);
    const double t = pos - static_cast<double>(i);
    out[j] = series[i] + t * (series[i + 1] - series[i]);
  }
  return out;
}

void prepare(Dataset& dataset, bool normalize) {
  for (auto& s : dataset.series) {
    s = interpolate_missing(s);
    if (normalize) s = znormalize(s);
  }
}

Dataset apply_length_policy(const Dataset& dataset, const LengthPolicy& policy) {
  Dataset out = dataset;
  switch (policy.kind) {
    case LengthPolicy::Kind::rescaled:
      for (auto& s : out.series)
        if (s.size() != policy.length) s = rescale(s, policy.length);
      break;
    case LengthPolicy::Kind::fixed:
      for (std::size_t i = 0; i < out.size(); ++i)
        if (out.series[i].size() != policy.length)
          throw DataError("series " + std::to_string(i) + " has length " + std::to_string(out.series[i].size()) +
                          ", expected " + std::to_string(policy.length));
      break;
    case LengthPolicy::Kind::as_is: break;
    case LengthPolicy::Kind::pending: throw DataError("length policy has not been resolved");
  }
  out.length_policy = policy;
  return out;
}

namespace {

// Accuracy of a small ridge pipeline trained on `train` rows and scored on
// `test` rows, under the given policy.
double fold_accuracy(const Dataset& data, std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows,
                     LengthPolicy::Kind kind, std::size_t target_length, const GeneratorConfig& generator) {
  std::vector<Series> train_x, test_x;
  std::vector<int> train_y, test_y;
  const auto shape = [&](const Series& s) { return kind == LengthPolicy::Kind::rescaled ? rescale(s, target_length) : s; };
  std::size_t longest = 0;
  for (std::size_t r : train_rows) {
    train_x.push_back(shape(data.series[r]));
    train_y.push_back(data.labels[r]);
    longest = std::max(longest, train_x.back().size());
  }
  for (std::size_t r : test_rows) {
    test_x.push_back(shape(data.series[r]));
    test_y.push_back(data.labels[r]);
  }
  if (std::set<int>(train_y.begin(), train_y.end()).size() < 2) return -1.0;

  const auto kernels = generate_kernels(generator, longest);
  TransformOptions opts;
  opts.mode = generator.feature_mode;
  opts.threads = 1;
  opts.short_series = ShortSeriesPolicy::fallback;
  const RidgeModel model = fit_ridge(apply_kernels(train_x, kernels, opts), train_y, data.label_vocabulary);
  const std::vector<int> pred = predict_ridge(model, apply_kernels(test_x, kernels, opts));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == test_y[i];
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace

LengthPolicy resolve_length_policy(const Dataset& train, const LengthPolicyOptions& options) {
  if (train.size() == 0) throw DataError("training set is empty");
  const std::size_t longest = train.max_length();
  if (train.equal_length()) return LengthPolicy::fixed(longest);
  if (options.folds < 2) throw ConfigError("length-policy cross-validation needs at least 2 folds");
  if (train.size() < options.folds) return LengthPolicy::rescaled(longest);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::array kinds{LengthPolicy::Kind::rescaled, LengthPolicy::Kind::as_is};
  std::vector<double> accuracy(kinds.size() * options.folds, -1.0);
  parallel_for(accuracy.size(), options.threads, [&](std::size_t job) {
    const std::size_t p = job / options.folds;
    const std::size_t fold = job % options.folds;
    std::vector<std::size_t> fit_rows, held_out;
    for (std::size_t i = 0; i < order.size(); ++i) (i % options.folds == fold ? held_out : fit_rows).push_back(order[i]);
    GeneratorConfig generator = options.generator;
    generator.num_kernels = options.num_kernels;
    generator.seed = derive_seed(options.seed, fold);
    accuracy[job] = fold_accuracy(train, fit_rows, held_out, kinds[p], longest, generator);
  });

  std::array<double, 2> mean{0.0, 0.0};
  for (std::size_t p = 0; p < kinds.size(); ++p) {
    std::size_t used = 0;
    for (std::size_t f = 0; f < options.folds; ++f) {
      const double a = accuracy[p * options.folds + f];
      if (a < 0.0) continue;
      mean[p] += a;
      ++used;
    }
    mean[p] = used ? mean[p] / static_cast<double>(used) : 0.0;
  }
  return mean[1] > mean[0] ? LengthPolicy::as_is(longest) : LengthPolicy::rescaled(longest);
}

}  // namespace rocket
