#include "rocket/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include "rocket/data.hpp"
#include "rocket/errors.hpp"
#include "rocket/model_io.hpp"
#include "rocket/parallel.hpp"

namespace rocket {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using CellKey = std::tuple<std::string, std::string, std::uint64_t>;

bool csv_safe(const std::string& s) { return !s.empty() && s.find_first_of(",\"\n\r") == std::string::npos; }

fs::path resolve(const fs::path& p, const fs::path& base) { return p.is_absolute() ? p : base / p; }

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r' || c == ',' || c == '"') c = ' ';
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void ExperimentPlan::validate() const {
  if (variants.empty()) throw ConfigError("plan has no variants");
  if (datasets.empty()) throw ConfigError("plan has no datasets");
  if (seeds.empty()) throw ConfigError("plan has no seeds");
  std::set<std::string> names;
  for (const Variant& v : variants) {
    if (!csv_safe(v.name)) throw ConfigError("invalid variant name '" + v.name + "'");
    if (!names.insert(v.name).second) throw ConfigError("duplicate variant '" + v.name + "'");
    v.config.validate();
  }
  names.clear();
  for (const DatasetEntry& d : datasets) {
    if (!csv_safe(d.name)) throw ConfigError("invalid dataset name '" + d.name + "'");
    if (!names.insert(d.name).second) throw ConfigError("duplicate dataset '" + d.name + "'");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ConfigError("duplicate seeds in plan");
}

std::vector<std::uint64_t> default_seeds(std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = i;
  return seeds;
}

std::vector<DatasetEntry> parse_manifest(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
  const fs::path root = resolve(j.value("root", std::string(".")), base_dir);
  std::vector<DatasetEntry> out;
  try {
    for (const json& item : j.value("datasets", json::array())) {
      DatasetEntry e;
      if (item.is_string()) {
        e.name = item.get<std::string>();
        e.train = root / e.name / (e.name + "_TRAIN.tsv");
        e.test = root / e.name / (e.name + "_TEST.tsv");
      } else {
        e.name = item.at("name").get<std::string>();
        e.train = resolve(item.at("train").get<std::string>(), base_dir);
        e.test = resolve(item.at("test").get<std::string>(), base_dir);
        if (item.contains("normalize")) e.normalize = item["normalize"].get<bool>();
      }
      out.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return out;
}

std::vector<DatasetEntry> load_manifest(const fs::path& path) {
  return parse_manifest(read_json_file(path), path.parent_path());
}

std::vector<Variant> parse_variants(const json& j, const GeneratorConfig& base) {
  if (!j.is_object()) throw ConfigError("variant catalog must be a JSON object");
  const GeneratorConfig defaults = j.contains("defaults") ? generator_config_from_json(j["defaults"], base) : base;
  std::vector<Variant> out;
  for (const json& item : j.value("variants", json::array())) {
    if (!item.is_object() || !item.contains("name")) throw ConfigError("every variant needs a name");
    json overrides = item;
    overrides.erase("name");
    overrides.erase("axis");
    out.push_back({item["name"].get<std::string>(), generator_config_from_json(overrides, defaults)});
  }
  return out;
}

std::vector<Variant> load_variants(const fs::path& path, const GeneratorConfig& base) {
  return parse_variants(read_json_file(path), base);
}

ExperimentPlan load_plan(const fs::path& path) {
  const json j = read_json_file(path);
  const fs::path dir = path.parent_path();
  ExperimentPlan plan;
  try {
    if (j.contains("classifier")) plan.base.classifier = parse_classifier_kind(j["classifier"].get<std::string>());
    plan.base.normalize = j.value("normalize", true);

    const json& v = j.at("variants");
    plan.variants = v.is_string() ? load_variants(resolve(v.get<std::string>(), dir)) : parse_variants(v);
    if (j.contains("only")) {
      const auto only = j["only"].get<std::vector<std::string>>();
      std::vector<Variant> kept;
      for (const std::string& name : only) {
        auto it = std::find_if(plan.variants.begin(), plan.variants.end(), [&](const Variant& x) { return x.name == name; });
        if (it == plan.variants.end()) throw ConfigError("plan selects unknown variant '" + name + "'");
        kept.push_back(*it);
      }
      plan.variants = std::move(kept);
    }

    const json& d = j.at("datasets");
    plan.datasets = d.is_string() ? load_manifest(resolve(d.get<std::string>(), dir)) : parse_manifest(d, dir);

    if (!j.contains("seeds"))
      plan.seeds = default_seeds();
    else if (j["seeds"].is_number_integer())
      plan.seeds = default_seeds(j["seeds"].get<std::size_t>());
    else
      plan.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  plan.validate();
  return plan;
}

CellResult run_cell(const Variant& variant, const DatasetEntry& entry, const Dataset& train, const Dataset& test,
                    std::uint64_t seed, const PipelineOptions& base) {
  CellResult r;
  r.variant = variant.name;
  r.dataset = entry.name;
  r.seed = seed;
  try {
    PipelineOptions options = base;
    options.generator = variant.config;
    options.generator.seed = seed;
    options.schedule.seed = seed;
    if (entry.normalize) options.normalize = *entry.normalize;
    FitTimings timings;
    const RocketClassifier model = RocketClassifier::fit(train, options, &timings);
    const Evaluation e = evaluate(model, test);
    r.accuracy = e.accuracy;
    r.transform_seconds = timings.transform_seconds + e.transform_seconds;
    r.train_seconds = timings.train_seconds;
  } catch (const std::exception& ex) {
    r.error = one_line(ex.what());
    if (r.error.empty()) r.error = "unknown error";
  }
  return r;
}

std::string format_result(const CellResult& c) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.17g,%.6f,%.6f,", c.accuracy, c.transform_seconds, c.train_seconds);
  return c.variant + ',' + c.dataset + ',' + std::to_string(c.seed) + ',' + buf + one_line(c.error);
}

std::vector<CellResult> read_results(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) return {};
  if (line != kResultsHeader) throw DataError(path.string() + ": unexpected results header");
  std::vector<CellResult> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    // A partially written last line (interrupted run) is ignored.
    if (f.size() != 7) continue;
    CellResult c;
    c.variant = f[0];
    c.dataset = f[1];
    try {
      c.seed = std::stoull(f[2]);
      c.accuracy = std::stod(f[3]);
      c.transform_seconds = std::stod(f[4]);
      c.train_seconds = std::stod(f[5]);
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed result row");
    }
    c.error = f[6];
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CellResult> run_plan(const ExperimentPlan& plan, const RunOptions& options) {
  plan.validate();

  std::map<CellKey, CellResult> done;
  const bool persist = !options.results_csv.empty();
  if (persist && fs::exists(options.results_csv))
    for (CellResult& c : read_results(options.results_csv))
      if (c.ok()) done[{c.variant, c.dataset, c.seed}] = std::move(c);

  std::ofstream out;
  if (persist) {
    // Rewrite with the kept cells only, dropping failures and duplicates.
    out.open(options.results_csv, std::ios::trunc);
    if (!out) throw DataError("cannot write " + options.results_csv.string());
    out << kResultsHeader << '\n';
    for (const auto& [key, c] : done) out << format_result(c) << '\n';
    out.flush();
  }

  struct Loaded {
    std::optional<Dataset> train, test;
    std::string error;
  };
  std::vector<Loaded> data(plan.datasets.size());

  std::vector<CellResult> results;
  std::vector<std::size_t> pending;
  std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> cells;
  std::vector<bool> needed(plan.datasets.size(), false);
  for (std::size_t v = 0; v < plan.variants.size(); ++v)
    for (std::size_t d = 0; d < plan.datasets.size(); ++d)
      for (std::uint64_t seed : plan.seeds) {
        auto it = done.find({plan.variants[v].name, plan.datasets[d].name, seed});
        if (it != done.end()) {
          results.push_back(it->second);
        } else {
          results.emplace_back();
          pending.push_back(results.size() - 1);
          needed[d] = true;
        }
        cells.emplace_back(v, d, seed);
      }

  for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
    if (!needed[d]) continue;
    try {
      auto [train, test] = load_ucr(plan.datasets[d].train, plan.datasets[d].test);
      data[d].train = std::move(train);
      data[d].test = std::move(test);
    } catch (const std::exception& e) {
      data[d].error = one_line(e.what());
    }
  }

  const std::size_t workers = std::min(resolve_threads(options.threads), std::max<std::size_t>(1, pending.size()));
  PipelineOptions base = plan.base;
  base.threads = workers > 1 ? 1 : options.threads;

  std::mutex collector;
  parallel_for(pending.size(), workers, [&](std::size_t i) {
    const std::size_t index = pending[i];
    const auto [v, d, seed] = cells[index];
    CellResult r;
    if (!data[d].error.empty()) {
      r.variant = plan.variants[v].name;
      r.dataset = plan.datasets[d].name;
      r.seed = seed;
      r.error = data[d].error;
    } else {
      r = run_cell(plan.variants[v], plan.datasets[d], *data[d].train, *data[d].test, seed, base);
    }
    std::lock_guard lock(collector);
    if (persist) {
      out << format_result(r) << '\n';
      out.flush();
    }
    if (options.on_cell) options.on_cell(r);
    results[index] = std::move(r);
  });
  return results;
}

std::vector<SummaryRow> summarize(std::span<const CellResult> cells) {
  std::vector<SummaryRow> rows;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::vector<std::vector<double>> values;
  for (const CellResult& c : cells) {
    auto [it, fresh] = index.try_emplace({c.variant, c.dataset}, rows.size());
    if (fresh) {
      rows.push_back({c.variant, c.dataset});
      values.emplace_back();
    }
    if (c.ok())
      values[it->second].push_back(c.accuracy);
    else
      ++rows[it->second].failures;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& x = values[i];
    rows[i].runs = x.size();
    if (x.empty()) {
      rows[i].mean = rows[i].std = std::nan("");
      continue;
    }
    double sum = 0.0;
    for (double a : x) sum += a;
    const double mean = sum / static_cast<double>(x.size());
    double ss = 0.0;
    for (double a : x) ss += (a - mean) * (a - mean);
    rows[i].mean = mean;
    rows[i].std = x.size() > 1 ? std::sqrt(ss / static_cast<double>(x.size() - 1)) : 0.0;
  }
  return rows;
}

namespace {

struct Table {
  std::vector<std::string> variants;
  std::vector<std::string> datasets;
  std::map<std::pair<std::string, std::string>, double> mean;
};

Table tabulate(std::span<const SummaryRow> rows) {
  Table t;
  std::set<std::string> seen_v, seen_d;
  for (const SummaryRow& r : rows) {
    if (seen_v.insert(r.variant).second) t.variants.push_back(r.variant);
    if (seen_d.insert(r.dataset).second) t.datasets.push_back(r.dataset);
    if (r.runs > 0 && std::isfinite(r.mean)) t.mean[{r.variant, r.dataset}] = r.mean;
  }
  return t;
}

void require_complete(const Table& t, const std::vector<std::string>& variants) {
  std::string missing;
  for (const auto& v : variants)
    for (const auto& d : t.datasets)
      if (!t.mean.count({v, d})) missing += (missing.empty() ? "" : ", ") + v + "/" + d;
  if (!missing.empty()) throw DataError("missing results: " + missing);
}

}  // namespace

std::vector<VariantRank> mean_ranks(std::span<const SummaryRow> rows) {
  const Table t = tabulate(rows);
  require_complete(t, t.variants);
  const std::size_t nv = t.variants.size();
  std::vector<double> total(nv, 0.0);
  for (const auto& d : t.datasets) {
    std::vector<std::size_t> order(nv);
    for (std::size_t i = 0; i < nv; ++i) order[i] = i;
    auto acc = [&](std::size_t i) { return t.mean.at({t.variants[i], d}); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return acc(a) > acc(b); });
    for (std::size_t i = 0; i < nv;) {
      std::size_t j = i;
      while (j + 1 < nv && acc(order[j + 1]) == acc(order[i])) ++j;
      const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t k = i; k <= j; ++k) total[order[k]] += rank;
      i = j + 1;
    }
  }
  std::vector<VariantRank> out;
  for (std::size_t i = 0; i < nv; ++i)
    out.push_back({t.variants[i], t.datasets.empty() ? 0.0 : total[i] / static_cast<double>(t.datasets.size())});
  return out;
}

WinDrawLoss win_draw_loss(std::span<const SummaryRow> rows, const std::string& a, const std::string& b, double tolerance) {
  const Table t = tabulate(rows);
  for (const auto& name : {a, b})
    if (std::find(t.variants.begin(), t.variants.end(), name) == t.variants.end())
      throw DataError("no results for variant '" + name + "'");
  require_complete(t, {a, b});
  WinDrawLoss w;
  for (const auto& d : t.datasets) {
    const double diff = t.mean.at({a, d}) - t.mean.at({b, d});
    if (std::abs(diff) <= tolerance)
      ++w.draws;
    else if (diff > 0)
      ++w.wins;
    else
      ++w.losses;
  }
  return w;
}

void write_summary_csv(std::span<const SummaryRow> rows, std::ostream& out) {
  out << "variant,dataset,mean_accuracy,std_accuracy,runs,failures\n";
  char buf[96];
  for (const SummaryRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%zu,%zu", r.mean, r.std, r.runs, r.failures);
    out << r.variant << ',' << r.dataset << ',' << buf << '\n';
  }
}

void write_ranks_csv(std::span<const SummaryRow> rows, const std::string& reference, std::ostream& out,
                     double tolerance) {
  out << "variant,mean_rank,reference,wins,draws,losses\n";
  char buf[32];
  for (const VariantRank& r : mean_ranks(rows)) {
    const WinDrawLoss w = win_draw_loss(rows, r.variant, reference, tolerance);
    std::snprintf(buf, sizeof buf, "%.4f", r.mean_rank);
    out << r.variant << ',' << buf << ',' << reference << ',' << w.wins << ',' << w.draws << ',' << w.losses << '\n';
  }
}

}  // namespace rocket
