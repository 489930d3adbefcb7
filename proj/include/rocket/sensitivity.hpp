#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rocket/kernel.hpp"
#include "rocket/pipeline.hpp"

namespace rocket {

/// A train/test pair in UCR format.
struct DatasetEntry {
  std::string name;
  std::filesystem::path train;
  std::filesystem::path test;
  /// Overrides the plan's normalization setting when present.
  std::optional<bool> normalize;
};

struct Variant {
  std::string name;
  GeneratorConfig config;
};

struct ExperimentPlan {
  std::vector<Variant> variants;
  std::vector<DatasetEntry> datasets;
  std::vector<std::uint64_t> seeds;
  /// Everything except the generator config and seeds, which come from the
  /// variant and the cell.
  PipelineOptions base;

  /// Throws ConfigError on empty lists, duplicate names, or names that cannot
  /// be written to CSV unquoted.
  void validate() const;
};

/// Seeds 0..count-1.
std::vector<std::uint64_t> default_seeds(std::size_t count = 10);

/// Dataset manifest:
///   {"root": "ucr", "datasets": ["Coffee", {"name": "X", "train": "a.tsv", "test": "b.tsv", "normalize": false}]}
/// A bare name resolves to root/Name/Name_TRAIN.tsv and root/Name/Name_TEST.tsv.
/// Relative paths are taken relative to `base_dir`.
std::vector<DatasetEntry> parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
std::vector<DatasetEntry> load_manifest(const std::filesystem::path& path);

/// Variant catalog: {"defaults": {...}, "variants": [{"name": "...", <overrides>}]}.
/// Each variant starts from `defaults` (itself applied over `base`) and
/// overrides the listed keys. `axis` entries are kept for grouping but
/// otherwise ignored.
std::vector<Variant> parse_variants(const nlohmann::json& j, const GeneratorConfig& base = {});
std::vector<Variant> load_variants(const std::filesystem::path& path, const GeneratorConfig& base = {});

/// Plan file: {"variants": <catalog object or path>, "datasets": <manifest
/// object or path>, "seeds": [..] or a count, "classifier": "ridge",
/// "normalize": true, "only": ["name", ...]}. `only` restricts the variants.
ExperimentPlan load_plan(const std::filesystem::path& path);

struct CellResult {
  std::string variant;
  std::string dataset;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  /// Training plus test transform time.
  double transform_seconds = 0.0;
  double train_seconds = 0.0;
  /// Empty on success.
  std::string error;

  bool ok() const { return error.empty(); }
};

struct RunOptions {
  /// Results file. Existing successful cells are kept and skipped; new cells
  /// are appended as they finish. Empty: keep results in memory only.
  std::filesystem::path results_csv;
  /// Cells run concurrently; each cell's pipeline is single-threaded when
  /// more than one cell runs at once.
  std::size_t threads = 0;
  std::function<void(const CellResult&)> on_cell;
};

inline constexpr const char* kResultsHeader = "variant,dataset,seed,accuracy,transform_seconds,train_seconds,error";

/// Runs every (variant, dataset, seed) cell. Failures are recorded in the
/// cell's error field and do not stop the run. Returns all cells in plan
/// order (variant, then dataset, then seed), including resumed ones.
std::vector<CellResult> run_plan(const ExperimentPlan& plan, const RunOptions& options = {});

/// Runs one cell.
CellResult run_cell(const Variant& variant, const DatasetEntry& entry, const Dataset& train, const Dataset& test,
                    std::uint64_t seed, const PipelineOptions& base);

std::vector<CellResult> read_results(const std::filesystem::path& path);
std::string format_result(const CellResult& cell);

struct SummaryRow {
  std::string variant;
  std::string dataset;
  double mean = 0.0;
  /// Sample standard deviation over seeds (0 for a single run).
  double std = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
};

/// One row per (variant, dataset) in order of first appearance, over the
/// successful cells.
std::vector<SummaryRow> summarize(std::span<const CellResult> cells);

struct VariantRank {
  std::string variant;
  double mean_rank = 0.0;
};

/// Per dataset, variants are ranked by mean accuracy (1 = best, ties share
/// the average rank); returns each variant's mean rank over datasets, in
/// order of first appearance. Throws DataError listing any missing
/// (variant, dataset) combinations.
std::vector<VariantRank> mean_ranks(std::span<const SummaryRow> rows);

struct WinDrawLoss {
  std::size_t wins = 0;
  std::size_t draws = 0;
  std::size_t losses = 0;

  bool operator==(const WinDrawLoss&) const = default;
};

/// Per-dataset comparison of a against b; |difference| <= tolerance is a draw.
WinDrawLoss win_draw_loss(std::span<const SummaryRow> rows, const std::string& a, const std::string& b,
                          double tolerance = 0.0);

void write_summary_csv(std::span<const SummaryRow> rows, std::ostream& out);
/// Mean rank per variant plus win/draw/loss against `reference`.
void write_ranks_csv(std::span<const SummaryRow> rows, const std::string& reference, std::ostream& out,
                     double tolerance = 0.0);

}  // namespace rocket
