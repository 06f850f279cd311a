#pragma once

// Experiment harness: hyperparameter grid search, multi-seed suites over
// datasets x versions x agent counts, statistics and report writers.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdcdist/agents.hpp"
#include "hdcdist/dataset.hpp"

namespace hdcdist {

struct GridSpec {
  std::vector<std::size_t> dims;
  std::vector<double> lambdas;
  std::vector<int> kappas;

  // D in {50, 100, ..., 1500}, lambda in {2^-10, ..., 2^5}, kappa in {1, 3, 7, 15}.
  static GridSpec defaults();
  [[nodiscard]] std::size_t size() const noexcept { return dims.size() * lambdas.size() * kappas.size(); }
  [[nodiscard]] bool contains(std::size_t dim, double lambda, int kappa) const;
};

struct Hyperparameters {
  std::size_t dim = 500;
  double lambda = 1.0;
  int kappa = 7;
  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

enum class SelectionMode { kHoldout, kCrossValidated };

struct GridResult {
  Hyperparameters best;
  double accuracy = 0.0;
  std::size_t evaluated = 0;
};

// Exhaustive search with the centralized RLS classifier. Holdout mode trains
// on a stratified 50% split and scores the other half; cross-validated mode
// averages stratified 4-fold accuracy. Ties go to smaller D, then smaller
// lambda, then smaller kappa.
GridResult grid_search(const Dataset& ds, const GridSpec& grid, const SeedSpec& seed,
                       SelectionMode mode = SelectionMode::kHoldout);

// Where a suite's datasets come from.
struct SyntheticSpec {
  int classes = 3;
  std::size_t features = 10;
  std::size_t samples = 6000;
  double separation = 3.0;
  std::uint64_t seed = 7;
};

struct ExperimentConfig {
  // Exactly one of these three is set.
  std::optional<std::string> dataset_path;
  std::optional<std::string> manifest_path;
  std::optional<SyntheticSpec> synthetic;
  int label_column = -1;
  bool header = false;

  std::vector<ExperimentVersion> versions;
  std::vector<std::size_t> agent_counts{1};
  std::size_t seeds = 10;
  std::uint64_t master_seed = 1;

  Hyperparameters hyper;
  bool use_grid = false;
  GridSpec grid = GridSpec::defaults();
  SelectionMode selection = SelectionMode::kHoldout;
  // Allows fixed hyperparameters outside the grid's ranges.
  bool allow_off_grid = false;

  // Datasets whose holdout training half has <= min_train rows are skipped
  // for local/distributed versions. 0 disables the filter.
  std::size_t min_train = 0;
  int folds = 4;
  bool full_test_eval = false;
  InverseMode inverse_mode = InverseMode::kInvolution;
  bool record_timing = false;

  // Throws InvalidParameter on an inconsistent configuration.
  void validate() const;
};

// Flat key-value JSON, the same keys as the CLI flags. Unknown keys are
// rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct ResultRecord {
  std::string dataset;
  std::string version;  // centralized | local | distributed
  std::size_t agents = 1;
  std::string classifier;  // rls | centroid
  bool compression = false;
  Hyperparameters hyper;
  std::vector<double> per_seed_accuracy;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> per_agent_accuracy;
  std::size_t payload_values_per_producer = 0;
  std::size_t payload_bytes = 0;
  std::size_t clamped_test_values = 0;
  std::optional<double> wall_time_s;
  std::string config_hash;
  std::vector<std::string> warnings;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

nlohmann::json to_json(const ResultRecord& r);
ResultRecord record_from_json(const nlohmann::json& j);

// Sort key (dataset, version, N, classifier, compression).
bool record_less(const ResultRecord& a, const ResultRecord& b);

// Runs every (dataset, version, N) cell; centralized versions run once with
// N = 1. Any failure aborts the suite with the dataset, version and seed in
// the message. Records come back in record_less order.
std::vector<ResultRecord> run_suite(const ExperimentConfig& config);

// Sample Pearson correlation. Throws InvalidParameter for fewer than two
// points or unequal lengths, UndefinedCorrelation for a zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

// 100 * (distributed - local) / local on mean accuracies averaged over
// datasets, per agent count. Throws PairingError when a (dataset, N) has one
// of the two versions but not the other, or nothing matches at all.
std::map<std::size_t, double> relative_improvement(std::span<const ResultRecord> records,
                                                   const std::string& classifier = "rls",
                                                   bool compressed = false);

enum class ReportFormat { kJsonl, kCsv, kTable };
ReportFormat report_format_from_string(const std::string& name);

std::string render_jsonl(std::span<const ResultRecord> records);
std::string render_csv(std::span<const ResultRecord> records);
// Accuracy table: rows {Cent., RLS} x {Local, Distr[, Distr+HRR]}, columns N,
// cells = mean accuracy over datasets. Centralized records fill N = 1.
// Classifiers without records are left out.
std::string render_table(std::span<const ResultRecord> records);

// Pairs each dataset's mean accuracy under two selectors (e.g.
// "centralized/rls", "local/rls@10", "distributed+hrr/centroid@50") as CSV
// "dataset,x,y". Datasets missing one side are left out and reported in
// `warnings`.
std::string render_scatter(std::span<const ResultRecord> records, const std::string& x_selector,
                           const std::string& y_selector, std::vector<std::string>* warnings = nullptr);

// Renders fully before touching the file; throws IoError if `path` cannot
// be written, leaving no partial file.
void write_report(const std::string& path, std::span<const ResultRecord> records, ReportFormat format);
void write_text(const std::string& path, const std::string& content);

std::vector<ResultRecord> read_jsonl(const std::string& path);
std::vector<ResultRecord> parse_csv_records(const std::string& content);

}  // namespace hdcdist
