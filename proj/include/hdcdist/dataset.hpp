#pragma once

// Tabular datasets: CSV ingestion, [0,1] feature normalization, stratified
// holdout and k-fold splits, size filtering and seeded synthetic blobs.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdcdist/classifiers.hpp"
#include "hdcdist/seed.hpp"

namespace hdcdist {

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

struct Dataset {
  std::string name;
  Eigen::MatrixXd samples;  // M x K
  std::vector<ClassLabel> labels;  // 1..L
  int num_classes = 0;
  std::vector<std::string> class_names;  // raw label value for class i+1
  std::vector<FeatureRange> feature_ranges;  // set by normalize()

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] std::size_t features() const noexcept { return static_cast<std::size_t>(samples.cols()); }
  [[nodiscard]] std::vector<std::size_t> class_histogram() const;
  // Throws InvalidDataset when shapes disagree, L < 2 or a label is out of range.
  void validate() const;
};

// Reads a comma-separated file. `label_column` may be negative to count from
// the right (-1 is the last column). Labels are re-indexed densely to 1..L,
// numerically sorted when every label is numeric and lexicographically
// otherwise. Throws NotFoundError, ParseError (with row and column) or
// InvalidDataset (single class).
Dataset load_csv(const std::string& path, int label_column = -1, bool header = false);

// Per-feature (min, max) over the given rows (all rows when empty).
std::vector<FeatureRange> fit_ranges(const Eigen::MatrixXd& samples,
                                     std::span<const std::size_t> rows = {});

// (x - min) / (max - min), clamped to [0,1]; constant features map to 0.5.
// Returns the number of entries that had to be clamped.
std::size_t apply_ranges(Eigen::MatrixXd& samples, const std::vector<FeatureRange>& ranges);

// Fits ranges on every row of `ds` and maps it into [0,1]. The fitted
// ranges are stored on the result for test-time reuse.
Dataset normalize(const Dataset& ds);

struct SplitSpec {
  enum class Mode { kHoldout, kKFold };
  Mode mode = Mode::kKFold;
  double train_fraction = 0.5;  // holdout only, in (0,1)
  int folds = 4;                // kfold only, >= 2
  bool stratified = true;
  SeedSpec seed;

  void validate() const;
};

// Holdout: parts = {train, test}. K-fold: parts = the k disjoint folds.
// Index lists are sorted ascending.
struct SplitResult {
  std::vector<std::vector<std::size_t>> parts;
  std::vector<std::string> warnings;
};

SplitResult split(const std::vector<ClassLabel>& labels, const SplitSpec& spec);
SplitResult split(const Dataset& ds, const SplitSpec& spec);

struct DatasetSummary {
  std::string name;
  std::size_t train_size = 0;
};

// Keeps entries whose training part has strictly more than `threshold` samples.
std::vector<DatasetSummary> filter_min_train(std::span<const DatasetSummary> datasets,
                                             std::size_t threshold = 1000);

// Balanced L-class Gaussian blobs in K dimensions: class means at the
// vertices of a seeded regular simplex with edge length `separation`, unit
// isotropic noise, then normalized to [0,1].
Dataset synth_blobs(int num_classes, std::size_t features, std::size_t samples, double separation,
                    const SeedSpec& seed);

// One dataset entry of a manifest file.
struct ManifestEntry {
  std::string name;
  std::string path;
  int label_column = -1;
  bool header = false;
  // Optional file with one fold id per sample row, overriding the seeded split.
  std::optional<std::string> folds_path;
};

// Manifest: JSON {"datasets": [{"name", "path", "label_column", "header", "folds"}...]}.
// Relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::string& path);

// Reads a predefined fold assignment (one non-negative integer per line).
std::vector<std::vector<std::size_t>> load_folds(const std::string& path, std::size_t expected_rows);

}  // namespace hdcdist
