#include "hdcdist/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "hdcdist/errors.hpp"

namespace hdcdist {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      cells.emplace_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.emplace_back(trim(cell));
  return cells;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

std::vector<std::size_t> Dataset::class_histogram() const {
  std::vector<std::size_t> hist(static_cast<std::size_t>(std::max(num_classes, 0)), 0);
  for (auto label : labels) {
    if (label >= 1 && label <= num_classes) ++hist[static_cast<std::size_t>(label - 1)];
  }
  return hist;
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(samples.rows()) != labels.size()) {
    throw InvalidDataset(name + ": sample and label counts differ");
  }
  if (num_classes < 2) throw InvalidDataset(name + ": needs at least two classes");
  for (auto label : labels) {
    if (label < 1 || label > num_classes) throw InvalidDataset(name + ": label out of range");
  }
}

Dataset load_csv(const std::string& path, int label_column, bool header) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("dataset file not found: '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw ParseError(path + ": row " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " columns, expected " + std::to_string(width));
    }
    if (width < 2) throw ParseError(path + ": need at least one feature and a label column");
    const int signed_width = static_cast<int>(width);
    const int label_idx = label_column < 0 ? signed_width + label_column : label_column;
    if (label_idx < 0 || label_idx >= signed_width) {
      throw InvalidParameter(path + ": label column " + std::to_string(label_column) + " out of range");
    }
    std::vector<double> features;
    features.reserve(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      if (static_cast<int>(c) == label_idx) continue;
      const auto v = parse_double(cells[c]);
      if (!v) {
        throw ParseError(path + ": non-numeric feature '" + cells[c] + "' at row " +
                         std::to_string(line_no) + ", column " + std::to_string(c + 1));
      }
      features.push_back(*v);
    }
    rows.push_back(std::move(features));
    raw_labels.push_back(cells[static_cast<std::size_t>(label_idx)]);
  }

  std::vector<std::string> distinct = raw_labels;
  std::ranges::sort(distinct);
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const bool numeric = std::ranges::all_of(distinct, [](const auto& s) { return parse_double(s).has_value(); });
  if (numeric) {
    std::ranges::stable_sort(distinct, {}, [](const auto& s) { return *parse_double(s); });
  }
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < distinct.size(); ++i) index[distinct[i]] = static_cast<int>(i) + 1;

  Dataset ds;
  ds.name = std::filesystem::path(path).stem().string();
  ds.num_classes = static_cast<int>(distinct.size());
  ds.class_names = distinct;
  ds.samples.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width == 0 ? 0 : width - 1));
  for (std::size_t m = 0; m < rows.size(); ++m) {
    for (std::size_t k = 0; k < rows[m].size(); ++k) {
      ds.samples(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = rows[m][k];
    }
    ds.labels.push_back(index.at(raw_labels[m]));
  }
  if (ds.num_classes < 2) throw InvalidDataset(path + ": file contains fewer than two classes");
  return ds;
}

std::vector<FeatureRange> fit_ranges(const Eigen::MatrixXd& samples, std::span<const std::size_t> rows) {
  std::vector<FeatureRange> ranges(static_cast<std::size_t>(samples.cols()));
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(static_cast<std::size_t>(samples.rows()));
    std::iota(all.begin(), all.end(), 0);
    rows = all;
  }
  if (rows.empty()) return ranges;
  for (Eigen::Index k = 0; k < samples.cols(); ++k) {
    double lo = samples(static_cast<Eigen::Index>(rows[0]), k);
    double hi = lo;
    for (auto r : rows) {
      const double v = samples(static_cast<Eigen::Index>(r), k);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    ranges[static_cast<std::size_t>(k)] = {lo, hi};
  }
  return ranges;
}

std::size_t apply_ranges(Eigen::MatrixXd& samples, const std::vector<FeatureRange>& ranges) {
  if (ranges.size() != static_cast<std::size_t>(samples.cols())) {
    throw DimensionError("apply_ranges: range count does not match feature count");
  }
  std::size_t clamped = 0;
  for (Eigen::Index k = 0; k < samples.cols(); ++k) {
    const auto [lo, hi] = ranges[static_cast<std::size_t>(k)];
    const double span = hi - lo;
    for (Eigen::Index m = 0; m < samples.rows(); ++m) {
      double& v = samples(m, k);
      if (span <= 0.0) {
        v = 0.5;
        continue;
      }
      double x = (v - lo) / span;
      if (x < 0.0 || x > 1.0) {
        ++clamped;
        x = std::clamp(x, 0.0, 1.0);
      }
      v = x;
    }
  }
  return clamped;
}

Dataset normalize(const Dataset& ds) {
  Dataset out = ds;
  out.feature_ranges = fit_ranges(ds.samples);
  apply_ranges(out.samples, out.feature_ranges);
  return out;
}

void SplitSpec::validate() const {
  if (mode == Mode::kHoldout && !(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidParameter("split: holdout fraction must lie in (0,1)");
  }
  if (mode == Mode::kKFold && folds < 2) throw InvalidParameter("split: k must be >= 2");
}

SplitResult split(const std::vector<ClassLabel>& labels, const SplitSpec& spec) {
  spec.validate();
  SplitResult result;
  Rng rng(spec.seed);

  // Groups of indices dealt out together: one group per class when
  // stratifying, a single group otherwise.
  std::vector<std::vector<std::size_t>> groups;
  bool stratified = spec.stratified;
  if (stratified) {
    std::map<ClassLabel, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (auto& [label, idx] : by_class) {
      if (idx.size() < 2) {
        result.warnings.push_back("class " + std::to_string(label) +
                                  " has fewer than 2 samples; split is unstratified");
        stratified = false;
      }
      groups.push_back(std::move(idx));
    }
  }
  if (!stratified) {
    groups.assign(1, std::vector<std::size_t>(labels.size()));
    std::iota(groups[0].begin(), groups[0].end(), 0);
  }
  for (auto& g : groups) rng.shuffle(g);

  if (spec.mode == SplitSpec::Mode::kHoldout) {
    result.parts.assign(2, {});
    for (const auto& g : groups) {
      const auto n_train = static_cast<std::size_t>(
          std::floor(spec.train_fraction * static_cast<double>(g.size()) + 0.5));
      result.parts[0].insert(result.parts[0].end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(n_train));
      result.parts[1].insert(result.parts[1].end(), g.begin() + static_cast<std::ptrdiff_t>(n_train), g.end());
    }
  } else {
    const auto k = static_cast<std::size_t>(spec.folds);
    result.parts.assign(k, {});
    std::size_t next = 0;
    for (const auto& g : groups) {
      for (auto idx : g) {
        result.parts[next].push_back(idx);
        next = (next + 1) % k;
      }
    }
  }
  for (auto& part : result.parts) std::ranges::sort(part);
  return result;
}

SplitResult split(const Dataset& ds, const SplitSpec& spec) { return split(ds.labels, spec); }

std::vector<DatasetSummary> filter_min_train(std::span<const DatasetSummary> datasets,
                                             std::size_t threshold) {
  std::vector<DatasetSummary> out;
  for (const auto& d : datasets) {
    if (d.train_size > threshold) out.push_back(d);
  }
  return out;
}

Dataset synth_blobs(int num_classes, std::size_t features, std::size_t samples, double separation,
                    const SeedSpec& seed) {
  if (num_classes < 1 || features < 1 || samples < 1) {
    throw InvalidParameter("synth_blobs: classes, features and samples must be >= 1");
  }
  if (!(separation >= 0.0)) throw InvalidParameter("synth_blobs: separation must be >= 0");
  const auto l = static_cast<Eigen::Index>(num_classes);
  const auto k = static_cast<Eigen::Index>(features);

  Rng basis_rng(seed.child("simplex"));
  // Regular simplex e_i - centroid has edge sqrt(2); embed with a random
  // orthonormal basis when K >= L, otherwise use random unit directions.
  Eigen::MatrixXd means(l, k);
  if (k >= l) {
    Eigen::MatrixXd gaussian(k, l);
    for (Eigen::Index c = 0; c < l; ++c)
      for (Eigen::Index r = 0; r < k; ++r) gaussian(r, c) = basis_rng.gaussian();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian).householderQ() *
                              Eigen::MatrixXd::Identity(k, l);
    Eigen::MatrixXd vertices = Eigen::MatrixXd::Identity(l, l);
    vertices.rowwise() -= Eigen::RowVectorXd::Constant(l, 1.0 / static_cast<double>(l));
    means = vertices * q.transpose() * (separation / std::sqrt(2.0));
  } else {
    for (Eigen::Index c = 0; c < l; ++c) {
      for (Eigen::Index r = 0; r < k; ++r) means(c, r) = basis_rng.gaussian();
      means.row(c) *= separation / (std::sqrt(2.0) * means.row(c).norm());
    }
  }

  Dataset ds;
  ds.name = "blobs";
  ds.num_classes = num_classes;
  for (int c = 1; c <= num_classes; ++c) ds.class_names.push_back(std::to_string(c));
  std::vector<ClassLabel> labels(samples);
  for (std::size_t m = 0; m < samples; ++m) labels[m] = static_cast<ClassLabel>(m % static_cast<std::size_t>(num_classes)) + 1;
  Rng noise_rng(seed.child("samples"));
  noise_rng.shuffle(labels);
  ds.samples.resize(static_cast<Eigen::Index>(samples), k);
  for (std::size_t m = 0; m < samples; ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    for (Eigen::Index r = 0; r < k; ++r) {
      ds.samples(row, r) = means(labels[m] - 1, r) + noise_rng.gaussian();
    }
  }
  ds.labels = std::move(labels);
  return normalize(ds);
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("manifest not found: '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };
  std::vector<ManifestEntry> out;
  try {
    for (const auto& item : doc.at("datasets")) {
      ManifestEntry e;
      e.path = resolve(item.at("path").get<std::string>());
      e.name = item.value("name", std::filesystem::path(e.path).stem().string());
      e.label_column = item.value("label_column", -1);
      e.header = item.value("header", false);
      if (item.contains("folds")) e.folds_path = resolve(item.at("folds").get<std::string>());
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return out;
}

std::vector<std::vector<std::size_t>> load_folds(const std::string& path, std::size_t expected_rows) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("fold file not found: '" + path + "'");
  std::vector<std::vector<std::size_t>> folds;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto cell = trim(line);
    if (cell.empty()) continue;
    const auto v = parse_double(cell);
    if (!v || *v < 0 || std::floor(*v) != *v) {
      throw ParseError(path + ": invalid fold id at line " + std::to_string(row + 1));
    }
    const auto fold = static_cast<std::size_t>(*v);
    if (fold >= folds.size()) folds.resize(fold + 1);
    folds[fold].push_back(row++);
  }
  if (row != expected_rows) {
    throw ParseError(path + ": " + std::to_string(row) + " fold ids for " +
                     std::to_string(expected_rows) + " rows");
  }
  if (folds.size() < 2) throw ParseError(path + ": need at least two folds");
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (folds[f].empty()) throw ParseError(path + ": fold " + std::to_string(f) + " is empty");
  }
  return folds;
}

}  // namespace hdcdist
