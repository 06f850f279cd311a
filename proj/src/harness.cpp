#include "hdcdist/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ranges>
#include <set>
#include <sstream>
#include <tuple>

#include "hdcdist/errors.hpp"

namespace hdcdist {
namespace {

using nlohmann::json;

struct LoadedDataset {
  Dataset data;
  std::optional<std::vector<std::vector<std::size_t>>> folds;
};

std::vector<LoadedDataset> load_datasets(const ExperimentConfig& config) {
  std::vector<LoadedDataset> out;
  if (config.dataset_path) {
    out.push_back({load_csv(*config.dataset_path, config.label_column, config.header), std::nullopt});
  } else if (config.manifest_path) {
    for (const auto& entry : load_manifest(*config.manifest_path)) {
      LoadedDataset ld{load_csv(entry.path, entry.label_column, entry.header), std::nullopt};
      ld.data.name = entry.name;
      if (entry.folds_path) ld.folds = load_folds(*entry.folds_path, ld.data.size());
      out.push_back(std::move(ld));
    }
  } else if (config.synthetic) {
    const auto& s = *config.synthetic;
    out.push_back({synth_blobs(s.classes, s.features, s.samples, s.separation, SeedSpec(s.seed)), std::nullopt});
  }
  return out;
}

std::size_t holdout_train_size(const Dataset& ds, const SeedSpec& seed) {
  SplitSpec spec;
  spec.mode = SplitSpec::Mode::kHoldout;
  spec.train_fraction = 0.5;
  spec.seed = seed;
  return split(ds, spec).parts[0].size();
}

ActivationMatrix rows_of(const Eigen::MatrixXd& encoded, const Dataset& ds, const std::vector<std::size_t>& idx) {
  ActivationMatrix out;
  out.num_classes = ds.num_classes;
  out.rows.resize(static_cast<Eigen::Index>(idx.size()), encoded.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.rows.row(static_cast<Eigen::Index>(i)) = encoded.row(static_cast<Eigen::Index>(idx[i]));
    out.labels.push_back(ds.labels[idx[i]]);
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += format_double(xs[i]);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> parse_csv_row(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else if (c != '\r') {
      cells.back() += c;
    }
  }
  return cells;
}

struct Selector {
  std::string version;
  bool compression = false;
  std::string classifier;
  std::optional<std::size_t> agents;
};

Selector parse_selector(const std::string& text) {
  Selector sel;
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw InvalidParameter("selector '" + text + "' must look like version/classifier[@N]");
  std::string version = text.substr(0, slash);
  std::string rest = text.substr(slash + 1);
  if (const auto at = rest.find('@'); at != std::string::npos) {
    sel.agents = static_cast<std::size_t>(std::stoul(rest.substr(at + 1)));
    rest = rest.substr(0, at);
  }
  if (version.ends_with("+hrr")) {
    sel.compression = true;
    version.resize(version.size() - 4);
  }
  sel.version = version;
  sel.classifier = rest == "centroids" ? "centroid" : rest;
  return sel;
}

bool matches(const ResultRecord& r, const Selector& s) {
  if (r.version != s.version || r.classifier != s.classifier || r.compression != s.compression) return false;
  return r.version == "centralized" || !s.agents || r.agents == *s.agents;
}

double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

GridSpec GridSpec::defaults() {
  GridSpec g;
  for (std::size_t d = 50; d <= 1500; d += 50) g.dims.push_back(d);
  for (int e = -10; e <= 5; ++e) g.lambdas.push_back(std::ldexp(1.0, e));
  g.kappas = {1, 3, 7, 15};
  return g;
}

bool GridSpec::contains(std::size_t dim, double lambda, int kappa) const {
  if (dims.empty() || lambdas.empty() || kappas.empty()) return false;
  const auto [dlo, dhi] = std::ranges::minmax(dims);
  const auto [llo, lhi] = std::ranges::minmax(lambdas);
  const auto [klo, khi] = std::ranges::minmax(kappas);
  return dim >= dlo && dim <= dhi && lambda >= llo && lambda <= lhi && kappa >= klo && kappa <= khi;
}

GridResult grid_search(const Dataset& ds, const GridSpec& grid, const SeedSpec& seed, SelectionMode mode) {
  ds.validate();
  if (grid.size() == 0) throw InvalidParameter("grid_search: empty grid");

  SplitSpec spec;
  spec.seed = seed.child("selection");
  if (mode == SelectionMode::kHoldout) {
    spec.mode = SplitSpec::Mode::kHoldout;
    spec.train_fraction = 0.5;
  } else {
    spec.mode = SplitSpec::Mode::kKFold;
    spec.folds = 4;
  }
  const auto parts = split(ds, spec).parts;
  // (train, validation) pairs.
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> rounds;
  if (mode == SelectionMode::kHoldout) {
    rounds.emplace_back(parts[0], parts[1]);
  } else {
    for (std::size_t f = 0; f < parts.size(); ++f) {
      std::vector<std::size_t> train;
      for (std::size_t g = 0; g < parts.size(); ++g) {
        if (g != f) train.insert(train.end(), parts[g].begin(), parts[g].end());
      }
      std::ranges::sort(train);
      rounds.emplace_back(std::move(train), parts[f]);
    }
  }
  std::vector<Eigen::MatrixXd> normalized;
  for (const auto& [train, val] : rounds) {
    Eigen::MatrixXd x = ds.samples;
    apply_ranges(x, fit_ranges(ds.samples, train));
    normalized.push_back(std::move(x));
  }

  GridResult result;
  bool have_best = false;
  auto better = [&](double acc, const Hyperparameters& h) {
    if (!have_best || acc > result.accuracy) return true;
    if (acc < result.accuracy) return false;
    return std::tie(h.dim, h.lambda, h.kappa) <
           std::tie(result.best.dim, result.best.lambda, result.best.kappa);
  };

  for (auto dim : grid.dims) {
    const auto projection = init_projection(ds.features(), dim, seed.child("projection", 0));
    for (auto kappa : grid.kappas) {
      std::vector<std::pair<ActivationMatrix, ActivationMatrix>> encoded;
      for (std::size_t r = 0; r < rounds.size(); ++r) {
        const auto h = encode_batch(normalized[r], projection, kappa);
        encoded.emplace_back(rows_of(h, ds, rounds[r].first), rows_of(h, ds, rounds[r].second));
      }
      for (auto lambda : grid.lambdas) {
        double acc = 0.0;
        for (const auto& [train, val] : encoded) acc += evaluate(train_rls(train, lambda), val);
        acc /= static_cast<double>(encoded.size());
        ++result.evaluated;
        const Hyperparameters h{dim, lambda, kappa};
        if (better(acc, h)) {
          result.best = h;
          result.accuracy = acc;
          have_best = true;
        }
      }
    }
  }
  return result;
}

void ExperimentConfig::validate() const {
  const int sources = static_cast<int>(dataset_path.has_value()) + static_cast<int>(manifest_path.has_value()) +
                      static_cast<int>(synthetic.has_value());
  if (sources != 1) throw InvalidParameter("config: give exactly one of dataset, manifest, synthetic");
  if (versions.empty()) throw InvalidParameter("config: no versions to run");
  for (const auto& v : versions) v.validate();
  if (agent_counts.empty()) throw InvalidParameter("config: no agent counts");
  for (auto n : agent_counts) {
    if (n < 1) throw InvalidParameter("config: agent count must be >= 1");
  }
  if (seeds < 1) throw InvalidParameter("config: seeds must be >= 1");
  if (folds < 2) throw InvalidParameter("config: folds must be >= 2");
  if (hyper.dim < 1 || hyper.kappa < 1 || !(hyper.lambda >= 0.0)) {
    throw InvalidParameter("config: need dim >= 1, kappa >= 1, lambda >= 0");
  }
  if (!use_grid && !allow_off_grid && !grid.contains(hyper.dim, hyper.lambda, hyper.kappa)) {
    throw InvalidParameter("config: fixed hyperparameters lie outside the grid ranges (set allow_off_grid)");
  }
}

ExperimentConfig config_from_json(const json& doc) {
  static const std::set<std::string> known = {
      "dataset", "manifest", "synthetic", "label_column", "header", "version", "classifier",
      "compress", "agents", "seeds", "seed", "dim", "lambda", "kappa", "grid", "select",
      "allow_off_grid", "min_train", "folds", "full_test", "inverse", "timing",
      "grid_dims", "grid_lambdas", "grid_kappas"};
  if (!doc.is_object()) throw ParseError("config: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ParseError("config: unknown key '" + key + "'");
  }
  auto as_list = [&](const char* key, const json& fallback) {
    const json v = doc.value(key, fallback);
    return v.is_array() ? v : json::array({v});
  };

  ExperimentConfig c;
  try {
    if (doc.contains("dataset")) c.dataset_path = doc.at("dataset").get<std::string>();
    if (doc.contains("manifest")) c.manifest_path = doc.at("manifest").get<std::string>();
    if (doc.contains("synthetic")) {
      const auto& s = doc.at("synthetic");
      SyntheticSpec spec;
      spec.classes = s.value("classes", spec.classes);
      spec.features = s.value("features", spec.features);
      spec.samples = s.value("samples", spec.samples);
      spec.separation = s.value("separation", spec.separation);
      spec.seed = s.value("seed", spec.seed);
      c.synthetic = spec;
    }
    c.label_column = doc.value("label_column", c.label_column);
    c.header = doc.value("header", c.header);
    const bool compress = doc.value("compress", false);
    for (const auto& v : as_list("version", "centralized")) {
      std::string name = v.get<std::string>();
      bool hrr = false;
      if (name.ends_with("+hrr")) {
        hrr = true;
        name.resize(name.size() - 4);
      }
      const auto kind = version_kind_from_string(name);
      for (const auto& clf : as_list("classifier", "rls")) {
        c.versions.push_back({kind, (hrr || compress) && kind == VersionKind::kDistributed,
                              classifier_kind_from_string(clf.get<std::string>())});
        if (hrr && kind != VersionKind::kDistributed) {
          throw InvalidParameter("config: '+hrr' applies to the distributed version only");
        }
      }
    }
    if (compress && std::ranges::none_of(c.versions, [](const auto& v) { return v.compression; })) {
      throw InvalidParameter("config: compress requires the distributed version");
    }
    c.agent_counts.clear();
    for (const auto& n : as_list("agents", 1)) c.agent_counts.push_back(n.get<std::size_t>());
    c.seeds = doc.value("seeds", c.seeds);
    c.master_seed = doc.value("seed", c.master_seed);
    c.hyper.dim = doc.value("dim", c.hyper.dim);
    c.hyper.lambda = doc.value("lambda", c.hyper.lambda);
    c.hyper.kappa = doc.value("kappa", c.hyper.kappa);
    c.use_grid = doc.value("grid", c.use_grid);
    const std::string select = doc.value("select", std::string("holdout"));
    if (select == "holdout") {
      c.selection = SelectionMode::kHoldout;
    } else if (select == "cv") {
      c.selection = SelectionMode::kCrossValidated;
    } else {
      throw InvalidParameter("config: select must be 'holdout' or 'cv'");
    }
    c.allow_off_grid = doc.value("allow_off_grid", c.allow_off_grid);
    c.min_train = doc.value("min_train", c.min_train);
    c.folds = doc.value("folds", c.folds);
    c.full_test_eval = doc.value("full_test", c.full_test_eval);
    const std::string inverse = doc.value("inverse", std::string("involution"));
    if (inverse == "involution") {
      c.inverse_mode = InverseMode::kInvolution;
    } else if (inverse == "exact") {
      c.inverse_mode = InverseMode::kExact;
    } else {
      throw InvalidParameter("config: inverse must be 'involution' or 'exact'");
    }
    c.record_timing = doc.value("timing", c.record_timing);
    if (doc.contains("grid_dims")) c.grid.dims = doc.at("grid_dims").get<std::vector<std::size_t>>();
    if (doc.contains("grid_lambdas")) c.grid.lambdas = doc.at("grid_lambdas").get<std::vector<double>>();
    if (doc.contains("grid_kappas")) c.grid.kappas = doc.at("grid_kappas").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json doc;
  if (c.dataset_path) doc["dataset"] = *c.dataset_path;
  if (c.manifest_path) doc["manifest"] = *c.manifest_path;
  if (c.synthetic) {
    doc["synthetic"] = {{"classes", c.synthetic->classes},
                        {"features", c.synthetic->features},
                        {"samples", c.synthetic->samples},
                        {"separation", c.synthetic->separation},
                        {"seed", c.synthetic->seed}};
  }
  doc["label_column"] = c.label_column;
  doc["header"] = c.header;
  json versions = json::array();
  json classifiers = json::array();
  for (const auto& v : c.versions) {
    const std::string name = std::string(to_string(v.kind)) + (v.compression ? "+hrr" : "");
    if (std::ranges::find(versions, json(name)) == versions.end()) versions.push_back(name);
    if (std::ranges::find(classifiers, json(to_string(v.classifier))) == classifiers.end()) {
      classifiers.push_back(to_string(v.classifier));
    }
  }
  doc["version"] = versions;
  doc["classifier"] = classifiers;
  doc["agents"] = c.agent_counts;
  doc["seeds"] = c.seeds;
  doc["seed"] = c.master_seed;
  doc["dim"] = c.hyper.dim;
  doc["lambda"] = c.hyper.lambda;
  doc["kappa"] = c.hyper.kappa;
  doc["grid"] = c.use_grid;
  doc["select"] = c.selection == SelectionMode::kHoldout ? "holdout" : "cv";
  doc["allow_off_grid"] = c.allow_off_grid;
  doc["min_train"] = c.min_train;
  doc["folds"] = c.folds;
  doc["full_test"] = c.full_test_eval;
  doc["inverse"] = c.inverse_mode == InverseMode::kExact ? "exact" : "involution";
  doc["timing"] = c.record_timing;
  doc["grid_dims"] = c.grid.dims;
  doc["grid_lambdas"] = c.grid.lambdas;
  doc["grid_kappas"] = c.grid.kappas;
  return doc;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("config not found: '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  auto config = config_from_json(doc);
  // Dataset paths in a config file are relative to the file.
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::optional<std::string>& p) {
    if (p && std::filesystem::path(*p).is_relative()) p = (base / *p).string();
  };
  resolve(config.dataset_path);
  resolve(config.manifest_path);
  return config;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_to_json(config).dump())));
  return buf;
}

json to_json(const ResultRecord& r) {
  json j = {{"dataset", r.dataset},
            {"version", r.version},
            {"agents", r.agents},
            {"classifier", r.classifier},
            {"compression", r.compression},
            {"dim", r.hyper.dim},
            {"lambda", r.hyper.lambda},
            {"kappa", r.hyper.kappa},
            {"per_seed_accuracy", r.per_seed_accuracy},
            {"mean", r.mean},
            {"std", r.stddev},
            {"per_agent_accuracy", r.per_agent_accuracy},
            {"payload_values_per_producer", r.payload_values_per_producer},
            {"payload_bytes", r.payload_bytes},
            {"clamped_test_values", r.clamped_test_values},
            {"config_hash", r.config_hash},
            {"warnings", r.warnings}};
  if (r.wall_time_s) j["wall_time_s"] = *r.wall_time_s;
  return j;
}

ResultRecord record_from_json(const json& j) {
  ResultRecord r;
  try {
    r.dataset = j.at("dataset").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.agents = j.at("agents").get<std::size_t>();
    r.classifier = j.at("classifier").get<std::string>();
    r.compression = j.at("compression").get<bool>();
    r.hyper.dim = j.at("dim").get<std::size_t>();
    r.hyper.lambda = j.at("lambda").get<double>();
    r.hyper.kappa = j.at("kappa").get<int>();
    r.per_seed_accuracy = j.at("per_seed_accuracy").get<std::vector<double>>();
    r.mean = j.at("mean").get<double>();
    r.stddev = j.at("std").get<double>();
    r.per_agent_accuracy = j.at("per_agent_accuracy").get<std::vector<double>>();
    r.payload_values_per_producer = j.at("payload_values_per_producer").get<std::size_t>();
    r.payload_bytes = j.at("payload_bytes").get<std::size_t>();
    r.clamped_test_values = j.value("clamped_test_values", std::size_t{0});
    r.config_hash = j.value("config_hash", std::string());
    r.warnings = j.value("warnings", std::vector<std::string>{});
    if (j.contains("wall_time_s")) r.wall_time_s = j.at("wall_time_s").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("result record: ") + e.what());
  }
  return r;
}

bool record_less(const ResultRecord& a, const ResultRecord& b) {
  auto rank = [](const std::string& v) { return v == "centralized" ? 0 : (v == "local" ? 1 : 2); };
  return std::make_tuple(a.dataset, rank(a.version), a.agents, a.classifier, a.compression) <
         std::make_tuple(b.dataset, rank(b.version), b.agents, b.classifier, b.compression);
}

std::vector<ResultRecord> run_suite(const ExperimentConfig& config) {
  config.validate();
  const std::string hash = config_hash(config);
  const SeedSpec root(config.master_seed);
  std::vector<ResultRecord> records;

  for (auto& loaded : load_datasets(config)) {
    const Dataset& ds = loaded.data;
    ds.validate();
    Hyperparameters hyper = config.hyper;
    if (config.use_grid) hyper = grid_search(ds, config.grid, root.child("grid"), config.selection).best;
    const bool large_enough = config.min_train == 0 || holdout_train_size(ds, root.child("grid").child("selection")) > config.min_train;

    for (const auto& version : config.versions) {
      const bool centralized = version.kind == VersionKind::kCentralized;
      if (!centralized && !large_enough) continue;
      const std::vector<std::size_t> counts = centralized ? std::vector<std::size_t>{1} : config.agent_counts;
      for (auto n : counts) {
        RunConfig run;
        run.dim = hyper.dim;
        run.lambda = hyper.lambda;
        run.kappa = hyper.kappa;
        run.agents = n;
        run.seeds = config.seeds;
        run.master_seed = config.master_seed;
        run.folds = config.folds;
        run.full_test_eval = config.full_test_eval;
        run.inverse_mode = config.inverse_mode;
        run.predefined_folds = loaded.folds;

        const auto start = std::chrono::steady_clock::now();
        VersionResult vr;
        try {
          vr = run_version(version, ds, run);
        } catch (const std::exception& e) {
          throw Error("suite aborted on dataset '" + ds.name + "', " + version.label() + ", N=" +
                      std::to_string(n) + ": " + e.what());
        }
        ResultRecord r;
        r.dataset = ds.name;
        r.version = to_string(version.kind);
        r.agents = n;
        r.classifier = to_string(version.classifier);
        r.compression = version.compression;
        r.hyper = hyper;
        r.per_seed_accuracy = vr.per_seed_accuracy;
        r.mean = vr.mean;
        r.stddev = vr.stddev;
        r.per_agent_accuracy = vr.per_agent_accuracy;
        r.payload_values_per_producer = vr.payload_values_per_producer;
        r.payload_bytes = vr.payload_bytes_per_round;
        r.clamped_test_values = vr.clamped_test_values;
        r.config_hash = hash;
        r.warnings = vr.warnings;
        if (config.record_timing) {
          r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        records.push_back(std::move(r));
      }
    }
  }
  std::ranges::stable_sort(records, record_less);
  return records;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidParameter("pearson: length mismatch");
  if (xs.size() < 2) throw InvalidParameter("pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::map<std::size_t, double> relative_improvement(std::span<const ResultRecord> records,
                                                   const std::string& classifier, bool compressed) {
  std::map<std::size_t, std::map<std::string, double>> local, distr;
  for (const auto& r : records) {
    if (r.classifier != classifier) continue;
    if (r.version == "local") local[r.agents][r.dataset] = r.mean;
    if (r.version == "distributed" && r.compression == compressed) distr[r.agents][r.dataset] = r.mean;
  }
  std::set<std::size_t> counts;
  for (const auto& [n, m] : local) counts.insert(n);
  for (const auto& [n, m] : distr) counts.insert(n);
  if (counts.empty()) throw PairingError("relative_improvement: no local/distributed records");

  std::map<std::size_t, double> out;
  for (auto n : counts) {
    const auto& l = local[n];
    const auto& d = distr[n];
    if (l.size() != d.size() || !std::ranges::equal(l | std::views::keys, d | std::views::keys)) {
      throw PairingError("relative_improvement: local and distributed records do not pair up at N=" +
                         std::to_string(n));
    }
    double lm = 0.0, dm = 0.0;
    for (const auto& [name, v] : l) lm += v;
    for (const auto& [name, v] : d) dm += v;
    lm /= static_cast<double>(l.size());
    dm /= static_cast<double>(d.size());
    out[n] = 100.0 * (dm - lm) / lm;
  }
  return out;
}

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "jsonl") return ReportFormat::kJsonl;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "table") return ReportFormat::kTable;
  throw InvalidParameter("unknown report format '" + name + "'");
}

std::string render_jsonl(std::span<const ResultRecord> records) {
  std::vector<ResultRecord> sorted(records.begin(), records.end());
  std::ranges::stable_sort(sorted, record_less);
  std::string out;
  for (const auto& r : sorted) out += to_json(r).dump() + "\n";
  return out;
}

std::string render_csv(std::span<const ResultRecord> records) {
  std::vector<ResultRecord> sorted(records.begin(), records.end());
  std::ranges::stable_sort(sorted, record_less);
  std::string out =
      "dataset,version,agents,classifier,compression,dim,lambda,kappa,mean,std,per_seed_accuracy,"
      "per_agent_accuracy,payload_values_per_producer,payload_bytes,clamped_test_values,config_hash\n";
  for (const auto& r : sorted) {
    out += csv_field(r.dataset) + "," + r.version + "," + std::to_string(r.agents) + "," + r.classifier + "," +
           (r.compression ? "1" : "0") + "," + std::to_string(r.hyper.dim) + "," + format_double(r.hyper.lambda) +
           "," + std::to_string(r.hyper.kappa) + "," + format_double(r.mean) + "," + format_double(r.stddev) + "," +
           join_doubles(r.per_seed_accuracy) + "," + join_doubles(r.per_agent_accuracy) + "," +
           std::to_string(r.payload_values_per_producer) + "," + std::to_string(r.payload_bytes) + "," +
           std::to_string(r.clamped_test_values) + "," + r.config_hash + "\n";
  }
  return out;
}

std::vector<ResultRecord> parse_csv_records(const std::string& content) {
  std::stringstream in(content);
  std::string line;
  std::vector<ResultRecord> out;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (line.empty()) continue;
    const auto c = parse_csv_row(line);
    if (c.size() != 16) throw ParseError("result CSV: expected 16 columns, got " + std::to_string(c.size()));
    ResultRecord r;
    r.dataset = c[0];
    r.version = c[1];
    r.agents = std::stoul(c[2]);
    r.classifier = c[3];
    r.compression = c[4] == "1";
    r.hyper = {std::stoul(c[5]), std::stod(c[6]), std::stoi(c[7])};
    r.mean = std::stod(c[8]);
    r.stddev = std::stod(c[9]);
    r.per_seed_accuracy = split_doubles(c[10]);
    r.per_agent_accuracy = split_doubles(c[11]);
    r.payload_values_per_producer = std::stoul(c[12]);
    r.payload_bytes = std::stoul(c[13]);
    r.clamped_test_values = std::stoul(c[14]);
    r.config_hash = c[15];
    out.push_back(std::move(r));
  }
  return out;
}

std::string render_table(std::span<const ResultRecord> records) {
  std::set<std::size_t> columns;
  bool have_central = false;
  for (const auto& r : records) {
    if (r.version == "centralized") {
      have_central = true;
    } else {
      columns.insert(r.agents);
    }
  }
  if (have_central) columns.insert(1);

  auto cell = [&](const std::string& classifier, const std::string& version, bool compression, std::size_t n) {
    std::vector<double> means;
    for (const auto& r : records) {
      if (r.classifier == classifier && r.version == version && r.compression == compression && r.agents == n) {
        means.push_back(r.mean);
      }
    }
    if (means.empty() && n == 1 && !compression) {
      for (const auto& r : records) {
        if (r.classifier == classifier && r.version == "centralized") means.push_back(r.mean);
      }
    }
    if (means.empty()) return std::string("-");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", mean_of(means));
    return std::string(buf);
  };
  const bool have_hrr = std::ranges::any_of(records, [](const auto& r) { return r.compression; });

  std::string out = "| Classifier | Version |";
  for (auto n : columns) out += " N=" + std::to_string(n) + " |";
  out += "\n|---|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
  out += "\n";
  const std::vector<std::tuple<std::string, std::string, bool>> rows = {
      {"Local", "local", false}, {"Distr", "distributed", false}, {"Distr+HRR", "distributed", true}};
  for (const auto& [label, classifier] : {std::pair{"Cent.", "centroid"}, std::pair{"RLS", "rls"}}) {
    if (std::ranges::none_of(records, [&](const auto& r) { return r.classifier == classifier; })) continue;
    for (const auto& [row_label, version, compression] : rows) {
      if (compression && !have_hrr) continue;
      out += std::string("| ") + label + " | " + row_label + " |";
      for (auto n : columns) out += " " + cell(classifier, version, compression, n) + " |";
      out += "\n";
    }
  }
  return out;
}

std::string render_scatter(std::span<const ResultRecord> records, const std::string& x_selector,
                           const std::string& y_selector, std::vector<std::string>* warnings) {
  const auto xs = parse_selector(x_selector);
  const auto ys = parse_selector(y_selector);
  std::map<std::string, double> x_values, y_values;
  for (const auto& r : records) {
    if (matches(r, xs)) x_values[r.dataset] = r.mean;
    if (matches(r, ys)) y_values[r.dataset] = r.mean;
  }
  std::string out = "dataset," + x_selector + "," + y_selector + "\n";
  for (const auto& [name, x] : x_values) {
    const auto it = y_values.find(name);
    if (it == y_values.end()) {
      if (warnings) warnings->push_back("dataset '" + name + "' missing under " + y_selector);
      continue;
    }
    out += csv_field(name) + "," + format_double(x) + "," + format_double(it->second) + "\n";
  }
  for (const auto& [name, y] : y_values) {
    if (!x_values.contains(name) && warnings) warnings->push_back("dataset '" + name + "' missing under " + x_selector);
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_report(const std::string& path, std::span<const ResultRecord> records, ReportFormat format) {
  if (records.empty()) throw InvalidParameter("report: no records");
  std::string content;
  switch (format) {
    case ReportFormat::kJsonl: content = render_jsonl(records); break;
    case ReportFormat::kCsv: content = render_csv(records); break;
    case ReportFormat::kTable: content = render_table(records); break;
  }
  write_text(path, content);
}

std::vector<ResultRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("results file not found: '" + path + "'");
  std::vector<ResultRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
  return out;
}

}  // namespace hdcdist
