// hdcdist: grid search, experiment runs and reports for distributed HDC/RVFL
// classifiers. See README.md for usage.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hdcdist/errors.hpp"
#include "hdcdist/harness.hpp"

namespace {

using nlohmann::json;
using namespace hdcdist;

struct SourceFlags {
  std::string dataset;
  std::string manifest;
  bool synthetic = false;
  int synth_classes = 3;
  std::size_t synth_features = 10;
  std::size_t synth_samples = 6000;
  double synth_separation = 3.0;
  std::uint64_t synth_seed = 7;
  int label_column = -1;
  bool header = false;
  std::string config;
};

void add_source_flags(CLI::App* app, SourceFlags& f) {
  app->add_option("--dataset", f.dataset, "CSV dataset (numeric features, one label column)");
  app->add_option("--manifest", f.manifest, "JSON manifest listing datasets");
  app->add_flag("--synthetic", f.synthetic, "use Gaussian blobs instead of a file");
  app->add_option("--synth-classes", f.synth_classes, "blob classes");
  app->add_option("--synth-features", f.synth_features, "blob features");
  app->add_option("--synth-samples", f.synth_samples, "blob samples");
  app->add_option("--synth-separation", f.synth_separation, "distance between class means");
  app->add_option("--synth-seed", f.synth_seed, "blob generator seed");
  app->add_option("--label-column", f.label_column, "label column index, -1 for last");
  app->add_flag("--header", f.header, "CSV has a header row");
  app->add_option("--config", f.config, "JSON config file; explicit flags override it");
}

// Starts from the config file (paths made absolute) and overlays every flag
// the user gave explicitly.
json base_doc(const CLI::App* app, const SourceFlags& f) {
  json doc = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw NotFoundError("config not found: '" + f.config + "'");
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw ParseError(f.config + ": " + e.what());
    }
    const auto base = std::filesystem::path(f.config).parent_path();
    for (const char* key : {"dataset", "manifest"}) {
      if (doc.contains(key) && std::filesystem::path(doc[key].get<std::string>()).is_relative()) {
        doc[key] = (base / doc[key].get<std::string>()).string();
      }
    }
  }
  auto given = [&](const char* name) { return app->count(name) > 0; };
  auto set_source = [&](const char* key, json value) {
    doc.erase("dataset");
    doc.erase("manifest");
    doc.erase("synthetic");
    doc[key] = std::move(value);
  };
  if (given("--dataset")) set_source("dataset", f.dataset);
  if (given("--manifest")) set_source("manifest", f.manifest);
  const bool synth_tuned = given("--synth-classes") || given("--synth-features") || given("--synth-samples") ||
                           given("--synth-separation") || given("--synth-seed");
  if (f.synthetic || synth_tuned) {
    json s = doc.contains("synthetic") ? doc["synthetic"] : json::object();
    if (f.synthetic || given("--synth-classes")) s["classes"] = f.synth_classes;
    if (f.synthetic || given("--synth-features")) s["features"] = f.synth_features;
    if (f.synthetic || given("--synth-samples")) s["samples"] = f.synth_samples;
    if (f.synthetic || given("--synth-separation")) s["separation"] = f.synth_separation;
    if (f.synthetic || given("--synth-seed")) s["seed"] = f.synth_seed;
    set_source("synthetic", s);
  }
  if (given("--label-column")) doc["label_column"] = f.label_column;
  if (given("--header")) doc["header"] = true;
  return doc;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_text(out_path, content);
  }
}

std::string render(std::span<const ResultRecord> records, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJsonl: return render_jsonl(records);
    case ReportFormat::kCsv: return render_csv(records);
    case ReportFormat::kTable: return render_table(records);
  }
  return {};
}

std::vector<ResultRecord> read_results(const std::string& path) {
  if (path.ends_with(".csv")) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("results file not found: '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv_records(ss.str());
  }
  return read_jsonl(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed HDC/RVFL classifiers with one-shot HRR-compressed aggregation"};
  app.require_subcommand(1);

  // grid
  SourceFlags grid_src;
  std::uint64_t grid_seed = 1;
  std::string grid_select = "holdout";
  std::string grid_out;
  auto* grid = app.add_subcommand("grid", "select (D, lambda, kappa) with centralized RLS");
  add_source_flags(grid, grid_src);
  grid->add_option("--seed", grid_seed, "master seed");
  grid->add_option("--select", grid_select, "holdout | cv")->check(CLI::IsMember({"holdout", "cv"}));
  grid->add_option("--out", grid_out, "write the selection JSON here instead of stdout");

  // run
  SourceFlags run_src;
  std::vector<std::string> versions;
  std::vector<std::string> classifiers;
  bool compress = false;
  std::vector<std::size_t> agents;
  std::size_t seeds = 10;
  std::uint64_t seed = 1;
  std::size_t dim = 500;
  double lambda = 1.0;
  int kappa = 7;
  bool use_grid = false;
  std::string select = "holdout";
  bool allow_off_grid = false;
  std::size_t min_train = 0;
  int folds = 4;
  bool full_test = false;
  std::string inverse = "involution";
  bool timing = false;
  std::string run_out;
  std::string run_format = "jsonl";
  auto* run = app.add_subcommand("run", "run experiment versions over seeds, datasets and agent counts");
  add_source_flags(run, run_src);
  run->add_option("--version", versions, "centralized | local | distributed (repeatable)")
      ->check(CLI::IsMember({"centralized", "local", "distributed", "distributed+hrr"}));
  run->add_option("--classifier", classifiers, "rls | centroid (repeatable)")
      ->check(CLI::IsMember({"rls", "centroid"}));
  run->add_flag("--compress", compress, "HRR-compress distributed exchanges");
  run->add_option("--agents", agents, "agent counts N (repeatable)");
  run->add_option("--seeds", seeds, "number of projection seeds");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--dim", dim, "hypervector dimension D");
  run->add_option("--lambda", lambda, "RLS regularization");
  run->add_option("--kappa", kappa, "clipping threshold");
  run->add_flag("--grid", use_grid, "select D, lambda, kappa per dataset by grid search");
  run->add_option("--select", select, "holdout | cv")->check(CLI::IsMember({"holdout", "cv"}));
  run->add_flag("--allow-off-grid", allow_off_grid, "accept fixed hyperparameters outside the grid ranges");
  run->add_option("--min-train", min_train, "skip local/distributed runs with <= this many training rows");
  run->add_option("--folds", folds, "cross-validation folds");
  run->add_flag("--full-test", full_test, "score each agent on the full test fold");
  run->add_option("--inverse", inverse, "HRR key inverse: involution | exact")
      ->check(CLI::IsMember({"involution", "exact"}));
  run->add_flag("--timing", timing, "record wall time per record");
  run->add_option("--out", run_out, "output file (stdout when omitted)");
  run->add_option("--format", run_format, "jsonl | csv | table")->check(CLI::IsMember({"jsonl", "csv", "table"}));

  // report
  std::string report_in;
  std::string report_out;
  std::string report_format = "table";
  std::vector<std::string> scatter;
  bool improvement = false;
  auto* report = app.add_subcommand("report", "render results as a table, CSV, scatter or improvement summary");
  report->add_option("results", report_in, "results file (.jsonl or .csv)")->required();
  report->add_option("--out", report_out, "output file (stdout when omitted)");
  report->add_option("--format", report_format, "table | csv | jsonl")->check(CLI::IsMember({"jsonl", "csv", "table"}));
  report->add_option("--scatter", scatter, "two selectors X Y, e.g. centralized/rls local/rls@10")->expected(2);
  report->add_flag("--improvement", improvement, "relative improvement of distributed over local per N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*grid) {
      json doc = base_doc(grid, grid_src);
      doc["grid"] = true;
      doc["seed"] = grid_seed;
      const auto config = config_from_json(doc);
      const auto loaded = [&] {
        if (config.dataset_path) return std::vector<Dataset>{load_csv(*config.dataset_path, config.label_column, config.header)};
        if (config.synthetic) {
          const auto& s = *config.synthetic;
          return std::vector<Dataset>{synth_blobs(s.classes, s.features, s.samples, s.separation, SeedSpec(s.seed))};
        }
        std::vector<Dataset> out;
        for (const auto& e : load_manifest(*config.manifest_path)) {
          out.push_back(load_csv(e.path, e.label_column, e.header));
          out.back().name = e.name;
        }
        return out;
      }();
      const auto mode = grid_select == "cv" ? SelectionMode::kCrossValidated : SelectionMode::kHoldout;
      std::string lines;
      for (const auto& ds : loaded) {
        // Same seed path run_suite uses, so `run --grid` picks the same triple.
        const auto r = grid_search(ds, config.grid, SeedSpec(grid_seed).child("grid"), mode);
        lines += json{{"dataset", ds.name},
                      {"dim", r.best.dim},
                      {"lambda", r.best.lambda},
                      {"kappa", r.best.kappa},
                      {"accuracy", r.accuracy},
                      {"evaluated", r.evaluated},
                      {"select", grid_select}}
                     .dump() +
                 "\n";
      }
      emit(grid_out, lines);
      return 0;
    }

    if (*run) {
      json doc = base_doc(run, run_src);
      auto given = [&](const char* name) { return run->count(name) > 0; };
      if (given("--version")) doc["version"] = versions;
      if (given("--classifier")) doc["classifier"] = classifiers;
      if (compress) doc["compress"] = true;
      if (given("--agents")) doc["agents"] = agents;
      if (given("--seeds")) doc["seeds"] = seeds;
      if (given("--seed")) doc["seed"] = seed;
      if (given("--dim")) doc["dim"] = dim;
      if (given("--lambda")) doc["lambda"] = lambda;
      if (given("--kappa")) doc["kappa"] = kappa;
      if (use_grid) doc["grid"] = true;
      if (given("--select")) doc["select"] = select;
      if (allow_off_grid) doc["allow_off_grid"] = true;
      if (given("--min-train")) doc["min_train"] = min_train;
      if (given("--folds")) doc["folds"] = folds;
      if (full_test) doc["full_test"] = true;
      if (given("--inverse")) doc["inverse"] = inverse;
      if (timing) doc["timing"] = true;
      const auto config = config_from_json(doc);
      const auto records = run_suite(config);
      const auto content = render(records, report_format_from_string(run_format));
      emit(run_out, content);
      for (const auto& r : records) {
        for (const auto& w : r.warnings) std::cerr << "warning: " << r.dataset << " " << r.version << ": " << w << "\n";
      }
      return 0;
    }

    if (*report) {
      const auto records = read_results(report_in);
      if (records.empty()) throw InvalidParameter("report: '" + report_in + "' holds no records");
      std::string content;
      if (!scatter.empty()) {
        std::vector<std::string> warnings;
        content = render_scatter(records, scatter[0], scatter[1], &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      } else if (improvement) {
        content = "agents,classifier,compressed,improvement_pct\n";
        for (const char* clf : {"centroid", "rls"}) {
          for (bool compressed : {false, true}) {
            std::map<std::size_t, double> imp;
            try {
              imp = relative_improvement(records, clf, compressed);
            } catch (const PairingError&) {
              continue;
            }
            for (const auto& [n, pct] : imp) {
              std::ostringstream line;
              line << n << "," << clf << "," << (compressed ? 1 : 0) << "," << pct << "\n";
              content += line.str();
            }
          }
        }
      } else {
        content = render(records, report_format_from_string(report_format));
      }
      emit(report_out, content);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "hdcdist: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
