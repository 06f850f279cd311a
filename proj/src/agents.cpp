#include "hdcdist/agents.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "hdcdist/errors.hpp"

namespace hdcdist {
namespace {

ActivationMatrix select_rows(const Eigen::MatrixXd& encoded, const std::vector<ClassLabel>& labels,
                             std::span<const std::size_t> rows, int num_classes) {
  ActivationMatrix out;
  out.num_classes = num_classes;
  out.rows.resize(static_cast<Eigen::Index>(rows.size()), encoded.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.rows.row(static_cast<Eigen::Index>(i)) = encoded.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

std::vector<std::vector<std::size_t>> make_folds(const Dataset& ds, const RunConfig& config,
                                                 const SeedSpec& root, std::vector<std::string>& warnings) {
  if (config.predefined_folds) return *config.predefined_folds;
  SplitSpec spec;
  spec.mode = SplitSpec::Mode::kKFold;
  spec.folds = config.folds;
  spec.stratified = true;
  spec.seed = root.child("split");
  auto result = split(ds, spec);
  warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  return std::move(result.parts);
}

std::vector<std::size_t> complement(const std::vector<std::vector<std::size_t>>& folds, std::size_t skip) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f != skip) out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  std::ranges::sort(out);
  return out;
}

// Normalized, encoded copy of the whole dataset for one (seed, fold):
// ranges come from the training rows only, test rows are clamped.
struct EncodedFold {
  Eigen::MatrixXd activations;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::size_t clamped = 0;
};

EncodedFold encode_fold(const Dataset& ds, const std::vector<std::vector<std::size_t>>& folds,
                        std::size_t fold, const InputProjection& projection, int kappa) {
  EncodedFold out;
  out.train = complement(folds, fold);
  out.test = folds[fold];
  Eigen::MatrixXd samples = ds.samples;
  out.clamped = apply_ranges(samples, fit_ranges(ds.samples, out.train));
  out.activations = encode_batch(samples, projection, kappa);
  return out;
}

double mean_of(std::span<const double> xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

AgentNetwork AgentNetwork::fully_connected(std::size_t agents) {
  if (agents < 1) throw InvalidParameter("network: need at least one agent");
  std::vector<std::uint64_t> ids(agents);
  std::iota(ids.begin(), ids.end(), 0);
  return AgentNetwork(std::vector<std::uint8_t>(agents * agents, 1), std::move(ids));
}

AgentNetwork::AgentNetwork(std::vector<std::uint8_t> omega, std::vector<std::uint64_t> agent_ids)
    : omega_(std::move(omega)), ids_(std::move(agent_ids)) {
  const std::size_t n = ids_.size();
  if (n < 1) throw InvalidParameter("network: need at least one agent");
  if (omega_.size() != n * n) throw DimensionError("network: adjacency matrix must be N x N");
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      const auto v = omega_[p * n + q];
      if (v > 1) throw InvalidParameter("network: adjacency entries must be 0 or 1");
      if (v != omega_[q * n + p]) throw InvalidParameter("network: adjacency matrix must be symmetric");
    }
  }
  if (std::set<std::uint64_t>(ids_.begin(), ids_.end()).size() != n) {
    throw InvalidParameter("network: agent IDs must be distinct");
  }
}

std::vector<std::size_t> AgentNetwork::aggregation_set(std::size_t p) const {
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < size(); ++q) {
    if (q == p || connected(p, q)) out.push_back(q);
  }
  std::ranges::sort(out, {}, [this](std::size_t q) { return ids_[q]; });
  return out;
}

std::size_t AgentNetwork::transmissions() const {
  std::size_t count = 0;
  for (std::size_t p = 0; p < size(); ++p) count += aggregation_set(p).size() - 1;
  return count;
}

DataPartition partition(std::span<const std::size_t> indices, std::size_t agents, const SeedSpec& seed) {
  if (agents < 1) throw InvalidParameter("partition: need at least one agent");
  if (indices.size() < agents) {
    throw InsufficientData("partition: " + std::to_string(indices.size()) + " samples for " +
                           std::to_string(agents) + " agents");
  }
  std::vector<std::size_t> order(indices.begin(), indices.end());
  Rng rng(seed);
  rng.shuffle(order);
  DataPartition out;
  out.seed = seed;
  const std::size_t base = order.size() / agents;
  const std::size_t extra = order.size() % agents;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < agents; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    std::vector<std::size_t> shard(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                   order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::ranges::sort(shard);
    out.shards.push_back(std::move(shard));
    pos += len;
  }
  return out;
}

DataPartition partition(std::size_t samples, std::size_t agents, const SeedSpec& seed) {
  std::vector<std::size_t> indices(samples);
  std::iota(indices.begin(), indices.end(), 0);
  return partition(indices, agents, seed);
}

const char* to_string(VersionKind kind) {
  switch (kind) {
    case VersionKind::kCentralized: return "centralized";
    case VersionKind::kLocal: return "local";
    case VersionKind::kDistributed: return "distributed";
  }
  return "?";
}

VersionKind version_kind_from_string(const std::string& name) {
  if (name == "centralized") return VersionKind::kCentralized;
  if (name == "local") return VersionKind::kLocal;
  if (name == "distributed") return VersionKind::kDistributed;
  throw InvalidParameter("unknown version '" + name + "'");
}

void ExperimentVersion::validate() const {
  if (compression && kind != VersionKind::kDistributed) {
    throw InvalidParameter("compression applies to the distributed version only");
  }
}

std::string ExperimentVersion::label() const {
  return std::string(to_string(kind)) + (compression ? "+hrr" : "") + "/" + to_string(classifier);
}

ClassifierMatrix train_on_activations(const ActivationMatrix& data, ClassifierKind kind, double lambda) {
  return kind == ClassifierKind::kRls ? train_rls(data, lambda) : train_centroids(data);
}

ClassifierMatrix train_local(const Eigen::MatrixXd& shard_samples, const std::vector<ClassLabel>& shard_labels,
                             int num_classes, ClassifierKind kind, const InputProjection& projection,
                             int kappa, double lambda) {
  if (shard_samples.rows() < 1) throw InvalidParameter("train_local: empty shard");
  ActivationMatrix data;
  data.rows = encode_batch(shard_samples, projection, kappa);
  data.labels = shard_labels;
  data.num_classes = num_classes;
  return train_on_activations(data, kind, lambda);
}

std::size_t ClassifierMessage::payload_values() const {
  if (const auto* raw = std::get_if<RawClassifierPayload>(&payload)) {
    return static_cast<std::size_t>(raw->values.size());
  }
  return std::get<CompressedClassifier>(payload).w.size();
}

ClassifierMessage publish(std::uint64_t producer, const ClassifierMatrix& local, bool compression,
                          InverseMode mode) {
  ClassifierMessage msg;
  msg.producer = producer;
  if (compression) {
    const auto keys = generate_keys(producer, static_cast<std::size_t>(local.num_classes()),
                                    static_cast<std::size_t>(local.dim()), mode);
    msg.payload = compress(local, keys);
  } else if (local.kind == ClassifierKind::kCentroid) {
    msg.payload = RawClassifierPayload{local.kind, local.class_sums, local.class_counts};
  } else {
    msg.payload = RawClassifierPayload{local.kind, local.weights, {}};
  }
  return msg;
}

ClassifierMatrix receive(const ClassifierMessage& message, ClassifierKind kind) {
  if (const auto* raw = std::get_if<RawClassifierPayload>(&message.payload)) {
    if (raw->kind != kind) throw ProtocolError("message classifier kind does not match");
    if (kind == ClassifierKind::kCentroid) return centroids_from_sums(raw->values, raw->class_counts);
    ClassifierMatrix out;
    out.kind = kind;
    out.weights = raw->values;
    return out;
  }
  const auto& compressed = std::get<CompressedClassifier>(message.payload);
  if (compressed.agent_id != message.producer) throw ProtocolError("payload agent ID does not match producer");
  const auto keys = generate_keys(compressed.agent_id, compressed.num_classes, compressed.dim(), compressed.mode);
  return decompress(compressed, keys, kind);
}

ExchangeResult exchange_and_aggregate(const AgentNetwork& network, std::span<const ClassifierMatrix> local,
                                      bool compression, InverseMode mode) {
  if (local.size() != network.size()) {
    throw ProtocolError("exchange: " + std::to_string(local.size()) + " classifiers for " +
                        std::to_string(network.size()) + " agents");
  }
  const auto& first = local.front();
  for (const auto& w : local) {
    if (w.kind != first.kind || w.weights.rows() != first.weights.rows() || w.weights.cols() != first.weights.cols()) {
      throw ProtocolError("exchange: local classifiers differ in kind or shape");
    }
  }
  const ClassifierKind kind = first.kind;
  const bool sum_centroids = kind == ClassifierKind::kCentroid && !compression;

  ExchangeResult result;
  // Each producer publishes once. What a consumer reconstructs depends only
  // on the message, so one reconstruction per producer serves every consumer.
  std::vector<ClassifierMatrix> received;
  received.reserve(network.size());
  for (std::size_t p = 0; p < network.size(); ++p) {
    const auto msg = publish(network.agent_id(p), local[p], compression, mode);
    result.payload_values.push_back(msg.payload_values());
    received.push_back(receive(msg, kind));
  }

  for (std::size_t p = 0; p < network.size(); ++p) {
    const auto sources = network.aggregation_set(p);
    for (auto s : sources) {
      if (s != p) result.transmitted_values += result.payload_values[s];
    }
    if (sum_centroids) {
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(first.weights.rows(), first.weights.cols());
      std::vector<std::uint64_t> counts(static_cast<std::size_t>(first.weights.rows()), 0);
      for (auto s : sources) {
        sums += received[s].class_sums;
        for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += received[s].class_counts[c];
      }
      result.aggregated.push_back(centroids_from_sums(std::move(sums), std::move(counts)));
    } else {
      ClassifierMatrix agg;
      agg.kind = kind;
      agg.weights = Eigen::MatrixXd::Zero(first.weights.rows(), first.weights.cols());
      for (auto s : sources) agg.weights += received[s].weights;
      result.aggregated.push_back(std::move(agg));
    }
  }
  return result;
}

VersionResult run_version(const ExperimentVersion& version, const Dataset& ds, const RunConfig& config) {
  version.validate();
  ds.validate();
  if (config.seeds < 1) throw InvalidParameter("run_version: need at least one seed");
  if (config.agents < 1) throw InvalidParameter("run_version: need at least one agent");
  const bool centralized = version.kind == VersionKind::kCentralized;
  const std::size_t agents = centralized ? 1 : config.agents;
  const AgentNetwork network = config.network ? *config.network : AgentNetwork::fully_connected(agents);
  if (network.size() != agents) throw InvalidParameter("run_version: network size differs from agent count");

  VersionResult result;
  const SeedSpec root(config.master_seed);
  const auto folds = make_folds(ds, config, root, result.warnings);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::size_t test_size = folds[f].size();
    const std::size_t train_size = ds.size() - test_size;
    const bool needs_test_shards = !centralized && !config.full_test_eval;
    if (train_size < agents || (needs_test_shards && test_size < agents)) {
      throw InsufficientData("fold " + std::to_string(f) + " has " + std::to_string(train_size) +
                             " training and " + std::to_string(test_size) + " test samples for " +
                             std::to_string(agents) + " agents");
    }
  }

  std::vector<double> agent_sum(agents, 0.0);
  std::size_t empty_class_events = 0;
  for (std::size_t s = 0; s < config.seeds; ++s) {
    try {
      const auto projection = init_projection(ds.features(), config.dim, root.child("projection", s));
      std::vector<double> fold_acc;
      for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto fold = encode_fold(ds, folds, f, projection, config.kappa);
        result.clamped_test_values += fold.clamped;

        std::vector<double> acc(agents, 0.0);
        // Network accuracy pools every agent's test predictions.
        std::size_t correct = 0, tested = 0;
        auto score = [&](std::size_t p, const ClassifierMatrix& model, const ActivationMatrix& test) {
          const auto predicted = predict_batch(model, test.rows);
          std::size_t hits = 0;
          for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == test.labels[i];
          acc[p] = static_cast<double>(hits) / static_cast<double>(predicted.size());
          correct += hits;
          tested += predicted.size();
        };
        if (centralized) {
          const auto train = select_rows(fold.activations, ds.labels, fold.train, ds.num_classes);
          const auto model = train_on_activations(train, version.classifier, config.lambda);
          score(0, model, select_rows(fold.activations, ds.labels, fold.test, ds.num_classes));
        } else {
          const SeedSpec part_seed = root.child("partition", s).child("fold", f);
          const auto train_part = partition(fold.train, agents, part_seed.child("train"));
          const auto test_part = partition(fold.test, agents, part_seed.child("test"));
          std::vector<ClassifierMatrix> local;
          local.reserve(agents);
          for (std::size_t p = 0; p < agents; ++p) {
            local.push_back(train_on_activations(
                select_rows(fold.activations, ds.labels, train_part.shards[p], ds.num_classes),
                version.classifier, config.lambda));
            if (!local.back().warnings.empty()) ++empty_class_events;
          }
          std::vector<ClassifierMatrix> models;
          if (version.kind == VersionKind::kDistributed) {
            auto exchange = exchange_and_aggregate(network, local, version.compression, config.inverse_mode);
            result.payload_values_per_producer = exchange.payload_values.front();
            result.payload_bytes_per_round = exchange.transmitted_values * sizeof(double);
            models = std::move(exchange.aggregated);
          } else {
            models = std::move(local);
          }
          const auto full_test = select_rows(fold.activations, ds.labels, fold.test, ds.num_classes);
          for (std::size_t p = 0; p < agents; ++p) {
            score(p, models[p],
                  config.full_test_eval
                      ? full_test
                      : select_rows(fold.activations, ds.labels, test_part.shards[p], ds.num_classes));
          }
        }
        for (std::size_t p = 0; p < agents; ++p) agent_sum[p] += acc[p];
        fold_acc.push_back(static_cast<double>(correct) / static_cast<double>(tested));
      }
      result.per_seed_accuracy.push_back(mean_of(fold_acc));
    } catch (const InsufficientData&) {
      throw;
    } catch (const std::exception& e) {
      throw Error("seed " + std::to_string(s) + " failed: " + e.what());
    }
  }

  const double runs = static_cast<double>(config.seeds * folds.size());
  for (auto v : agent_sum) result.per_agent_accuracy.push_back(v / runs);
  result.mean = mean_of(result.per_seed_accuracy);
  if (result.per_seed_accuracy.size() > 1) {
    double ss = 0.0;
    for (double a : result.per_seed_accuracy) ss += (a - result.mean) * (a - result.mean);
    result.stddev = std::sqrt(ss / static_cast<double>(result.per_seed_accuracy.size() - 1));
  }
  if (empty_class_events > 0) {
    result.warnings.push_back(std::to_string(empty_class_events) +
                              " local classifiers were trained on shards missing at least one class");
  }
  return result;
}

FoldPredictions predictions_on_fold(const ExperimentVersion& version, const Dataset& ds,
                                    const RunConfig& config, std::size_t seed_index, std::size_t fold_index) {
  version.validate();
  ds.validate();
  const SeedSpec root(config.master_seed);
  std::vector<std::string> warnings;
  const auto folds = make_folds(ds, config, root, warnings);
  if (fold_index >= folds.size()) throw InvalidParameter("predictions_on_fold: fold out of range");
  const auto projection = init_projection(ds.features(), config.dim, root.child("projection", seed_index));
  const auto fold = encode_fold(ds, folds, fold_index, projection, config.kappa);
  const auto test = select_rows(fold.activations, ds.labels, fold.test, ds.num_classes);

  FoldPredictions out;
  const auto central = train_on_activations(select_rows(fold.activations, ds.labels, fold.train, ds.num_classes),
                                            version.classifier, config.lambda);
  out.centralized = predict_batch(central, test.rows);

  const auto network = config.network ? *config.network : AgentNetwork::fully_connected(config.agents);
  const SeedSpec part_seed = root.child("partition", seed_index).child("fold", fold_index);
  const auto train_part = partition(fold.train, network.size(), part_seed.child("train"));
  std::vector<ClassifierMatrix> local;
  for (const auto& shard : train_part.shards) {
    local.push_back(train_on_activations(select_rows(fold.activations, ds.labels, shard, ds.num_classes),
                                         version.classifier, config.lambda));
  }
  const auto exchange = exchange_and_aggregate(network, local, version.compression, config.inverse_mode);
  for (const auto& model : exchange.aggregated) out.per_agent.push_back(predict_batch(model, test.rows));
  return out;
}

}  // namespace hdcdist
