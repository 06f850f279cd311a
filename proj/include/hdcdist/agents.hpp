#pragma once

// Agent-network simulation: data partitioning, local training, one-shot
// classifier exchange (raw or HRR-compressed) and aggregation, and the
// centralized / local / distributed experiment versions.
//
// Agents never see each other's samples. The only values that cross an
// agent boundary are ClassifierMessage payloads.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hdcdist/classifiers.hpp"
#include "hdcdist/dataset.hpp"
#include "hdcdist/hrr.hpp"
#include "hdcdist/rvfl.hpp"
#include "hdcdist/seed.hpp"

namespace hdcdist {

class AgentNetwork {
 public:
  // Omega_{p,q} = 1 for all p, q; agent IDs 0..N-1.
  static AgentNetwork fully_connected(std::size_t agents);
  // `omega` is N x N row-major with entries in {0,1} and must be symmetric.
  // The diagonal is ignored: an agent always aggregates its own classifier.
  AgentNetwork(std::vector<std::uint8_t> omega, std::vector<std::uint64_t> agent_ids);

  [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
  [[nodiscard]] std::uint64_t agent_id(std::size_t p) const { return ids_.at(p); }
  [[nodiscard]] const std::vector<std::uint64_t>& agent_ids() const noexcept { return ids_; }
  [[nodiscard]] bool connected(std::size_t p, std::size_t q) const { return omega_.at(p * size() + q) != 0; }
  // Agent positions whose classifiers agent p aggregates (self included),
  // ordered by agent ID.
  [[nodiscard]] std::vector<std::size_t> aggregation_set(std::size_t p) const;
  // Directed transmissions in one exchange round (self excluded).
  [[nodiscard]] std::size_t transmissions() const;

 private:
  std::vector<std::uint8_t> omega_;
  std::vector<std::uint64_t> ids_;
};

struct DataPartition {
  std::vector<std::vector<std::size_t>> shards;  // each sorted ascending
  SeedSpec seed;
};

// Seeded uniform shuffle of `indices` cut into N contiguous blocks; the first
// (M mod N) blocks get one extra element. Throws InsufficientData if M < N.
DataPartition partition(std::span<const std::size_t> indices, std::size_t agents, const SeedSpec& seed);
DataPartition partition(std::size_t samples, std::size_t agents, const SeedSpec& seed);

enum class VersionKind : std::uint8_t { kCentralized, kLocal, kDistributed };

const char* to_string(VersionKind kind);
VersionKind version_kind_from_string(const std::string& name);

struct ExperimentVersion {
  VersionKind kind = VersionKind::kCentralized;
  bool compression = false;
  ClassifierKind classifier = ClassifierKind::kRls;

  // Throws InvalidParameter when compression is set on a non-distributed version.
  void validate() const;
  // e.g. "distributed+hrr/rls"
  [[nodiscard]] std::string label() const;
};

ClassifierMatrix train_on_activations(const ActivationMatrix& data, ClassifierKind kind, double lambda);

// Encodes the shard with the shared projection, then trains.
ClassifierMatrix train_local(const Eigen::MatrixXd& shard_samples, const std::vector<ClassLabel>& shard_labels,
                             int num_classes, ClassifierKind kind, const InputProjection& projection,
                             int kappa, double lambda);

// Uncompressed payload. RLS sends its weights; the centroid classifier sends
// unnormalized class sums plus integer class counts.
struct RawClassifierPayload {
  ClassifierKind kind = ClassifierKind::kRls;
  Eigen::MatrixXd values;  // L x D
  std::vector<std::uint64_t> class_counts;
};

struct ClassifierMessage {
  std::uint64_t producer = 0;
  std::variant<RawClassifierPayload, CompressedClassifier> payload;

  // float64 values carried: L*D raw, D compressed.
  [[nodiscard]] std::size_t payload_values() const;
};

// Built once per producer.
ClassifierMessage publish(std::uint64_t producer, const ClassifierMatrix& local, bool compression,
                          InverseMode mode = InverseMode::kInvolution);

// What a consumer obtains from a message: the raw values, or the
// reconstruction from keys regenerated out of the producer's ID.
ClassifierMatrix receive(const ClassifierMessage& message, ClassifierKind kind);

struct ExchangeResult {
  std::vector<ClassifierMatrix> aggregated;  // one per agent position
  std::vector<std::size_t> payload_values;   // per producer
  std::size_t transmitted_values = 0;        // sum over directed transmissions
};

// W^dist(p) = sum over the aggregation set of p of the received classifiers,
// summed in agent-ID order. Uncompressed centroid classifiers are summed as
// class sums and normalized afterwards. Throws ProtocolError when the local
// classifiers disagree in shape or kind.
ExchangeResult exchange_and_aggregate(const AgentNetwork& network,
                                      std::span<const ClassifierMatrix> local, bool compression,
                                      InverseMode mode = InverseMode::kInvolution);

struct RunConfig {
  std::size_t dim = 500;
  double lambda = 1.0;
  int kappa = 7;
  std::size_t agents = 1;
  std::size_t seeds = 10;
  std::uint64_t master_seed = 1;
  int folds = 4;
  // Evaluate each agent on the full test fold instead of its local test shard.
  bool full_test_eval = false;
  InverseMode inverse_mode = InverseMode::kInvolution;
  // Predefined folds (e.g. from a manifest); replaces the seeded stratified k-fold.
  std::optional<std::vector<std::vector<std::size_t>>> predefined_folds;
  // Custom topology; fully connected when empty.
  std::optional<AgentNetwork> network;
};

struct VersionResult {
  // Mean over folds of the pooled network accuracy (correct predictions of
  // all agents over all their test samples).
  std::vector<double> per_seed_accuracy;
  std::vector<double> per_agent_accuracy;  // averaged over seeds and folds
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t payload_values_per_producer = 0;
  std::size_t payload_bytes_per_round = 0;
  std::size_t clamped_test_values = 0;
  std::vector<std::string> warnings;
};

// Runs `version` on `ds` with k-fold cross-validation, repeated for
// config.seeds projection seeds. Seed s draws its projection and partitions
// from SeedSpec(master_seed).child(..., s); the fold split is fixed across
// seeds. Throws InsufficientData when a fold cannot give every agent a
// non-empty shard; any other per-seed failure is rethrown naming the seed.
VersionResult run_version(const ExperimentVersion& version, const Dataset& ds, const RunConfig& config);

// Per-sample predictions on the full test fold of one (seed, fold): the
// centralized classifier and every agent's aggregated classifier.
struct FoldPredictions {
  std::vector<ClassLabel> centralized;
  std::vector<std::vector<ClassLabel>> per_agent;  // distributed, full test fold
};
FoldPredictions predictions_on_fold(const ExperimentVersion& version, const Dataset& ds,
                                    const RunConfig& config, std::size_t seed_index, std::size_t fold);

}  // namespace hdcdist
