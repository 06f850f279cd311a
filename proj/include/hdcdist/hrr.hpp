#pragma once

// Lossy classifier compression with Holographic Reduced Representations.
//
// An L x D classifier is packed into one D-vector
//     w = sum_i K_i (*) W_i
// where K_i are per-class Gaussian keys generated from the producer's agent
// ID. A consumer regenerates the keys from the ID and recovers
//     W_i ~ w (*) inv(K_i),
// with crosstalk from the other L-1 pairs as the only error in exact mode.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdcdist/classifiers.hpp"
#include "hdcdist/hdc.hpp"

namespace hdcdist {

class KeySet {
 public:
  [[nodiscard]] std::uint64_t agent_id() const noexcept { return agent_id_; }
  [[nodiscard]] std::size_t num_classes() const noexcept { return keys_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return keys_.front().dim(); }
  [[nodiscard]] InverseMode mode() const noexcept { return mode_; }
  [[nodiscard]] const Hypervector& key(std::size_t i) const { return keys_.at(i); }
  [[nodiscard]] const std::vector<Hypervector>& keys() const noexcept { return keys_; }
  // Non-empty when the pairwise |cosine| < 0.2 check failed at D >= 512.
  [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  friend bool operator==(const KeySet& a, const KeySet& b) {
    return a.agent_id_ == b.agent_id_ && a.mode_ == b.mode_ && a.keys_ == b.keys_;
  }

 private:
  friend KeySet generate_keys(std::uint64_t, std::size_t, std::size_t, InverseMode);
  friend KeySet make_keyset(std::uint64_t, std::vector<Hypervector>, InverseMode);
  KeySet(std::uint64_t agent_id, std::vector<Hypervector> keys, InverseMode mode)
      : agent_id_(agent_id), keys_(std::move(keys)), mode_(mode) {}

  std::uint64_t agent_id_;
  std::vector<Hypervector> keys_;
  InverseMode mode_;
  std::vector<std::string> warnings_;
};

struct CompressedClassifier {
  std::vector<double> w;
  std::uint64_t agent_id = 0;
  std::uint32_t num_classes = 0;
  InverseMode mode = InverseMode::kInvolution;

  [[nodiscard]] std::size_t dim() const noexcept { return w.size(); }
  friend bool operator==(const CompressedClassifier&, const CompressedClassifier&) = default;
};

// Seed namespace for keys. Fixed so a KeySet depends on (agent_id, L, D) only.
inline constexpr std::uint64_t kKeySeedNamespace = 0x4852524B45595321ULL;  // "HRRKEYS!"

// Key i is random_gaussian_key(D, SeedSpec(kKeySeedNamespace).child("agent", id).child("key", i)).
KeySet generate_keys(std::uint64_t agent_id, std::size_t num_classes, std::size_t dim,
                     InverseMode mode = InverseMode::kInvolution);

// Arbitrary keys, for tests and fidelity experiments (e.g. key = delta).
KeySet make_keyset(std::uint64_t agent_id, std::vector<Hypervector> keys, InverseMode mode);

CompressedClassifier compress(const ClassifierMatrix& w, const KeySet& keys);

// Reconstructs every row. The result carries the input classifier kind
// passed in `kind` and has no class sums.
ClassifierMatrix decompress(const CompressedClassifier& c, const KeySet& keys,
                            ClassifierKind kind = ClassifierKind::kRls);

// cosine(row_i, reconstructed row_i) per class; zero rows report 0.
std::vector<double> compression_fidelity(const ClassifierMatrix& w, const KeySet& keys);

// Wire format "HRRC": magic[4], version u16, agent_id u64, L u32, D u32,
// mode u8, then D float64 values. All integers and floats little-endian.
inline constexpr std::uint16_t kHrrcVersion = 1;
inline constexpr std::size_t kHrrcHeaderBytes = 4 + 2 + 8 + 4 + 4 + 1;

std::vector<std::uint8_t> serialize(const CompressedClassifier& c);
// Throws ParseError on a malformed buffer.
CompressedClassifier deserialize(std::span<const std::uint8_t> bytes);

void write_hrrc(const std::string& path, const CompressedClassifier& c);
CompressedClassifier read_hrrc(const std::string& path);

}  // namespace hdcdist
