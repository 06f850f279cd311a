#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hdcdist {

// Names one random stream: a master seed plus an ordered path of
// (purpose, index) labels. Every random object in the library is drawn from
// the stream of its SeedSpec, so any party that knows the spec regenerates
// the same object without communicating.
class SeedSpec {
 public:
  using Label = std::pair<std::string, std::uint64_t>;

  SeedSpec() = default;
  explicit SeedSpec(std::uint64_t master_seed) : master_seed_(master_seed) {}
  SeedSpec(std::uint64_t master_seed, std::vector<Label> labels)
      : master_seed_(master_seed), labels_(std::move(labels)) {}

  // Returns a copy with one more label appended.
  [[nodiscard]] SeedSpec child(std::string_view purpose, std::uint64_t index = 0) const;

  [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
  [[nodiscard]] const std::vector<Label>& labels() const noexcept { return labels_; }

  // Folds master seed and labels into one 64-bit stream key.
  [[nodiscard]] std::uint64_t derive() const noexcept;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;

 private:
  std::uint64_t master_seed_ = 0;
  std::vector<Label> labels_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

// Bit-stable random source. std::mt19937_64 is fully specified by the
// standard; the distributions below are written out by hand because the
// std:: distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(const SeedSpec& spec) : engine_(spec.derive()) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer on [0, bound), rejection sampled.
  std::uint64_t below(std::uint64_t bound);
  double gaussian();
  int bipolar() { return (engine_() >> 63) != 0 ? 1 : -1; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hdcdist
