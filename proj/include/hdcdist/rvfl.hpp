#pragma once

// RVFL hidden layer built from hypervector operations: each feature is
// quantized into a thermometer code, bound with a fixed random bipolar
// column of the input projection, and the K bound vectors are superposed
// and clipped to [-kappa, kappa].

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdcdist/hdc.hpp"
#include "hdcdist/seed.hpp"

namespace hdcdist {

// Frozen first layer W^in: K bipolar columns of length D.
class InputProjection {
 public:
  [[nodiscard]] std::size_t features() const noexcept { return features_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] const SeedSpec& seed() const noexcept { return seed_; }
  // Column j as a bipolar hypervector.
  [[nodiscard]] BipolarHypervector column(std::size_t j) const;
  [[nodiscard]] std::span<const std::int8_t> column_view(std::size_t j) const {
    return {entries_.data() + j * dim_, dim_};
  }

  friend bool operator==(const InputProjection&, const InputProjection&) = default;

 private:
  friend InputProjection init_projection(std::size_t, std::size_t, const SeedSpec&);
  InputProjection(std::size_t features, std::size_t dim, SeedSpec seed,
                  std::vector<std::int8_t> entries)
      : features_(features), dim_(dim), seed_(std::move(seed)), entries_(std::move(entries)) {}

  std::size_t features_;
  std::size_t dim_;
  SeedSpec seed_;
  std::vector<std::int8_t> entries_;  // column-major D x K
};

// Integer activation vector h with |h_i| <= kappa.
struct HiddenActivation {
  std::vector<std::int32_t> values;
  int kappa = 1;

  [[nodiscard]] std::size_t dim() const noexcept { return values.size(); }
  [[nodiscard]] Eigen::VectorXd to_eigen() const;
};

// Column j draws from seed.child("projection_column", j).
InputProjection init_projection(std::size_t features, std::size_t dim, const SeedSpec& seed);

// Number of +1 entries for a value in [0,1]: round-half-up of value * D.
std::size_t thermometer_level(double value, std::size_t dim);

// First thermometer_level(value, D) entries +1, the rest -1. Throws
// RangeError outside [0,1].
BipolarHypervector thermometer_encode(double value, std::size_t dim);

// h = clip(sum_j W^in_j (.) thermometer(x_j), kappa).
HiddenActivation encode_sample(std::span<const double> x, const InputProjection& proj, int kappa);

// Unclipped superposition; entries lie in [-K, K].
std::vector<std::int32_t> encode_unclipped(std::span<const double> x, const InputProjection& proj);

// Encodes every row of `samples` (M x K) into an M x D activation matrix.
Eigen::MatrixXd encode_batch(const Eigen::MatrixXd& samples, const InputProjection& proj, int kappa);

}  // namespace hdcdist
