#pragma once

// Hypervector algebra: generation, element-wise binding, superposition,
// clipping, circular convolution (HRR binding), inverses and similarity.
//
// All functions are pure. Length mismatches raise DimensionError.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "hdcdist/seed.hpp"

namespace hdcdist {

// Real-valued vector of fixed length D >= 1 with finite entries.
class Hypervector {
 public:
  explicit Hypervector(std::vector<double> values);
  Hypervector(std::initializer_list<double> values)
      : Hypervector(std::vector<double>(values)) {}
  static Hypervector zeros(std::size_t dim);

  [[nodiscard]] std::size_t dim() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] const std::vector<double>& vec() const noexcept { return values_; }

  friend bool operator==(const Hypervector&, const Hypervector&) = default;

 private:
  std::vector<double> values_;
};

// Vector whose every entry is exactly -1 or +1.
class BipolarHypervector {
 public:
  explicit BipolarHypervector(std::vector<std::int8_t> values);
  BipolarHypervector(std::initializer_list<int> values);

  [[nodiscard]] std::size_t dim() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const std::int8_t> values() const noexcept { return values_; }
  [[nodiscard]] int operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] Hypervector to_real() const;

  friend bool operator==(const BipolarHypervector&, const BipolarHypervector&) = default;

 private:
  std::vector<std::int8_t> values_;
};

enum class InverseMode : std::uint8_t {
  kExact = 0,      // spectral inverse, k (*) inv(k) = delta
  kInvolution = 1, // index reversal j -> (-j) mod D
};

// Saturates each entry to [-kappa, kappa]. Throws InvalidParameter for kappa < 1.
Hypervector clip(const Hypervector& v, int kappa);

BipolarHypervector bind_elementwise(const BipolarHypervector& x, const BipolarHypervector& y);

// Exact component-wise sum. Throws InvalidParameter on an empty list.
Hypervector superpose(std::span<const Hypervector> vs);

// z_j = sum_k y_k x_{(j-k) mod D}, evaluated through the DFT.
Hypervector circ_convolve(const Hypervector& x, const Hypervector& y);

// The same sum evaluated literally in O(D^2). Reference path.
Hypervector circ_convolve_direct(const Hypervector& x, const Hypervector& y);

// Throws SingularKeyError in exact mode when a spectral bin of k has
// magnitude <= 1e-12.
Hypervector inverse(const Hypervector& k, InverseMode mode);

// Throws UndefinedSimilarity when either operand has zero norm.
double cosine(const Hypervector& x, const Hypervector& y);
double cosine(std::span<const double> x, std::span<const double> y);

double dot(std::span<const double> x, std::span<const double> y);

BipolarHypervector random_bipolar(std::size_t dim, const SeedSpec& seed);

// Entries i.i.d. N(0, 1/D).
Hypervector random_gaussian_key(std::size_t dim, const SeedSpec& seed);

// Delta vector [1, 0, ..., 0], the identity of circular convolution.
Hypervector delta(std::size_t dim);

}  // namespace hdcdist
