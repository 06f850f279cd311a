#include "hdcdist/hdc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdcdist/errors.hpp"
#include "hdcdist/spectral.hpp"

namespace hdcdist {
namespace {

constexpr double kSingularSpectrum = 1e-12;

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": length mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Hypervector::Hypervector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidParameter("hypervector dimension must be >= 1");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidParameter("hypervector entries must be finite");
  }
}

Hypervector Hypervector::zeros(std::size_t dim) {
  return Hypervector(std::vector<double>(dim, 0.0));
}

BipolarHypervector::BipolarHypervector(std::vector<std::int8_t> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw InvalidParameter("hypervector dimension must be >= 1");
  for (auto v : values_) {
    if (v != 1 && v != -1) throw InvalidParameter("bipolar entries must be -1 or +1");
  }
}

BipolarHypervector::BipolarHypervector(std::initializer_list<int> values)
    : BipolarHypervector(std::vector<std::int8_t>(values.begin(), values.end())) {}

Hypervector BipolarHypervector::to_real() const {
  return Hypervector(std::vector<double>(values_.begin(), values_.end()));
}

Hypervector clip(const Hypervector& v, int kappa) {
  if (kappa < 1) throw InvalidParameter("clip: kappa must be >= 1");
  const double k = kappa;
  std::vector<double> out(v.dim());
  std::ranges::transform(v.values(), out.begin(),
                         [k](double x) { return x <= -k ? -k : (x >= k ? k : x); });
  return Hypervector(std::move(out));
}

BipolarHypervector bind_elementwise(const BipolarHypervector& x, const BipolarHypervector& y) {
  require_same_dim(x.dim(), y.dim(), "bind_elementwise");
  std::vector<std::int8_t> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::int8_t>(x[i] * y[i]);
  }
  return BipolarHypervector(std::move(out));
}

Hypervector superpose(std::span<const Hypervector> vs) {
  if (vs.empty()) throw InvalidParameter("superpose: empty list");
  std::vector<double> out(vs.front().dim(), 0.0);
  for (const auto& v : vs) {
    require_same_dim(out.size(), v.dim(), "superpose");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  }
  return Hypervector(std::move(out));
}

Hypervector circ_convolve(const Hypervector& x, const Hypervector& y) {
  require_same_dim(x.dim(), y.dim(), "circ_convolve");
  const auto product = spectral::multiply(spectral::forward(x.values()),
                                          spectral::forward(y.values()));
  return Hypervector(spectral::inverse_real(product));
}

Hypervector circ_convolve_direct(const Hypervector& x, const Hypervector& y) {
  require_same_dim(x.dim(), y.dim(), "circ_convolve_direct");
  const std::size_t d = x.dim();
  std::vector<double> z(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += y[k] * x[(j + d - k) % d];
    z[j] = acc;
  }
  return Hypervector(std::move(z));
}

Hypervector inverse(const Hypervector& k, InverseMode mode) {
  const std::size_t d = k.dim();
  if (mode == InverseMode::kInvolution) {
    std::vector<double> out(d);
    for (std::size_t j = 0; j < d; ++j) out[j] = k[(d - j) % d];
    return Hypervector(std::move(out));
  }
  auto spectrum = spectral::forward(k.values());
  for (auto& bin : spectrum) {
    if (std::abs(bin) <= kSingularSpectrum) {
      throw SingularKeyError("inverse: key has a (near-)zero spectral component");
    }
    bin = 1.0 / bin;
  }
  return Hypervector(spectral::inverse_real(spectrum));
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x.size(), y.size(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double cosine(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x.size(), y.size(), "cosine");
  const double nx = std::sqrt(dot(x, x));
  const double ny = std::sqrt(dot(y, y));
  if (nx == 0.0 || ny == 0.0) throw UndefinedSimilarity("cosine: zero-norm operand");
  return std::clamp(dot(x, y) / (nx * ny), -1.0, 1.0);
}

double cosine(const Hypervector& x, const Hypervector& y) {
  return cosine(x.values(), y.values());
}

BipolarHypervector random_bipolar(std::size_t dim, const SeedSpec& seed) {
  if (dim < 1) throw InvalidParameter("random_bipolar: dimension must be >= 1");
  Rng rng(seed);
  std::vector<std::int8_t> out(dim);
  for (auto& v : out) v = static_cast<std::int8_t>(rng.bipolar());
  return BipolarHypervector(std::move(out));
}

Hypervector random_gaussian_key(std::size_t dim, const SeedSpec& seed) {
  if (dim < 1) throw InvalidParameter("random_gaussian_key: dimension must be >= 1");
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<double> out(dim);
  for (auto& v : out) v = scale * rng.gaussian();
  return Hypervector(std::move(out));
}

Hypervector delta(std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  if (dim > 0) out[0] = 1.0;
  return Hypervector(std::move(out));
}

}  // namespace hdcdist
