#include "hdcdist/rvfl.hpp"

#include <cmath>
#include <string>

#include "hdcdist/errors.hpp"

namespace hdcdist {

Eigen::VectorXd HiddenActivation::to_eigen() const {
  Eigen::VectorXd out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[static_cast<Eigen::Index>(i)] = values[i];
  return out;
}

BipolarHypervector InputProjection::column(std::size_t j) const {
  if (j >= features_) throw InvalidParameter("projection column out of range");
  auto view = column_view(j);
  return BipolarHypervector(std::vector<std::int8_t>(view.begin(), view.end()));
}

InputProjection init_projection(std::size_t features, std::size_t dim, const SeedSpec& seed) {
  if (features < 1 || dim < 1) {
    throw InvalidParameter("init_projection: features and dimension must be >= 1");
  }
  std::vector<std::int8_t> entries;
  entries.reserve(features * dim);
  for (std::size_t j = 0; j < features; ++j) {
    const auto col = random_bipolar(dim, seed.child("projection_column", j));
    entries.insert(entries.end(), col.values().begin(), col.values().end());
  }
  return InputProjection(features, dim, seed, std::move(entries));
}

std::size_t thermometer_level(double value, std::size_t dim) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw RangeError("thermometer_encode: value " + std::to_string(value) + " outside [0,1]");
  }
  const auto level = static_cast<std::size_t>(std::floor(value * static_cast<double>(dim) + 0.5));
  return level > dim ? dim : level;
}

BipolarHypervector thermometer_encode(double value, std::size_t dim) {
  if (dim < 1) throw InvalidParameter("thermometer_encode: dimension must be >= 1");
  const std::size_t level = thermometer_level(value, dim);
  std::vector<std::int8_t> code(dim, -1);
  for (std::size_t i = 0; i < level; ++i) code[i] = 1;
  return BipolarHypervector(std::move(code));
}

std::vector<std::int32_t> encode_unclipped(std::span<const double> x, const InputProjection& proj) {
  if (x.size() != proj.features()) {
    throw DimensionError("encode_sample: sample has " + std::to_string(x.size()) +
                         " features, projection expects " + std::to_string(proj.features()));
  }
  const std::size_t d = proj.dim();
  std::vector<std::int32_t> sum(d, 0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const std::size_t level = thermometer_level(x[j], d);
    const auto col = proj.column_view(j);
    for (std::size_t i = 0; i < level; ++i) sum[i] += col[i];
    for (std::size_t i = level; i < d; ++i) sum[i] -= col[i];
  }
  return sum;
}

HiddenActivation encode_sample(std::span<const double> x, const InputProjection& proj, int kappa) {
  if (kappa < 1) throw InvalidParameter("encode_sample: kappa must be >= 1");
  HiddenActivation h{encode_unclipped(x, proj), kappa};
  for (auto& v : h.values) v = v <= -kappa ? -kappa : (v >= kappa ? kappa : v);
  return h;
}

Eigen::MatrixXd encode_batch(const Eigen::MatrixXd& samples, const InputProjection& proj,
                             int kappa) {
  Eigen::MatrixXd out(samples.rows(), static_cast<Eigen::Index>(proj.dim()));
  std::vector<double> row(static_cast<std::size_t>(samples.cols()));
  for (Eigen::Index m = 0; m < samples.rows(); ++m) {
    for (Eigen::Index j = 0; j < samples.cols(); ++j) row[static_cast<std::size_t>(j)] = samples(m, j);
    const auto h = encode_sample(row, proj, kappa);
    for (std::size_t i = 0; i < h.values.size(); ++i) {
      out(m, static_cast<Eigen::Index>(i)) = h.values[i];
    }
  }
  return out;
}

}  // namespace hdcdist
