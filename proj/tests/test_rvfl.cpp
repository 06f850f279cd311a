#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hdcdist/errors.hpp"
#include "hdcdist/rvfl.hpp"

using namespace hdcdist;

namespace {

// Clipped sum of bound codes, evaluated entry by entry from the projection columns.
std::vector<std::int32_t> oracle_encode(const std::vector<double>& x, const InputProjection& proj, int kappa) {
  const std::size_t d = proj.dim();
  std::vector<std::int32_t> h(d, 0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto prefix = static_cast<std::size_t>(std::floor(x[j] * static_cast<double>(d) + 0.5));
    const auto col = proj.column_view(j);
    for (std::size_t i = 0; i < d; ++i) h[i] += col[i] * (i < prefix ? 1 : -1);
  }
  for (auto& e : h) e = std::clamp(e, -kappa, kappa);
  return h;
}

std::vector<double> random_features(std::size_t k, std::uint64_t seed) {
  Rng rng{SeedSpec(seed)};
  std::vector<double> x(k);
  for (auto& e : x) e = rng.uniform();
  return x;
}

}  // namespace

TEST(Thermometer, Examples) {
  EXPECT_EQ(thermometer_encode(0.0, 4), BipolarHypervector({-1, -1, -1, -1}));
  EXPECT_EQ(thermometer_encode(1.0, 4), BipolarHypervector({1, 1, 1, 1}));
  EXPECT_EQ(thermometer_encode(0.5, 4), BipolarHypervector({1, 1, -1, -1}));
}

TEST(Thermometer, RoundHalfUp) {
  EXPECT_EQ(thermometer_level(0.125, 4), 1u);  // 0.5 -> 1
  EXPECT_EQ(thermometer_level(0.375, 4), 2u);  // 1.5 -> 2
  EXPECT_EQ(thermometer_level(0.1, 4), 0u);
}

TEST(Thermometer, RangeErrors) {
  EXPECT_THROW(thermometer_encode(-0.01, 4), RangeError);
  EXPECT_THROW(thermometer_encode(1.01, 4), RangeError);
}

TEST(Thermometer, MonotonePrefix) {
  const std::size_t d = 37;
  for (double v = 0.0; v <= 1.0; v += 0.01) {
    const auto a = thermometer_encode(v, d);
    const auto b = thermometer_encode(std::min(1.0, v + 0.01), d);
    bool seen_minus = false;
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_LE(a[i], b[i]);
      if (a[i] == -1) seen_minus = true;
      if (seen_minus) EXPECT_EQ(a[i], -1);
    }
  }
}

TEST(Encode, HandExampleFromPrimitives) {
  // W^in columns [1,1,1], [1,-1,-1]; F columns [1,-1,1], [1,1,-1].
  // Products [1,-1,1] and [1,-1,1], sum [2,-2,2], clip at 1.
  const BipolarHypervector w1{1, 1, 1}, w2{1, -1, -1};
  const BipolarHypervector f1{1, -1, 1}, f2{1, 1, -1};
  EXPECT_EQ(bind_elementwise(w1, f1), BipolarHypervector({1, -1, 1}));
  EXPECT_EQ(bind_elementwise(w2, f2), BipolarHypervector({1, -1, 1}));
  std::vector<Hypervector> terms{bind_elementwise(w1, f1).to_real(), bind_elementwise(w2, f2).to_real()};
  EXPECT_EQ(superpose(terms), Hypervector({2, -2, 2}));
  EXPECT_EQ(clip(superpose(terms), 1), Hypervector({1, -1, 1}));
}

TEST(Encode, MatchesOracle) {
  const auto proj = init_projection(6, 101, SeedSpec(3));
  for (int kappa : {1, 2, 3, 7}) {
    for (std::uint64_t t = 0; t < 20; ++t) {
      const auto x = random_features(6, t);
      EXPECT_EQ(encode_sample(x, proj, kappa).values, oracle_encode(x, proj, kappa));
    }
  }
}

TEST(Encode, SingleFeatureIsBipolar) {
  const auto proj = init_projection(1, 64, SeedSpec(8));
  const std::vector<double> x{0.3};
  const auto h = encode_sample(x, proj, 1);
  const auto expected = bind_elementwise(proj.column(0), thermometer_encode(0.3, 64));
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(h.values[i], expected[i]);
}

TEST(Encode, ClipInactiveWhenKappaAtLeastK) {
  const auto proj = init_projection(5, 200, SeedSpec(9));
  const auto x = random_features(5, 2);
  const auto raw = encode_unclipped(x, proj);
  EXPECT_EQ(encode_sample(x, proj, 5).values, raw);
  EXPECT_EQ(encode_sample(x, proj, 9).values, raw);
  for (auto e : raw) EXPECT_LE(std::abs(e), 5);
}

TEST(Encode, EntriesBoundedByKappa) {
  const auto proj = init_projection(12, 300, SeedSpec(10));
  const auto h = encode_sample(random_features(12, 4), proj, 3);
  EXPECT_EQ(h.kappa, 3);
  for (auto e : h.values) EXPECT_LE(std::abs(e), 3);
}

TEST(Encode, Locality) {
  const auto proj = init_projection(4, 120, SeedSpec(12));
  auto x = random_features(4, 5);
  const auto a = encode_unclipped(x, proj);
  const auto fa = thermometer_encode(x[2], 120);
  x[2] = std::fmod(x[2] + 0.37, 1.0);
  const auto b = encode_unclipped(x, proj);
  const auto fb = thermometer_encode(x[2], 120);
  const auto col = proj.column_view(2);
  for (std::size_t i = 0; i < 120; ++i) {
    EXPECT_EQ(b[i] - a[i], col[i] * (fb[i] - fa[i]));
  }
}

TEST(Encode, DimensionMismatch) {
  const auto proj = init_projection(3, 16, SeedSpec(1));
  const std::vector<double> x{0.1, 0.2};
  EXPECT_THROW(encode_sample(x, proj, 1), DimensionError);
}

TEST(Encode, BatchMatchesSamples) {
  const auto proj = init_projection(3, 50, SeedSpec(6));
  Eigen::MatrixXd samples(4, 3);
  samples << 0, 0.5, 1, 0.2, 0.3, 0.4, 1, 1, 1, 0.9, 0.1, 0.55;
  const auto batch = encode_batch(samples, proj, 2);
  for (int r = 0; r < 4; ++r) {
    const std::vector<double> x{samples(r, 0), samples(r, 1), samples(r, 2)};
    const auto h = encode_sample(x, proj, 2).to_eigen();
    EXPECT_EQ(batch.row(r).transpose(), h);
  }
}

TEST(Projection, DeterministicAndSeedSensitive) {
  const auto a = init_projection(8, 256, SeedSpec(1));
  EXPECT_EQ(a, init_projection(8, 256, SeedSpec(1)));
  EXPECT_NE(a.column(0), init_projection(8, 256, SeedSpec(2)).column(0));
}

TEST(Projection, ColumnsFromPerColumnStreams) {
  const auto p = init_projection(3, 128, SeedSpec(5));
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(p.column(j), random_bipolar(128, SeedSpec(5).child("projection_column", j)));
  }
}

TEST(Projection, ColumnsNearOrthogonal) {
  const auto p = init_projection(20, 1000, SeedSpec(21));
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t a = 0; a < 20; ++a) {
    for (std::size_t b = a + 1; b < 20; ++b) {
      sum += std::abs(cosine(p.column(a).to_real(), p.column(b).to_real()));
      ++pairs;
    }
  }
  EXPECT_LT(sum / pairs, 0.05);
}

TEST(Projection, RejectsZeroSizes) {
  EXPECT_THROW(init_projection(0, 10, SeedSpec(1)), InvalidParameter);
  EXPECT_THROW(init_projection(3, 0, SeedSpec(1)), InvalidParameter);
}
