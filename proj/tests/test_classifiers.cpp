#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hdcdist/classifiers.hpp"
#include "hdcdist/errors.hpp"
#include "hdcdist/seed.hpp"

using namespace hdcdist;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Solves A X = B by Gaussian elimination with partial pivoting.
MatrixXd gauss_solve(MatrixXd a, MatrixXd b) {
  const int n = static_cast<int>(a.rows());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    }
    a.row(c).swap(a.row(piv));
    b.row(c).swap(b.row(piv));
    for (int r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (int k = c; k < n; ++k) a(r, k) -= f * a(c, k);
      for (int k = 0; k < b.cols(); ++k) b(r, k) -= f * b(c, k);
    }
  }
  MatrixXd x(n, b.cols());
  for (int r = n - 1; r >= 0; --r) {
    for (int k = 0; k < b.cols(); ++k) {
      double s = b(r, k);
      for (int j = r + 1; j < n; ++j) s -= a(r, j) * x(j, k);
      x(r, k) = s / a(r, r);
    }
  }
  return x;
}

// Ridge solution written out through the normal equations.
MatrixXd oracle_rls(const MatrixXd& h, const MatrixXd& y, double lambda) {
  MatrixXd gram = h.transpose() * h;
  for (int i = 0; i < gram.rows(); ++i) gram(i, i) += lambda;
  return gauss_solve(gram, h.transpose() * y).transpose();
}

MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng{SeedSpec(seed)};
  MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.gaussian();
  }
  return m;
}

ActivationMatrix random_activations(int m, int d, int l, std::uint64_t seed) {
  ActivationMatrix a;
  a.rows = random_matrix(m, d, seed);
  a.num_classes = l;
  for (int i = 0; i < m; ++i) a.labels.push_back(i % l + 1);
  return a;
}

double regularized_loss(const MatrixXd& h, const MatrixXd& y, const MatrixXd& w, double lambda) {
  return (h * w.transpose() - y).squaredNorm() + lambda * w.squaredNorm();
}

}  // namespace

TEST(OneHot, Rows) {
  const auto y = one_hot({1, 3, 2}, 3);
  MatrixXd expected(3, 3);
  expected << 1, 0, 0, 0, 0, 1, 0, 1, 0;
  EXPECT_EQ(y, expected);
}

TEST(Rls, IdentityExamples) {
  const MatrixXd i2 = MatrixXd::Identity(2, 2);
  EXPECT_TRUE(train_rls(i2, i2, 0.0).weights.isApprox(i2, 1e-12));
  EXPECT_TRUE(train_rls(i2, i2, 1.0).weights.isApprox(0.5 * i2, 1e-12));
}

TEST(Rls, MatchesGaussianEliminationOracle) {
  const auto a = random_activations(50, 10, 3, 1);
  const auto y = one_hot(a.labels, 3);
  const auto w = train_rls(a, 0.25);
  EXPECT_EQ(w.kind, ClassifierKind::kRls);
  EXPECT_EQ(w.weights.rows(), 3);
  EXPECT_EQ(w.weights.cols(), 10);
  EXPECT_LT((w.weights - oracle_rls(a.rows, y, 0.25)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Rls, KernelFormMatchesOracleWhenWide) {
  const auto a = random_activations(8, 20, 3, 2);
  const auto y = one_hot(a.labels, 3);
  for (double lambda : {0.01, 1.0, 30.0}) {
    const auto w = train_rls(a, lambda);
    EXPECT_LT((w.weights - oracle_rls(a.rows, y, lambda)).cwiseAbs().maxCoeff(), 1e-6) << lambda;
  }
}

TEST(Rls, SingularAtZeroLambda) {
  MatrixXd h(3, 2);
  h << 1, 1, 2, 2, 3, 3;
  EXPECT_THROW(train_rls(h, one_hot({1, 2, 1}, 2), 0.0), SingularSystemError);
}

TEST(Rls, RejectsNegativeLambdaAndShapeMismatch) {
  const MatrixXd i2 = MatrixXd::Identity(2, 2);
  EXPECT_THROW(train_rls(i2, i2, -1.0), InvalidParameter);
  EXPECT_THROW(train_rls(i2, MatrixXd::Identity(3, 3), 1.0), DimensionError);
}

TEST(Rls, PerturbationNeverLowersLoss) {
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto a = random_activations(30, 6, 3, 10 + t);
    const auto y = one_hot(a.labels, 3);
    const double lambda = 0.5;
    const auto w = train_rls(a, lambda).weights;
    const double base = regularized_loss(a.rows, y, w, lambda);
    for (std::uint64_t p = 0; p < 20; ++p) {
      const MatrixXd dir = 1e-3 * random_matrix(3, 6, 1000 * t + p);
      EXPECT_GE(regularized_loss(a.rows, y, w + dir, lambda), base - 1e-12);
    }
  }
}

TEST(Rls, ShrinksWithLambda) {
  const auto a = random_activations(40, 12, 4, 3);
  double previous = INFINITY;
  for (double lambda : {0.01, 0.1, 1.0, 10.0}) {
    const double norm = train_rls(a, lambda).weights.norm();
    EXPECT_LE(norm, previous + 1e-12);
    previous = norm;
  }
}

TEST(Centroids, Examples) {
  ActivationMatrix one;
  one.rows = MatrixXd(1, 2);
  one.rows << 3, 4;
  one.labels = {1};
  one.num_classes = 2;
  const auto w = train_centroids(one);
  EXPECT_NEAR(w.weights(0, 0), 0.6, 1e-12);
  EXPECT_NEAR(w.weights(0, 1), 0.8, 1e-12);
  // Class 2 had no samples.
  EXPECT_EQ(w.weights.row(1), Eigen::RowVectorXd::Zero(2));
  EXPECT_FALSE(w.warnings.empty());

  ActivationMatrix two;
  two.rows = MatrixXd(2, 3);
  two.rows << 1, 1, 0, 1, 0, 1;
  two.labels = {1, 1};
  two.num_classes = 2;
  const auto c = train_centroids(two);
  const double s = std::sqrt(6.0);
  EXPECT_NEAR(c.weights(0, 0), 2 / s, 1e-12);
  EXPECT_NEAR(c.weights(0, 1), 1 / s, 1e-12);
  EXPECT_NEAR(c.weights(0, 2), 1 / s, 1e-12);
  EXPECT_EQ(c.class_counts, (std::vector<std::uint64_t>{2, 0}));
  EXPECT_EQ(c.class_sums.row(0), Eigen::RowVector3d(2, 1, 1));
}

TEST(Centroids, UnitNormRows) {
  const auto a = random_activations(60, 15, 4, 7);
  const auto w = train_centroids(a);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(w.weights.row(i).norm(), 1.0, 1e-12);
}

TEST(Centroids, FromSumsMatchesTraining) {
  const auto a = random_activations(20, 5, 3, 8);
  const auto w = train_centroids(a);
  const auto rebuilt = centroids_from_sums(w.class_sums, w.class_counts);
  EXPECT_EQ(rebuilt.weights, w.weights);
}

TEST(Centroids, SeparatedClustersFitPerfectly) {
  // Cluster means at +-5 on distinct axes, noise of at most 1 per entry.
  const int d = 12, l = 3, per = 20;
  ActivationMatrix a;
  a.num_classes = l;
  a.rows = MatrixXd::Zero(l * per, d);
  Rng rng{SeedSpec(31)};
  for (int c = 0; c < l; ++c) {
    for (int s = 0; s < per; ++s) {
      const int r = c * per + s;
      for (int j = 0; j < d; ++j) a.rows(r, j) = rng.uniform() * 2 - 1;
      a.rows(r, 4 * c) += 5;
      a.rows(r, 4 * c + 1) += 5;
      a.labels.push_back(c + 1);
    }
  }
  EXPECT_EQ(evaluate(train_centroids(a), a), 1.0);
}

TEST(Predict, Examples) {
  ClassifierMatrix w;
  w.weights = MatrixXd::Identity(2, 2);
  EXPECT_EQ(predict(w, VectorXd(Eigen::Vector2d(0.9, 0.1))), 1);
  EXPECT_EQ(predict(w, VectorXd(Eigen::Vector2d(0.1, 0.9))), 2);
  // Exact tie goes to the lower index.
  EXPECT_EQ(predict(w, VectorXd(Eigen::Vector2d(0.5, 0.5))), 1);
}

TEST(Predict, ScaleInvariant) {
  ClassifierMatrix w;
  w.weights = random_matrix(4, 9, 3);
  ClassifierMatrix scaled = w;
  scaled.weights *= 3.7;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const VectorXd h = random_matrix(9, 1, 100 + t);
    EXPECT_EQ(predict(w, h), predict(scaled, h));
    EXPECT_EQ(predict(w, h), predict(w, VectorXd(0.01 * h)));
  }
}

TEST(Predict, DimensionMismatch) {
  ClassifierMatrix w;
  w.weights = MatrixXd::Identity(2, 2);
  EXPECT_THROW(predict(w, VectorXd(VectorXd::Zero(3))), DimensionError);
}

TEST(Predict, HiddenActivationOverload) {
  ClassifierMatrix w;
  w.weights = MatrixXd::Identity(3, 3);
  HiddenActivation h{{-1, 2, 1}, 2};
  EXPECT_EQ(predict(w, h), 2);
}

TEST(Evaluate, Basics) {
  ClassifierMatrix w;
  w.weights = MatrixXd::Identity(2, 2);
  ActivationMatrix test;
  test.rows = MatrixXd::Identity(2, 2);
  test.labels = {1, 2};
  test.num_classes = 2;
  EXPECT_EQ(evaluate(w, test), 1.0);
  test.labels = {2, 1};
  EXPECT_EQ(evaluate(w, test), 0.0);

  ActivationMatrix single;
  single.rows = MatrixXd(1, 2);
  single.rows << 0.2, 0.8;
  single.labels = {2};
  single.num_classes = 2;
  EXPECT_EQ(evaluate(w, single), 1.0);

  ActivationMatrix empty;
  empty.rows = MatrixXd(0, 2);
  empty.num_classes = 2;
  EXPECT_THROW(evaluate(w, empty), InvalidParameter);
}

TEST(Evaluate, RandomLabelsNearChance) {
  const int l = 4;
  auto a = random_activations(4000, 10, l, 5);
  const auto w = train_centroids(random_activations(400, 10, l, 6));
  Rng rng{SeedSpec(77)};
  for (auto& label : a.labels) label = static_cast<int>(rng.below(l)) + 1;
  EXPECT_NEAR(evaluate(w, a), 1.0 / l, 0.05);
}

TEST(ActivationMatrix, ValidateRejectsBadLabels) {
  auto a = random_activations(5, 3, 2, 1);
  a.labels[0] = 3;
  EXPECT_THROW(a.validate(), InvalidParameter);
  a.labels[0] = 0;
  EXPECT_THROW(a.validate(), InvalidParameter);
  a.labels.pop_back();
  EXPECT_THROW(a.validate(), InvalidParameter);
}

TEST(ClassifierKind, Names) {
  EXPECT_EQ(classifier_kind_from_string("rls"), ClassifierKind::kRls);
  EXPECT_EQ(classifier_kind_from_string("centroid"), ClassifierKind::kCentroid);
  EXPECT_STREQ(to_string(ClassifierKind::kCentroid), "centroid");
  EXPECT_THROW(classifier_kind_from_string("svm"), InvalidParameter);
}
