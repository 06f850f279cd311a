#pragma once

// Output-layer training (regularized least squares and class centroids) and
// winner-takes-all prediction.
//
// Class labels are 1-based throughout: a problem with L classes uses labels
// 1..L. Classifier weights are stored L x D so both classifier kinds and the
// HRR codec share one row layout.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hdcdist/rvfl.hpp"

namespace hdcdist {

using ClassLabel = int;

// Rows of H are hidden activations; labels[m] is the class of row m.
struct ActivationMatrix {
  Eigen::MatrixXd rows;
  std::vector<ClassLabel> labels;
  int num_classes = 0;

  [[nodiscard]] Eigen::Index size() const noexcept { return rows.rows(); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return rows.cols(); }
  // Checks shape agreement and label range; throws InvalidParameter.
  void validate() const;
};

// M x L one-hot target matrix.
Eigen::MatrixXd one_hot(const std::vector<ClassLabel>& labels, int num_classes);

enum class ClassifierKind : std::uint8_t { kRls, kCentroid };

const char* to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

struct ClassifierMatrix {
  ClassifierKind kind = ClassifierKind::kRls;
  Eigen::MatrixXd weights;  // L x D

  // Centroid kind only: unnormalized per-class sums and sample counts.
  // Keeping them lets agents aggregate sums and normalize afterwards.
  Eigen::MatrixXd class_sums;
  std::vector<std::uint64_t> class_counts;

  std::vector<std::string> warnings;

  [[nodiscard]] int num_classes() const noexcept { return static_cast<int>(weights.rows()); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return weights.cols(); }
};

// W^out = ((H^T H + lambda I)^{-1} H^T Y)^T, solved by Cholesky. When
// M < D the equivalent kernel form H^T (H H^T + lambda I)^{-1} Y is used.
// Throws SingularSystemError when the system cannot be factored (only
// possible for lambda == 0).
ClassifierMatrix train_rls(const Eigen::MatrixXd& activations, const Eigen::MatrixXd& targets,
                           double lambda);
ClassifierMatrix train_rls(const ActivationMatrix& data, double lambda);

// Row i = (sum of class-i activations) / ||that sum||. An empty or zero-sum
// class gets an all-zero row and a warning.
ClassifierMatrix train_centroids(const ActivationMatrix& data);

// Builds a centroid classifier from already-accumulated class sums.
ClassifierMatrix centroids_from_sums(Eigen::MatrixXd class_sums,
                                     std::vector<std::uint64_t> class_counts);

// Winner-takes-all over W h; ties go to the lowest class index.
ClassLabel predict(const ClassifierMatrix& w, const Eigen::VectorXd& h);
ClassLabel predict(const ClassifierMatrix& w, const HiddenActivation& h);
std::vector<ClassLabel> predict_batch(const ClassifierMatrix& w, const Eigen::MatrixXd& activations);

// Fraction of rows whose prediction equals the label. Throws InvalidParameter
// on an empty test set.
double evaluate(const ClassifierMatrix& w, const ActivationMatrix& test);

}  // namespace hdcdist
