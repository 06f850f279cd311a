#include "hdcdist/classifiers.hpp"

#include <cmath>

#include "hdcdist/errors.hpp"

namespace hdcdist {
namespace {

constexpr double kMinReciprocalCondition = 1e-14;

template <typename Factor>
void require_factored(const Factor& factor, double lambda) {
  if (factor.info() != Eigen::Success || factor.rcond() < kMinReciprocalCondition) {
    throw SingularSystemError("train_rls: regularized Gram matrix is singular (lambda=" +
                              std::to_string(lambda) + "); use lambda > 0");
  }
}

}  // namespace

void ActivationMatrix::validate() const {
  if (static_cast<std::size_t>(rows.rows()) != labels.size()) {
    throw InvalidParameter("activation matrix: row count does not match label count");
  }
  if (num_classes < 1) throw InvalidParameter("activation matrix: num_classes must be >= 1");
  for (auto label : labels) {
    if (label < 1 || label > num_classes) {
      throw InvalidParameter("activation matrix: label " + std::to_string(label) +
                             " outside [1, " + std::to_string(num_classes) + "]");
    }
  }
}

Eigen::MatrixXd one_hot(const std::vector<ClassLabel>& labels, int num_classes) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
  for (std::size_t m = 0; m < labels.size(); ++m) {
    if (labels[m] < 1 || labels[m] > num_classes) {
      throw InvalidParameter("one_hot: label out of range");
    }
    y(static_cast<Eigen::Index>(m), labels[m] - 1) = 1.0;
  }
  return y;
}

const char* to_string(ClassifierKind kind) {
  return kind == ClassifierKind::kRls ? "rls" : "centroid";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
  if (name == "rls") return ClassifierKind::kRls;
  if (name == "centroid" || name == "centroids") return ClassifierKind::kCentroid;
  throw InvalidParameter("unknown classifier kind '" + name + "'");
}

ClassifierMatrix train_rls(const Eigen::MatrixXd& activations, const Eigen::MatrixXd& targets,
                           double lambda) {
  if (activations.rows() != targets.rows()) {
    throw DimensionError("train_rls: H and Y row counts differ");
  }
  if (activations.rows() < 1) throw InvalidParameter("train_rls: no training rows");
  if (!(lambda >= 0.0)) throw InvalidParameter("train_rls: lambda must be >= 0");

  const Eigen::Index m = activations.rows();
  const Eigen::Index d = activations.cols();
  Eigen::MatrixXd solution;  // D x L
  if (m < d && lambda > 0.0) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(activations);
    gram.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(gram.selfadjointView<Eigen::Lower>());
    require_factored(llt, lambda);
    solution = activations.transpose() * llt.solve(targets);
  } else {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(activations.transpose());
    gram.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(gram.selfadjointView<Eigen::Lower>());
    require_factored(llt, lambda);
    solution = llt.solve(activations.transpose() * targets);
  }

  ClassifierMatrix out;
  out.kind = ClassifierKind::kRls;
  out.weights = solution.transpose();
  return out;
}

ClassifierMatrix train_rls(const ActivationMatrix& data, double lambda) {
  data.validate();
  return train_rls(data.rows, one_hot(data.labels, data.num_classes), lambda);
}

ClassifierMatrix centroids_from_sums(Eigen::MatrixXd class_sums,
                                     std::vector<std::uint64_t> class_counts) {
  ClassifierMatrix out;
  out.kind = ClassifierKind::kCentroid;
  out.weights = Eigen::MatrixXd::Zero(class_sums.rows(), class_sums.cols());
  for (Eigen::Index i = 0; i < class_sums.rows(); ++i) {
    const double norm = class_sums.row(i).norm();
    if (norm > 0.0) {
      out.weights.row(i) = class_sums.row(i) / norm;
    } else {
      out.warnings.push_back("class " + std::to_string(i + 1) +
                             " has a zero-norm sum; centroid row left at zero");
    }
  }
  out.class_sums = std::move(class_sums);
  out.class_counts = std::move(class_counts);
  return out;
}

ClassifierMatrix train_centroids(const ActivationMatrix& data) {
  data.validate();
  if (data.size() < 1) throw InvalidParameter("train_centroids: no training rows");
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(data.num_classes, data.dim());
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(data.num_classes), 0);
  for (Eigen::Index m = 0; m < data.size(); ++m) {
    const int c = data.labels[static_cast<std::size_t>(m)] - 1;
    sums.row(c) += data.rows.row(m);
    ++counts[static_cast<std::size_t>(c)];
  }
  return centroids_from_sums(std::move(sums), std::move(counts));
}

ClassLabel predict(const ClassifierMatrix& w, const Eigen::VectorXd& h) {
  if (w.dim() != h.size()) {
    throw DimensionError("predict: classifier dimension " + std::to_string(w.dim()) +
                         " vs activation length " + std::to_string(h.size()));
  }
  const Eigen::VectorXd scores = w.weights * h;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return static_cast<ClassLabel>(best + 1);
}

ClassLabel predict(const ClassifierMatrix& w, const HiddenActivation& h) {
  return predict(w, h.to_eigen());
}

std::vector<ClassLabel> predict_batch(const ClassifierMatrix& w, const Eigen::MatrixXd& activations) {
  if (w.dim() != activations.cols()) throw DimensionError("predict_batch: dimension mismatch");
  const Eigen::MatrixXd scores = activations * w.weights.transpose();  // M x L
  std::vector<ClassLabel> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index m = 0; m < scores.rows(); ++m) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < scores.cols(); ++i) {
      if (scores(m, i) > scores(m, best)) best = i;
    }
    out[static_cast<std::size_t>(m)] = static_cast<ClassLabel>(best + 1);
  }
  return out;
}

double evaluate(const ClassifierMatrix& w, const ActivationMatrix& test) {
  if (test.size() < 1) throw InvalidParameter("evaluate: empty test set");
  const auto predicted = predict_batch(w, test.rows);
  std::size_t correct = 0;
  for (std::size_t m = 0; m < predicted.size(); ++m) {
    if (predicted[m] == test.labels[m]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

}  // namespace hdcdist
