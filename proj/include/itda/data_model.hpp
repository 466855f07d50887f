#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace itda {

using Index = Eigen::Index;

/// Dense collection of D-dimensional instances, one per row.
///
/// Every value is finite and D >= 1. A matrix with zero rows is allowed so
/// that datasets can be assembled incrementally; the dataset types enforce
/// their own minimum sizes.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Eigen::MatrixXd values);

  Index rows() const noexcept { return values_.rows(); }
  Index dim() const noexcept { return values_.cols(); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  auto row(Index i) const { return values_.row(i); }

  bool operator==(const FeatureMatrix& other) const {
    return values_.rows() == other.values_.rows() && values_.cols() == other.values_.cols() &&
           values_ == other.values_;
  }

 private:
  Eigen::MatrixXd values_;
};

/// Labeled source-domain instances. Labels are 0-based class ids in
/// [0, num_classes) and every class has at least one instance.
class SourceDataset {
 public:
  SourceDataset(FeatureMatrix features, std::vector<int> labels, int num_classes);

  /// Infers num_classes as max(label) + 1.
  static SourceDataset with_inferred_classes(FeatureMatrix features, std::vector<int> labels);

  const FeatureMatrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int num_classes() const noexcept { return num_classes_; }
  Index size() const noexcept { return features_.rows(); }
  Index dim() const noexcept { return features_.dim(); }

  /// Instances per class, indexed by class id.
  std::vector<Index> class_counts() const;

  bool operator==(const SourceDataset& other) const = default;

 private:
  FeatureMatrix features_;
  std::vector<int> labels_;
  int num_classes_;
};

/// Unlabeled target-domain instances (at least one).
class TargetDataset {
 public:
  explicit TargetDataset(FeatureMatrix features);

  const FeatureMatrix& features() const noexcept { return features_; }
  Index size() const noexcept { return features_.rows(); }
  Index dim() const noexcept { return features_.dim(); }

  bool operator==(const TargetDataset& other) const = default;

 private:
  FeatureMatrix features_;
};

/// Linear map L (d x D). Distances in the learned space are
/// ||L x_i - L x_j||^2, i.e. the Mahalanobis metric M = L^T L.
class Transform {
 public:
  explicit Transform(Eigen::MatrixXd matrix);

  static Transform identity(Index dim);

  Index out_dim() const noexcept { return matrix_.rows(); }
  Index in_dim() const noexcept { return matrix_.cols(); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

  /// Trace(L^T L), the squared Frobenius norm of L.
  double trace_norm() const { return matrix_.squaredNorm(); }

  /// Maps every row of `features` into the learned space (rows x d).
  Eigen::MatrixXd apply(const FeatureMatrix& features) const;

  bool operator==(const Transform& other) const {
    return matrix_.rows() == other.matrix_.rows() && matrix_.cols() == other.matrix_.cols() &&
           matrix_ == other.matrix_;
  }

 private:
  Eigen::MatrixXd matrix_;
};

/// Throws std::invalid_argument unless source and target share a dimension.
void require_same_dim(const SourceDataset& source, const TargetDataset& target);

// Standardization ---------------------------------------------------------

inline constexpr double kStdFloor = 1e-8;

struct StandardizationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;  // entries >= kStdFloor
};

/// Column means and population standard deviations (floored at kStdFloor).
StandardizationStats fit_standardizer(const FeatureMatrix& features);

/// out[i][k] = (in[i][k] - mean[k]) / std[k]
FeatureMatrix apply_standardizer(const StandardizationStats& stats, const FeatureMatrix& features);

enum class StandardizeMode { Pooled, PerDomain, Off };

/// Standardizes both domains. Pooled fits one set of statistics on the union
/// of source and target rows; PerDomain fits each domain separately.
std::pair<SourceDataset, TargetDataset> standardize(const SourceDataset& source,
                                                    const TargetDataset& target,
                                                    StandardizeMode mode);

/// Row-wise concatenation of two matrices with equal column counts.
FeatureMatrix stack_rows(const FeatureMatrix& top, const FeatureMatrix& bottom);

}  // namespace itda
