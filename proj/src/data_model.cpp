#include "itda/data_model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace itda {

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.cols() < 1) throw std::invalid_argument("feature matrix needs dimensionality >= 1");
  if (!values_.allFinite()) throw std::invalid_argument("feature matrix contains NaN or Inf");
}

SourceDataset::SourceDataset(FeatureMatrix features, std::vector<int> labels, int num_classes)
    : features_(std::move(features)), labels_(std::move(labels)), num_classes_(num_classes) {
  if (static_cast<Index>(labels_.size()) != features_.rows())
    throw std::invalid_argument("label count " + std::to_string(labels_.size()) +
                                " does not match row count " + std::to_string(features_.rows()));
  if (num_classes_ < 1) throw std::invalid_argument("num_classes must be >= 1");
  for (int y : labels_) {
    if (y < 0 || y >= num_classes_)
      throw std::invalid_argument("label " + std::to_string(y) + " outside [0, " +
                                  std::to_string(num_classes_) + ")");
  }
  auto counts = class_counts();
  for (int c = 0; c < num_classes_; ++c) {
    if (counts[c] == 0) throw std::invalid_argument("class " + std::to_string(c) + " has no instances");
  }
}

SourceDataset SourceDataset::with_inferred_classes(FeatureMatrix features, std::vector<int> labels) {
  if (labels.empty()) throw std::invalid_argument("source dataset is empty");
  int c = *std::max_element(labels.begin(), labels.end()) + 1;
  return SourceDataset(std::move(features), std::move(labels), c);
}

std::vector<Index> SourceDataset::class_counts() const {
  std::vector<Index> counts(static_cast<std::size_t>(num_classes_), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

TargetDataset::TargetDataset(FeatureMatrix features) : features_(std::move(features)) {
  if (features_.rows() < 1) throw std::invalid_argument("target dataset is empty");
}

Transform::Transform(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() < 1 || matrix_.rows() > matrix_.cols())
    throw std::invalid_argument("transform shape " + std::to_string(matrix_.rows()) + "x" +
                                std::to_string(matrix_.cols()) + " violates 1 <= d <= D");
  if (!matrix_.allFinite()) throw std::invalid_argument("transform contains NaN or Inf");
}

Transform Transform::identity(Index dim) {
  return Transform(Eigen::MatrixXd::Identity(dim, dim));
}

Eigen::MatrixXd Transform::apply(const FeatureMatrix& features) const {
  if (features.dim() != in_dim())
    throw std::invalid_argument("transform expects dimension " + std::to_string(in_dim()) + ", got " +
                                std::to_string(features.dim()));
  return features.values() * matrix_.transpose();
}

void require_same_dim(const SourceDataset& source, const TargetDataset& target) {
  if (source.dim() != target.dim())
    throw std::invalid_argument("source dimension " + std::to_string(source.dim()) +
                                " differs from target dimension " + std::to_string(target.dim()));
}

StandardizationStats fit_standardizer(const FeatureMatrix& features) {
  if (features.rows() < 2) throw std::invalid_argument("insufficient data: standardization needs >= 2 rows");
  const auto& x = features.values();
  StandardizationStats stats;
  stats.mean = x.colwise().mean().transpose();
  Eigen::MatrixXd centered = x.rowwise() - stats.mean.transpose();
  stats.std = (centered.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt().transpose();
  stats.std = stats.std.cwiseMax(kStdFloor);
  return stats;
}

FeatureMatrix apply_standardizer(const StandardizationStats& stats, const FeatureMatrix& features) {
  if (stats.mean.size() != features.dim() || stats.std.size() != features.dim())
    throw std::invalid_argument("standardizer dimension does not match features");
  Eigen::MatrixXd out = (features.values().rowwise() - stats.mean.transpose()).array().rowwise() /
                        stats.std.transpose().array();
  return FeatureMatrix(std::move(out));
}

FeatureMatrix stack_rows(const FeatureMatrix& top, const FeatureMatrix& bottom) {
  if (top.dim() != bottom.dim()) throw std::invalid_argument("cannot stack matrices of different dimension");
  Eigen::MatrixXd all(top.rows() + bottom.rows(), top.dim());
  all << top.values(), bottom.values();
  return FeatureMatrix(std::move(all));
}

std::pair<SourceDataset, TargetDataset> standardize(const SourceDataset& source,
                                                    const TargetDataset& target,
                                                    StandardizeMode mode) {
  require_same_dim(source, target);
  switch (mode) {
    case StandardizeMode::Off:
      return {source, target};
    case StandardizeMode::Pooled: {
      auto stats = fit_standardizer(stack_rows(source.features(), target.features()));
      return {SourceDataset(apply_standardizer(stats, source.features()), source.labels(), source.num_classes()),
              TargetDataset(apply_standardizer(stats, target.features()))};
    }
    case StandardizeMode::PerDomain: {
      auto s_stats = fit_standardizer(source.features());
      auto t_stats = fit_standardizer(target.features());
      return {SourceDataset(apply_standardizer(s_stats, source.features()), source.labels(), source.num_classes()),
              TargetDataset(apply_standardizer(t_stats, target.features()))};
    }
  }
  throw std::invalid_argument("unknown standardization mode");
}

}  // namespace itda
