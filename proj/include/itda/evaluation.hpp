#pragma once

#include "itda/data_model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace itda {

struct PredictionResult {
  std::vector<int> predicted;
  std::optional<double> accuracy;                       // when truth is supplied
  std::vector<std::optional<double>> per_class_accuracy;  // empty for classes absent from truth
  std::vector<std::vector<long>> confusion;             // [truth][predicted]
};

/// Label of the nearest source row under L for every target row. Equidistant
/// neighbors resolve to the lowest source index.
std::vector<int> knn1_classify(const Transform& transform, const SourceDataset& source,
                               const TargetDataset& target);

/// Fraction of positions where predicted == truth.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Accuracy, per-class accuracy and confusion counts over `num_classes` classes.
PredictionResult score(std::vector<int> predicted, std::span<const int> truth, int num_classes);

/// 1-NN after projecting onto the top-d principal directions of the target.
PredictionResult pca_baseline(const SourceDataset& source, const TargetDataset& target, Index d,
                              std::optional<std::span<const int>> truth = std::nullopt);

/// 1-NN in the original feature space.
PredictionResult identity_baseline(const SourceDataset& source, const TargetDataset& target,
                                   std::optional<std::span<const int>> truth = std::nullopt);

}  // namespace itda
