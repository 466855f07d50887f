#include "itda/evaluation.hpp"

#include "itda/neighbor_model.hpp"
#include "itda/optimizer.hpp"

#include <stdexcept>
#include <string>

namespace itda {

std::vector<int> knn1_classify(const Transform& transform, const SourceDataset& source,
                               const TargetDataset& target) {
  require_same_dim(source, target);
  if (source.size() == 0) throw std::invalid_argument("1-NN needs a non-empty source");
  // Pool-major layout: column t holds the distances of target row t.
  const Eigen::MatrixXd dist = pairwise_sq_dists(transform.apply(source.features()), transform.apply(target.features()));
  std::vector<int> out(static_cast<std::size_t>(target.size()));
  for (Index t = 0; t < target.size(); ++t) {
    Index best = 0;
    for (Index s = 1; s < source.size(); ++s) {
      if (dist(s, t) < dist(best, t)) best = s;
    }
    out[static_cast<std::size_t>(t)] = source.labels()[static_cast<std::size_t>(best)];
  }
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("prediction count " + std::to_string(predicted.size()) +
                                " does not match truth count " + std::to_string(truth.size()));
  if (truth.empty()) throw std::invalid_argument("accuracy of an empty prediction set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

PredictionResult score(std::vector<int> predicted, std::span<const int> truth, int num_classes) {
  PredictionResult out;
  out.accuracy = accuracy(predicted, truth);
  const auto k = static_cast<std::size_t>(num_classes);
  out.confusion.assign(k, std::vector<long>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int y = truth[i], p = predicted[i];
    if (y < 0 || y >= num_classes || p < 0 || p >= num_classes)
      throw std::invalid_argument("label outside [0, " + std::to_string(num_classes) + ") at row " + std::to_string(i));
    ++out.confusion[static_cast<std::size_t>(y)][static_cast<std::size_t>(p)];
  }
  out.per_class_accuracy.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    long total = 0;
    for (long v : out.confusion[c]) total += v;
    if (total > 0) out.per_class_accuracy[c] = static_cast<double>(out.confusion[c][c]) / static_cast<double>(total);
  }
  out.predicted = std::move(predicted);
  return out;
}

namespace {

PredictionResult finish(std::vector<int> predicted, const SourceDataset& source,
                        std::optional<std::span<const int>> truth) {
  if (!truth) {
    PredictionResult out;
    out.predicted = std::move(predicted);
    return out;
  }
  return score(std::move(predicted), *truth, source.num_classes());
}

}  // namespace

PredictionResult pca_baseline(const SourceDataset& source, const TargetDataset& target, Index d,
                              std::optional<std::span<const int>> truth) {
  const Transform l = init_target_pca(target, d);
  return finish(knn1_classify(l, source, target), source, truth);
}

PredictionResult identity_baseline(const SourceDataset& source, const TargetDataset& target,
                                   std::optional<std::span<const int>> truth) {
  return finish(knn1_classify(Transform::identity(source.dim()), source, target), source, truth);
}

}  // namespace itda
