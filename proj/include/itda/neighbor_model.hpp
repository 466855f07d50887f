#pragma once

#include "itda/data_model.hpp"

#include <optional>
#include <span>

namespace itda {

/// Which instances act as candidate neighbors for which queries.
enum class PoolKind {
  SourceOnlyLoo,    // queries: source rows; pool: the other source rows
  SourceForTarget,  // queries: target rows; pool: every source row
  AllLoo,           // queries: all rows; pool: every other row of either domain
};

/// Nonnegative entries summing to 1 (within 1e-9).
class ProbabilityVector {
 public:
  explicit ProbabilityVector(Eigen::VectorXd entries);

  Index size() const noexcept { return entries_.size(); }
  double operator[](Index i) const { return entries_[i]; }
  const Eigen::VectorXd& entries() const noexcept { return entries_; }

 private:
  Eigen::VectorXd entries_;
};

/// Squared distances ||L q_i - L p_j||^2 for every query/pool pair.
Eigen::MatrixXd pairwise_sq_dists(const Transform& transform, const FeatureMatrix& queries,
                                  const FeatureMatrix& pool);

/// Same as above on already-transformed coordinates (rows are points).
Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& pool);

/// Stochastic-neighbor probabilities p_j proportional to exp(-d_j^2), with
/// the excluded entry (if any) fixed to zero. Uses a log-sum-exp shift.
ProbabilityVector neighbor_probs(const Eigen::Ref<const Eigen::VectorXd>& sq_dist_row,
                                 std::optional<Index> exclude = std::nullopt);

/// Per-category mass: out[c] = sum_j probs[j] * [labels[j] == c].
ProbabilityVector posterior_estimate(const ProbabilityVector& probs, std::span<const int> pool_labels,
                                     int num_classes);

/// Shannon entropy in nats with 0 ln 0 = 0.
double entropy(const ProbabilityVector& p);

/// Queries, pool and pool labels resolved for a PoolKind.
struct NeighborPosteriors {
  Eigen::MatrixXd probs;       // |queries| x |pool|, rows are neighbor_probs
  Eigen::MatrixXd posteriors;  // |queries| x categories
};

/// Posterior table for a whole pool kind. Categories are class labels for
/// the source-labelled kinds and {source = 0, target = 1} for AllLoo.
NeighborPosteriors neighbor_posteriors(const Transform& transform, const SourceDataset& source,
                                       const TargetDataset& target, PoolKind kind);

namespace detail {

// Writes neighbor probabilities for one row into `out` (same length as
// `sq_dists`); `exclude` < 0 means no exclusion. Left-to-right reductions.
void softmax_neg(const double* sq_dists, Index n, Index exclude, double* out);

// Entropy of a raw probability row.
double entropy(const double* p, Index n);

// Posterior table from transformed coordinates.
NeighborPosteriors posteriors_from(const Eigen::MatrixXd& zq, const Eigen::MatrixXd& zp,
                                   std::span<const int> pool_labels, int categories, bool exclude_self);

}  // namespace detail

}  // namespace itda
