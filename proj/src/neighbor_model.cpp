#include "itda/neighbor_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace itda {

ProbabilityVector::ProbabilityVector(Eigen::VectorXd entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0) throw std::invalid_argument("probability vector is empty");
  double total = 0.0;
  for (Index i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i]) || entries_[i] < 0.0)
      throw std::invalid_argument("probability entries must be finite and nonnegative");
    total += entries_[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("probability vector sums to " + std::to_string(total));
}

Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& pool) {
  if (queries.cols() != pool.cols()) throw std::invalid_argument("query and pool dimensions differ");
  const Index n = queries.rows(), m = pool.rows(), d = queries.cols();
  Eigen::MatrixXd out(n, m);
  // Explicit differences keep every entry >= 0 and exact for coincident points.
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Index k = 0; k < d; ++k) {
        const double diff = queries(i, k) - pool(j, k);
        acc += diff * diff;
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Eigen::MatrixXd pairwise_sq_dists(const Transform& transform, const FeatureMatrix& queries,
                                  const FeatureMatrix& pool) {
  return pairwise_sq_dists(transform.apply(queries), transform.apply(pool));
}

namespace detail {

void softmax_neg(const double* sq_dists, Index n, Index exclude, double* out) {
  double min_d = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j) {
    if (j != exclude && sq_dists[j] < min_d) min_d = sq_dists[j];
  }
  if (!std::isfinite(min_d)) throw std::invalid_argument("no neighbors");
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (j == exclude) {
      out[j] = 0.0;
      continue;
    }
    out[j] = std::exp(min_d - sq_dists[j]);
    total += out[j];
  }
  const double inv = 1.0 / total;
  for (Index j = 0; j < n; ++j) out[j] *= inv;
}

double entropy(const double* p, Index n) {
  double h = 0.0;
  for (Index c = 0; c < n; ++c) {
    if (p[c] > 0.0) h -= p[c] * std::log(p[c]);
  }
  return h;
}

NeighborPosteriors posteriors_from(const Eigen::MatrixXd& zq, const Eigen::MatrixXd& zp,
                                   std::span<const int> pool_labels, int categories, bool exclude_self) {
  if (static_cast<Index>(pool_labels.size()) != zp.rows())
    throw std::invalid_argument("pool label count does not match pool size");
  if (exclude_self && zq.rows() != zp.rows())
    throw std::invalid_argument("self-exclusion requires queries to be the pool");
  NeighborPosteriors out;
  // Rows of the distance matrix are contiguous after transposition.
  const Eigen::MatrixXd dist_t = pairwise_sq_dists(zp, zq);
  Eigen::MatrixXd probs_t(zp.rows(), zq.rows());
  out.posteriors = Eigen::MatrixXd::Zero(zq.rows(), categories);
  for (Index i = 0; i < zq.rows(); ++i) {
    double* row = probs_t.col(i).data();
    softmax_neg(dist_t.col(i).data(), zp.rows(), exclude_self ? i : -1, row);
    for (Index j = 0; j < zp.rows(); ++j) out.posteriors(i, pool_labels[static_cast<std::size_t>(j)]) += row[j];
  }
  out.probs = probs_t.transpose();
  return out;
}

}  // namespace detail

ProbabilityVector neighbor_probs(const Eigen::Ref<const Eigen::VectorXd>& sq_dist_row, std::optional<Index> exclude) {
  const Index n = sq_dist_row.size();
  if (exclude && (*exclude < 0 || *exclude >= n)) throw std::invalid_argument("exclude index out of range");
  Eigen::VectorXd row = sq_dist_row;
  Eigen::VectorXd out(n);
  detail::softmax_neg(row.data(), n, exclude.value_or(-1), out.data());
  return ProbabilityVector(std::move(out));
}

ProbabilityVector posterior_estimate(const ProbabilityVector& probs, std::span<const int> pool_labels,
                                     int num_classes) {
  if (static_cast<Index>(pool_labels.size()) != probs.size())
    throw std::invalid_argument("label count does not match probability count");
  if (num_classes < 1) throw std::invalid_argument("num_classes must be >= 1");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_classes);
  for (Index j = 0; j < probs.size(); ++j) {
    const int y = pool_labels[static_cast<std::size_t>(j)];
    if (y < 0 || y >= num_classes) throw std::invalid_argument("label " + std::to_string(y) + " out of range");
    out[y] += probs[j];
  }
  return ProbabilityVector(std::move(out));
}

double entropy(const ProbabilityVector& p) { return detail::entropy(p.entries().data(), p.size()); }

NeighborPosteriors neighbor_posteriors(const Transform& transform, const SourceDataset& source,
                                       const TargetDataset& target, PoolKind kind) {
  require_same_dim(source, target);
  const Eigen::MatrixXd zs = transform.apply(source.features());
  switch (kind) {
    case PoolKind::SourceOnlyLoo:
      return detail::posteriors_from(zs, zs, source.labels(), source.num_classes(), true);
    case PoolKind::SourceForTarget:
      return detail::posteriors_from(transform.apply(target.features()), zs, source.labels(),
                                     source.num_classes(), false);
    case PoolKind::AllLoo: {
      Eigen::MatrixXd all(source.size() + target.size(), transform.out_dim());
      all << zs, transform.apply(target.features());
      std::vector<int> domain(static_cast<std::size_t>(all.rows()), 1);
      std::fill(domain.begin(), domain.begin() + source.size(), 0);
      return detail::posteriors_from(all, all, domain, 2, true);
    }
  }
  throw std::invalid_argument("unknown pool kind");
}

}  // namespace itda
