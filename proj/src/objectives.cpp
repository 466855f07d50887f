#include "itda/objectives.hpp"

#include "itda/neighbor_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace itda {
namespace {

struct MiTerm {
  double value = 0.0;
  // d(MI)/d(d_ij^2), one entry per query/pool pair.
  Eigen::MatrixXd weights;
};

// MI between queries and the pool's categories:
//   H[mean_i p_i] - mean_i H[p_i]
// With g_ic = (ln p_ic - ln p_0c) / n and s_i = sum_c p_ic g_ic, the softmax
// chain rule gives d(MI)/d(d_ij^2) = -p_ij (g_{i,y_j} - s_i).
MiTerm mi_term(const NeighborPosteriors& np, std::span<const int> pool_labels, bool want_weights) {
  const Index n = np.posteriors.rows(), k = np.posteriors.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::VectorXd prior = Eigen::VectorXd::Zero(k);
  double mean_h = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < k; ++c) prior[c] += np.posteriors(i, c);
    Eigen::RowVectorXd row = np.posteriors.row(i);
    mean_h += detail::entropy(row.data(), k);
  }
  prior *= inv_n;
  mean_h *= inv_n;

  MiTerm out;
  // Jensen keeps the exact value >= 0; clamp rounding noise.
  out.value = std::max(0.0, detail::entropy(prior.data(), k) - mean_h);
  if (!want_weights) return out;

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, k);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < k; ++c) {
      const double p = np.posteriors(i, c);
      if (p > 0.0) {
        g(i, c) = (std::log(p) - std::log(prior[c])) * inv_n;
        s[i] += p * g(i, c);
      }
    }
  }
  const Index m = np.probs.cols();
  out.weights.resize(n, m);
  for (Index j = 0; j < m; ++j) {
    const int y = pool_labels[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      const double p = np.probs(i, j);
      out.weights(i, j) = p > 0.0 ? -p * (g(i, y) - s[i]) : 0.0;
    }
  }
  return out;
}

// d/dL of sum_ij w_ij ||L(xq_i - xp_j)||^2 = 2 sum_ij w_ij (zq_i - zp_j)(xq_i - xp_j)^T
Eigen::MatrixXd assemble_gradient(const Eigen::MatrixXd& w, const Eigen::MatrixXd& zq, const Eigen::MatrixXd& xq,
                                  const Eigen::MatrixXd& zp, const Eigen::MatrixXd& xp) {
  const Eigen::VectorXd r = w.rowwise().sum();
  const Eigen::VectorXd c = w.colwise().sum().transpose();
  Eigen::MatrixXd grad = (zq.array().colwise() * r.array()).matrix().transpose() * xq;
  grad.noalias() -= zq.transpose() * (w * xp);
  grad.noalias() -= zp.transpose() * (w.transpose() * xq);
  grad.noalias() += (zp.array().colwise() * c.array()).matrix().transpose() * xp;
  return 2.0 * grad;
}

// Transformed and raw coordinates for both domains, computed once per call.
struct Coordinates {
  Eigen::MatrixXd zs, zt, z_all, x_all;
  std::vector<int> domain;

  Coordinates(const Transform& transform, const SourceDataset& source, const TargetDataset& target) {
    require_same_dim(source, target);
    zs = transform.apply(source.features());
    zt = transform.apply(target.features());
  }

  void build_all(const SourceDataset& source, const TargetDataset& target) {
    const Index n = source.size(), m = target.size();
    if (n + m < 3) throw std::invalid_argument("domain mutual information needs N + M >= 3");
    z_all.resize(n + m, zs.cols());
    z_all << zs, zt;
    x_all.resize(n + m, source.dim());
    x_all << source.features().values(), target.features().values();
    domain.assign(static_cast<std::size_t>(n + m), 1);
    std::fill(domain.begin(), domain.begin() + n, 0);
  }
};

MiTerm target_term(const Coordinates& co, const SourceDataset& source, bool want_weights) {
  auto np = detail::posteriors_from(co.zt, co.zs, source.labels(), source.num_classes(), false);
  return mi_term(np, source.labels(), want_weights);
}

MiTerm domain_term(const Coordinates& co, bool want_weights) {
  auto np = detail::posteriors_from(co.z_all, co.z_all, co.domain, 2, true);
  return mi_term(np, co.domain, want_weights);
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
}

}  // namespace

double source_error(const Transform& transform, const SourceDataset& source) {
  const auto counts = source.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < 2)
      throw std::invalid_argument("singleton class under leave-one-out (class " + std::to_string(c) + ")");
  }
  const Eigen::MatrixXd zs = transform.apply(source.features());
  auto np = detail::posteriors_from(zs, zs, source.labels(), source.num_classes(), true);
  double correct = 0.0;
  for (Index i = 0; i < source.size(); ++i) correct += np.posteriors(i, source.labels()[static_cast<std::size_t>(i)]);
  return std::clamp(1.0 - correct / static_cast<double>(source.size()), 0.0, 1.0);
}

double target_mi(const Transform& transform, const SourceDataset& source, const TargetDataset& target) {
  Coordinates co(transform, source, target);
  return target_term(co, source, false).value;
}

double domain_mi(const Transform& transform, const SourceDataset& source, const TargetDataset& target) {
  Coordinates co(transform, source, target);
  co.build_all(source, target);
  return domain_term(co, false).value;
}

ObjectiveValue total_objective(const Transform& transform, const SourceDataset& source,
                               const TargetDataset& target, double lambda) {
  require_lambda(lambda);
  ObjectiveValue v;
  v.lambda = lambda;
  v.i_t = target_mi(transform, source, target);
  v.i_st = domain_mi(transform, source, target);
  v.eps_s = source_error(transform, source);
  v.total = -v.i_t + lambda * v.i_st;
  return v;
}

MiWithGradient target_mi_with_gradient(const Transform& transform, const SourceDataset& source,
                                       const TargetDataset& target) {
  Coordinates co(transform, source, target);
  auto term = target_term(co, source, true);
  return {term.value, assemble_gradient(term.weights, co.zt, target.features().values(), co.zs,
                                        source.features().values())};
}

MiWithGradient domain_mi_with_gradient(const Transform& transform, const SourceDataset& source,
                                       const TargetDataset& target) {
  Coordinates co(transform, source, target);
  co.build_all(source, target);
  auto term = domain_term(co, true);
  return {term.value, assemble_gradient(term.weights, co.z_all, co.x_all, co.z_all, co.x_all)};
}

Evaluation evaluate(const Transform& transform, const SourceDataset& source, const TargetDataset& target,
                    double lambda) {
  require_lambda(lambda);
  Coordinates co(transform, source, target);
  co.build_all(source, target);

  auto t_term = target_term(co, source, true);
  Evaluation out;
  out.gradient = -assemble_gradient(t_term.weights, co.zt, target.features().values(), co.zs,
                                    source.features().values());

  const bool with_domain_gradient = lambda > 0.0;
  auto st_term = domain_term(co, with_domain_gradient);
  if (with_domain_gradient)
    out.gradient += lambda * assemble_gradient(st_term.weights, co.z_all, co.x_all, co.z_all, co.x_all);

  out.value.lambda = lambda;
  out.value.i_t = t_term.value;
  out.value.i_st = st_term.value;
  out.value.total = -t_term.value + lambda * st_term.value;
  return out;
}

Gradient gradient(const Transform& transform, const SourceDataset& source, const TargetDataset& target,
                  double lambda) {
  return evaluate(transform, source, target, lambda).gradient;
}

}  // namespace itda
