#include "itda/optimizer.hpp"

#include <cmath>
#include <random>
#include <string>

namespace itda {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool is_finite(const DescentPoint& p) {
  return std::isfinite(p.total) && std::isfinite(p.i_t) && std::isfinite(p.i_st) && p.gradient.allFinite();
}

// Flip each row so its largest-magnitude entry is positive.
void canonical_signs(Eigen::MatrixXd& rows) {
  for (Index r = 0; r < rows.rows(); ++r) {
    Index arg = 0;
    rows.row(r).cwiseAbs().maxCoeff(&arg);
    if (rows(r, arg) < 0.0) rows.row(r) *= -1.0;
  }
}

}  // namespace

void OptimizerConfig::validate() const {
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("armijo_c must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw std::invalid_argument("backtrack_factor must lie in (0, 1)");
  if (!(initial_step > 0.0) || !std::isfinite(initial_step)) throw std::invalid_argument("initial_step must be > 0");
  if (!(min_step > 0.0)) throw std::invalid_argument("min_step must be > 0");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::GradTol:
      return "GRAD_TOL";
    case Termination::MaxIters:
      return "MAX_ITERS";
    case Termination::StepUnderflow:
      return "STEP_UNDERFLOW";
  }
  return "UNKNOWN";
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

Transform project_trace_ball(const Transform& transform, Index d) {
  const double trace = transform.trace_norm();
  const double bound = static_cast<double>(d);
  if (trace <= bound) return transform;
  Eigen::MatrixXd scaled = transform.matrix() * std::sqrt(bound / trace);
  // Rounding can leave the result a few ulps outside the ball.
  while (scaled.squaredNorm() > bound) scaled *= 1.0 - 1e-15;
  return Transform(std::move(scaled));
}

Transform init_random(Index in_dim, Index d, std::uint64_t seed) {
  if (d < 1 || d > in_dim) throw std::invalid_argument("random init needs 1 <= d <= D");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd gauss(in_dim, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < in_dim; ++i) gauss(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(in_dim, d);
  return Transform(q.transpose());
}

Transform init_target_pca(const TargetDataset& target, Index d, std::uint64_t seed) {
  const Index big_d = target.dim();
  if (target.size() < 2) throw std::invalid_argument("target PCA needs at least 2 target rows");
  if (d < 1 || d > big_d) throw std::invalid_argument("target PCA needs 1 <= d <= D");

  const auto& x = target.features().values();
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("target covariance eigendecomposition failed");

  const Eigen::VectorXd& values = eig.eigenvalues();  // ascending
  const double rank_tol = 1e-12 * std::max(values[big_d - 1], 1e-300) * static_cast<double>(big_d);
  Eigen::MatrixXd rows(d, big_d);
  Index filled = 0;
  for (Index k = big_d - 1; k >= 0 && filled < d; --k) {
    if (values[k] <= rank_tol) break;
    rows.row(filled++) = eig.eigenvectors().col(k).transpose();
  }
  canonical_signs(rows);

  // Rank-deficient target: complete with random directions orthogonal to the rest.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  while (filled < d) {
    Eigen::RowVectorXd v(big_d);
    for (Index i = 0; i < big_d; ++i) v[i] = normal(rng);
    for (int pass = 0; pass < 2; ++pass)
      for (Index r = 0; r < filled; ++r) v -= v.dot(rows.row(r)) * rows.row(r);
    const double norm = v.norm();
    if (norm < 1e-8) continue;
    rows.row(filled++) = v / norm;
  }
  return Transform(std::move(rows));
}

MinimizeResult minimize_objective(const DescentObjective& objective, Index d, const Transform& init,
                                  const OptimizerConfig& config,
                                  const std::function<double(const Transform&)>& source_error_fn) {
  config.validate();
  if (init.out_dim() != d) throw std::invalid_argument("init has " + std::to_string(init.out_dim()) +
                                                       " rows, expected d = " + std::to_string(d));
  const bool track_eps = config.record_source_error && static_cast<bool>(source_error_fn);

  OptimizationTrace trace;
  Transform current = project_trace_ball(init, d);
  DescentPoint point = objective(current);
  auto record = [&](double step) {
    IterationRecord rec{point.total, point.i_t, point.i_st, step, current.trace_norm(), std::nullopt};
    if (track_eps) rec.eps_s = source_error_fn(current);
    trace.records.push_back(rec);
  };
  if (!is_finite(point)) throw NumericalFailure("non-finite objective at the initial point", trace);
  record(0.0);

  double step = config.initial_step;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    const Eigen::MatrixXd& grad = point.gradient;
    const Transform unit_step = project_trace_ball(Transform(current.matrix() - grad), d);
    if ((current.matrix() - unit_step.matrix()).cwiseAbs().maxCoeff() <= config.grad_tol) {
      trace.termination = Termination::GradTol;
      return {current, std::move(trace)};
    }

    bool first_try = true;
    for (;;) {
      Eigen::MatrixXd moved = current.matrix() - step * grad;
      if (moved.allFinite()) {
        Transform candidate = project_trace_ball(Transform(std::move(moved)), d);
        // Armijo along the projection arc; equals c * step * ||grad||^2 off the boundary.
        const double predicted = grad.cwiseProduct(candidate.matrix() - current.matrix()).sum();
        DescentPoint trial = objective(candidate);
        if (!is_finite(trial))
          throw NumericalFailure("non-finite objective or gradient at iteration " + std::to_string(iter + 1),
                                 trace);
        if (trial.total <= point.total + config.armijo_c * predicted) {
          current = std::move(candidate);
          point = std::move(trial);
          break;
        }
      }
      step *= config.backtrack_factor;
      first_try = false;
      if (step < config.min_step) {
        trace.termination = Termination::StepUnderflow;
        return {current, std::move(trace)};
      }
    }
    record(step);
    if (first_try) step /= config.backtrack_factor;
  }
  trace.termination = Termination::MaxIters;
  return {current, std::move(trace)};
}

MinimizeResult minimize(const SourceDataset& source, const TargetDataset& target, double lambda, Index d,
                        const Transform& init, const OptimizerConfig& config) {
  require_same_dim(source, target);
  if (init.in_dim() != source.dim()) throw std::invalid_argument("init input dimension does not match data");
  DescentObjective objective = [&](const Transform& l) {
    Evaluation e = evaluate(l, source, target, lambda);
    return DescentPoint{e.value.total, e.value.i_t, e.value.i_st, std::move(e.gradient)};
  };
  auto eps_fn = [&](const Transform& l) { return source_error(l, source); };
  return minimize_objective(objective, d, init, config, eps_fn);
}

RestartResult minimize_with_restarts(const SourceDataset& source, const TargetDataset& target, double lambda,
                                     Index d, int restarts, const OptimizerConfig& config) {
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  std::optional<RestartResult> out;
  int failed = 0;
  std::string last_error;
  for (int r = 0; r < restarts; ++r) {
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(r));
    const Transform init = r == 0 ? init_target_pca(target, d, seed) : init_random(source.dim(), d, seed);
    try {
      MinimizeResult res = minimize(source, target, lambda, d, init, config);
      if (!out || res.trace.records.back().total < out->best.trace.records.back().total)
        out = RestartResult{std::move(res), r, 0};
    } catch (const NumericalFailure& e) {
      ++failed;
      last_error = e.what();
    }
  }
  if (!out) throw NumericalFailure("all " + std::to_string(restarts) + " restarts failed; last: " + last_error, {});
  out->failed_restarts = failed;
  return std::move(*out);
}

}  // namespace itda
