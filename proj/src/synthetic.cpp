#include "itda/synthetic.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace itda {

void SyntheticConfig::validate() const {
  if (num_classes < 2) throw std::invalid_argument("synthetic data needs >= 2 classes");
  if (signal_dim < 1 || noise_dim < 0) throw std::invalid_argument("signal_dim must be >= 1 and noise_dim >= 0");
  if (num_classes - 1 > signal_dim)
    throw std::invalid_argument("a regular simplex of " + std::to_string(num_classes) + " centers needs signal_dim >= " +
                                std::to_string(num_classes - 1));
  if (shift.rotation_angle != 0.0 && signal_dim < 2)
    throw std::invalid_argument("rotation needs signal_dim >= 2");
  if (points_per_class < 1) throw std::invalid_argument("points_per_class must be >= 1");
  if (!(cluster_std > 0.0) || !(class_separation > 0.0) || !(noise_std > 0.0))
    throw std::invalid_argument("cluster_std, class_separation and noise_std must be > 0");
  if (!std::isfinite(shift.rotation_angle) || !std::isfinite(shift.translation) || shift.translation < 0.0)
    throw std::invalid_argument("shift must be finite with translation >= 0");
}

ClassCenters class_centers(const SyntheticConfig& config) {
  config.validate();
  const int c = config.num_classes;
  // Centered standard basis vectors e_k - 1/C form a regular simplex with
  // edge sqrt(2); express them in an orthonormal basis of their span.
  Eigen::MatrixXd vertices = Eigen::MatrixXd::Identity(c, c).rowwise() - Eigen::RowVectorXd::Constant(c, 1.0 / c);
  Eigen::MatrixXd basis(c, c - 1);
  for (int k = 0; k < c - 1; ++k) {
    // Helmert basis: orthonormal, orthogonal to the all-ones vector.
    basis.col(k).setZero();
    basis.col(k).head(k + 1).setConstant(1.0);
    basis(k + 1, k) = -static_cast<double>(k + 1);
    basis.col(k).normalize();
  }
  Eigen::MatrixXd coords = vertices * basis * (config.class_separation / std::sqrt(2.0));

  ClassCenters out;
  out.source = Eigen::MatrixXd::Zero(c, config.signal_dim);
  out.source.leftCols(c - 1) = coords;

  out.target = out.source;
  if (config.shift.rotation_angle != 0.0) {
    const double cs = std::cos(config.shift.rotation_angle), sn = std::sin(config.shift.rotation_angle);
    for (int k = 0; k < c; ++k) {
      const double a = out.source(k, 0), b = out.source(k, 1);
      out.target(k, 0) = cs * a - sn * b;
      out.target(k, 1) = sn * a + cs * b;
    }
  }
  const double per_dim = config.shift.translation / std::sqrt(static_cast<double>(config.signal_dim));
  out.target.array() += per_dim;
  return out;
}

SyntheticData generate(const SyntheticConfig& config) {
  const ClassCenters centers = class_centers(config);
  const int c = config.num_classes, n = config.points_per_class;
  const Index rows = static_cast<Index>(c) * n;

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](const Eigen::MatrixXd& mu) {
    Eigen::MatrixXd x(rows, config.dim());
    for (int k = 0; k < c; ++k)
      for (int i = 0; i < n; ++i) {
        const Index r = static_cast<Index>(k) * n + i;
        for (int j = 0; j < config.signal_dim; ++j) x(r, j) = mu(k, j) + config.cluster_std * normal(rng);
        for (int j = 0; j < config.noise_dim; ++j) x(r, config.signal_dim + j) = config.noise_std * normal(rng);
      }
    return x;
  };

  std::vector<int> labels(static_cast<std::size_t>(rows));
  for (Index r = 0; r < rows; ++r) labels[static_cast<std::size_t>(r)] = static_cast<int>(r / n);

  Eigen::MatrixXd xs = draw(centers.source);
  Eigen::MatrixXd xt = draw(centers.target);
  return SyntheticData{SourceDataset(FeatureMatrix(std::move(xs)), labels, c),
                       TargetDataset(FeatureMatrix(std::move(xt))), labels};
}

namespace {

struct ClusterGeometry {
  Eigen::MatrixXd centers;  // classes x d
  double mean_std = 0.0;    // mean over classes of RMS per-coordinate deviation
  double min_center_dist = 0.0;
};

ClusterGeometry geometry(const Eigen::MatrixXd& z, std::span<const int> labels, int classes) {
  const Index d = z.cols();
  ClusterGeometry g;
  g.centers = Eigen::MatrixXd::Zero(classes, d);
  std::vector<Index> counts(static_cast<std::size_t>(classes), 0);
  for (Index i = 0; i < z.rows(); ++i) {
    g.centers.row(labels[static_cast<std::size_t>(i)]) += z.row(i);
    ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  std::vector<double> sq(static_cast<std::size_t>(classes), 0.0);
  for (int k = 0; k < classes; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) throw std::invalid_argument("class " + std::to_string(k) + " missing from a domain");
    g.centers.row(k) /= static_cast<double>(counts[static_cast<std::size_t>(k)]);
  }
  for (Index i = 0; i < z.rows(); ++i) {
    const int k = labels[static_cast<std::size_t>(i)];
    sq[static_cast<std::size_t>(k)] += (z.row(i) - g.centers.row(k)).squaredNorm();
  }
  for (int k = 0; k < classes; ++k)
    g.mean_std += std::sqrt(sq[static_cast<std::size_t>(k)] / (static_cast<double>(counts[static_cast<std::size_t>(k)]) * d));
  g.mean_std /= classes;
  g.min_center_dist = std::numeric_limits<double>::infinity();
  for (int a = 0; a < classes; ++a)
    for (int b = a + 1; b < classes; ++b)
      g.min_center_dist = std::min(g.min_center_dist, (g.centers.row(a) - g.centers.row(b)).norm());
  return g;
}

double ratio(double num, double den, bool& degenerate) {
  if (den > 0.0) return num / den;
  if (num > 0.0) return std::numeric_limits<double>::infinity();
  degenerate = true;
  return 0.0;
}

}  // namespace

AssumptionReport assumption_report(const SourceDataset& source, const TargetDataset& target,
                                   std::span<const int> target_labels, const Transform& transform) {
  require_same_dim(source, target);
  if (static_cast<Index>(target_labels.size()) != target.size())
    throw std::invalid_argument("target label count does not match target rows");
  const int classes = source.num_classes();
  for (int y : target_labels) {
    if (y < 0 || y >= classes) throw std::invalid_argument("target label out of range");
  }
  const auto gs = geometry(transform.apply(source.features()), source.labels(), classes);
  const auto gt = geometry(transform.apply(target.features()), target_labels, classes);

  AssumptionReport r;
  r.separation_source = ratio(gs.min_center_dist, gs.mean_std, r.degenerate);
  r.separation_target = ratio(gt.min_center_dist, gt.mean_std, r.degenerate);
  double gap = 0.0;
  for (int k = 0; k < classes; ++k) gap += (gs.centers.row(k) - gt.centers.row(k)).norm();
  gap /= classes;
  r.alignment = ratio(gap, gs.min_center_dist, r.degenerate);
  return r;
}

}  // namespace itda
