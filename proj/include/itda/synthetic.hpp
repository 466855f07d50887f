#pragma once

#include "itda/data_model.hpp"

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace itda {

/// Shift applied to the target domain's class centers.
struct DomainShift {
  double rotation_angle = std::numbers::pi / 6.0;  // radians, in the plane of signal dims 0 and 1
  double translation = 1.0;                        // magnitude along the unit diagonal of the signal dims

  bool operator==(const DomainShift& other) const = default;
};

/// Two-domain Gaussian-cluster generator settings. D = signal_dim + noise_dim.
struct SyntheticConfig {
  int num_classes = 3;
  int signal_dim = 5;
  int noise_dim = 15;
  int points_per_class = 40;  // per domain
  double cluster_std = 0.5;
  double class_separation = 4.0;  // distance between any two class centers
  DomainShift shift;
  double noise_std = 2.0;
  std::uint64_t seed = 0;

  int dim() const { return signal_dim + noise_dim; }
  void validate() const;

  bool operator==(const SyntheticConfig& other) const = default;
};

/// Class centers in signal coordinates (num_classes x signal_dim).
struct ClassCenters {
  Eigen::MatrixXd source;
  Eigen::MatrixXd target;  // rotated, then translated
};

/// Vertices of a regular simplex with edge class_separation, centered at the
/// origin and spanning signal dims 0..C-2, plus their shifted copies.
ClassCenters class_centers(const SyntheticConfig& config);

struct SyntheticData {
  SourceDataset source;
  TargetDataset target;
  std::vector<int> target_labels;  // held out, for scoring only
};

/// Rows are grouped by class (class 0 first) in both domains.
SyntheticData generate(const SyntheticConfig& config);

struct AssumptionReport {
  double separation_source = 0.0;  // min inter-center distance / mean intra-class std
  double separation_target = 0.0;
  double alignment = 0.0;          // mean ||source center - target center|| / min inter-center distance
  bool degenerate = false;         // some ratio was 0/0 and was reported as 0
};

/// Quantifies cluster separation within each domain and alignment across
/// domains after mapping every row through `transform`.
AssumptionReport assumption_report(const SourceDataset& source, const TargetDataset& target,
                                   std::span<const int> target_labels, const Transform& transform);

}  // namespace itda
