#pragma once

#include "itda/data_model.hpp"

#include <optional>

namespace itda {

/// Components of the adaptation objective total = -i_t + lambda * i_st.
///
/// i_t is the mutual information between target instances and their
/// source-estimated labels (in [0, ln C]); i_st is the mutual information
/// between instances and their domain indicator (in [0, ln 2]). eps_s is the
/// source leave-one-out error; it only takes part in model selection and is
/// left empty by the optimizer's inner evaluations.
struct ObjectiveValue {
  double total = 0.0;
  double i_t = 0.0;
  double i_st = 0.0;
  std::optional<double> eps_s;
  double lambda = 0.0;
};

/// d x D matrix of partial derivatives with respect to L.
using Gradient = Eigen::MatrixXd;

/// 1 - mean correct-class leave-one-out posterior over the source set.
/// Throws std::invalid_argument if any class has a single instance.
double source_error(const Transform& transform, const SourceDataset& source);

/// H[p_0] - mean_t H[p_t], target posteriors estimated from source neighbors.
double target_mi(const Transform& transform, const SourceDataset& source, const TargetDataset& target);

/// H[q_0] - mean_i H[q_i] over all rows, domain posteriors from every other row.
double domain_mi(const Transform& transform, const SourceDataset& source, const TargetDataset& target);

/// All four components, eps_s included.
ObjectiveValue total_objective(const Transform& transform, const SourceDataset& source,
                               const TargetDataset& target, double lambda);

/// Analytic gradient of total_objective(...).total with respect to L.
Gradient gradient(const Transform& transform, const SourceDataset& source, const TargetDataset& target,
                  double lambda);

struct MiWithGradient {
  double value = 0.0;
  Gradient gradient;
};

MiWithGradient target_mi_with_gradient(const Transform& transform, const SourceDataset& source,
                                       const TargetDataset& target);
MiWithGradient domain_mi_with_gradient(const Transform& transform, const SourceDataset& source,
                                       const TargetDataset& target);

struct Evaluation {
  ObjectiveValue value;  // eps_s unset
  Gradient gradient;
};

/// Objective and gradient in one pass over the neighbor tables. The domain
/// term's gradient is skipped entirely when lambda == 0.
Evaluation evaluate(const Transform& transform, const SourceDataset& source, const TargetDataset& target,
                    double lambda);

}  // namespace itda
