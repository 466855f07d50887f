#pragma once

#include "itda/data_model.hpp"
#include "itda/objectives.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace itda {

struct OptimizerConfig {
  int max_iters = 300;
  double grad_tol = 1e-5;  // on the max-abs entry of the projected gradient
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;
  double min_step = 1e-12;
  std::uint64_t seed = 0;
  // Also evaluate the source leave-one-out error at every accepted iterate.
  bool record_source_error = false;

  void validate() const;
};

enum class Termination { GradTol, MaxIters, StepUnderflow };

std::string to_string(Termination t);

struct IterationRecord {
  double total = 0.0;
  double i_t = 0.0;
  double i_st = 0.0;
  double step = 0.0;   // accepted step size; 0 for the initial point
  double trace = 0.0;  // Trace(L^T L)
  std::optional<double> eps_s;
};

/// Record 0 is the projected initial point; each later record is an accepted iterate.
struct OptimizationTrace {
  std::vector<IterationRecord> records;
  Termination termination = Termination::MaxIters;
};

/// Thrown when the objective or its gradient stops being finite.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, OptimizationTrace trace)
      : std::runtime_error("numerical failure: " + what), trace_(std::move(trace)) {}

  const OptimizationTrace& trace() const noexcept { return trace_; }

 private:
  OptimizationTrace trace_;
};

/// Euclidean projection onto {L : Trace(L^T L) <= d}: a uniform rescale when outside.
Transform project_trace_ball(const Transform& transform, Index d);

/// Top-d principal directions of the centered target features as rows.
/// Directions beyond the data rank are padded with seeded random vectors
/// orthonormal to the others.
Transform init_target_pca(const TargetDataset& target, Index d, std::uint64_t seed = 0);

/// Orthonormal rows from the QR factorization of a seeded Gaussian matrix.
Transform init_random(Index in_dim, Index d, std::uint64_t seed);

struct MinimizeResult {
  Transform transform;
  OptimizationTrace trace;
};

/// One objective evaluation as seen by the descent loop.
struct DescentPoint {
  double total = 0.0;
  double i_t = 0.0;
  double i_st = 0.0;
  Gradient gradient;
};

using DescentObjective = std::function<DescentPoint(const Transform&)>;

/// Projected gradient descent with Armijo backtracking on an arbitrary
/// objective over the trace ball of radius d.
MinimizeResult minimize_objective(const DescentObjective& objective, Index d, const Transform& init,
                                  const OptimizerConfig& config,
                                  const std::function<double(const Transform&)>& source_error_fn = {});

/// Minimizes -I_t + lambda * I_st subject to Trace(L^T L) <= d.
MinimizeResult minimize(const SourceDataset& source, const TargetDataset& target, double lambda, Index d,
                        const Transform& init, const OptimizerConfig& config);

struct RestartResult {
  MinimizeResult best;
  int best_restart = 0;
  int failed_restarts = 0;
};

/// Restart 0 starts from target PCA, restarts 1.. from seeded random
/// orthonormal maps. Keeps the lowest final objective (earliest on ties).
RestartResult minimize_with_restarts(const SourceDataset& source, const TargetDataset& target, double lambda,
                                     Index d, int restarts, const OptimizerConfig& config);

/// Deterministic seed derivation for (base seed, stream...) tuples.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace itda
