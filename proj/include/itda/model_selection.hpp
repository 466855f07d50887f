#pragma once

#include "itda/data_model.hpp"
#include "itda/objectives.hpp"
#include "itda/optimizer.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace itda {

/// Candidate output dimensionalities and lambda weights.
struct HyperGrid {
  std::vector<int> dims;
  std::vector<double> lambdas;

  /// Throws std::invalid_argument unless both lists are non-empty, every
  /// d lies in [1, in_dim] and every lambda is finite and >= 0.
  void validate(Index in_dim) const;
  std::size_t size() const { return dims.size() * lambdas.size(); }

  /// d in {20, 40, 70, 100}, lambda in {0, 0.25, 1, 4, 16, 64}.
  static HyperGrid reference();
};

struct SelectionOptions {
  OptimizerConfig optimizer;
  int restarts = 3;  // one target-PCA start plus random starts
  int threads = 1;   // concurrent grid cells
};

/// Outcome of one (d, lambda) cell.
struct CellRecord {
  int d = 0;
  double lambda = 0.0;
  bool ok = false;
  std::string error;                 // set when !ok
  ObjectiveValue objective;          // final components, eps_s included
  OptimizationTrace trace;           // of the winning restart
  std::optional<Transform> transform;
  int best_restart = 0;
  int failed_restarts = 0;
};

struct SelectionReport {
  std::vector<CellRecord> cells;  // dims-major, in grid order
  std::size_t winner = 0;
  std::string tie_break_note;

  const CellRecord& winning_cell() const { return cells.at(winner); }
};

/// Every cell failed; carries the per-cell diagnostics.
class GridSearchFailure : public std::runtime_error {
 public:
  GridSearchFailure(const std::string& what, std::vector<CellRecord> cells)
      : std::runtime_error(what), cells_(std::move(cells)) {}
  const std::vector<CellRecord>& cells() const noexcept { return cells_; }

 private:
  std::vector<CellRecord> cells_;
};

/// Source-error values closer than this are treated as tied.
inline constexpr double kSelectionTieTolerance = 1e-12;

/// Index of the successful cell with minimum eps_s; ties go to the smaller
/// lambda, then the smaller d. `note` (optional) receives a description of
/// any tie that was broken. Throws if no cell succeeded.
std::size_t select_winner(std::span<const CellRecord> cells, std::string* note = nullptr);

/// Runs minimize_with_restarts for every grid cell and picks the cell whose
/// learned transform has the lowest source leave-one-out error.
SelectionReport grid_search(const SourceDataset& source, const TargetDataset& target, const HyperGrid& grid,
                            const SelectionOptions& options);

}  // namespace itda
