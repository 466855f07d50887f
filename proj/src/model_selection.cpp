#include "itda/model_selection.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace itda {

void HyperGrid::validate(Index in_dim) const {
  if (dims.empty() || lambdas.empty()) throw std::invalid_argument("hyperparameter grid is empty");
  for (int d : dims) {
    if (d < 1 || d > in_dim)
      throw std::invalid_argument("grid dimension " + std::to_string(d) + " outside [1, " + std::to_string(in_dim) + "]");
  }
  for (double l : lambdas) {
    if (!std::isfinite(l) || l < 0.0) throw std::invalid_argument("grid lambda must be finite and >= 0");
  }
}

HyperGrid HyperGrid::reference() { return {{20, 40, 70, 100}, {0.0, 0.25, 1.0, 4.0, 16.0, 64.0}}; }

std::size_t select_winner(std::span<const CellRecord> cells, std::string* note) {
  std::optional<std::size_t> best;
  bool tied = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (!c.ok) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = cells[*best];
    const double diff = *c.objective.eps_s - *b.objective.eps_s;
    if (diff < -kSelectionTieTolerance) {
      best = i;
      tied = false;
    } else if (std::abs(diff) <= kSelectionTieTolerance) {
      tied = true;
      if (c.lambda < b.lambda || (c.lambda == b.lambda && c.d < b.d)) best = i;
    }
  }
  if (!best) throw std::runtime_error("no grid cell completed");
  if (note) {
    std::ostringstream os;
    if (tied)
      os << "eps_s tie within " << kSelectionTieTolerance << " resolved by smaller lambda, then smaller d";
    else
      os << "unique minimum";
    *note = os.str();
  }
  return *best;
}

SelectionReport grid_search(const SourceDataset& source, const TargetDataset& target, const HyperGrid& grid,
                            const SelectionOptions& options) {
  require_same_dim(source, target);
  grid.validate(source.dim());
  options.optimizer.validate();
  if (options.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  for (Index count : source.class_counts()) {
    if (count < 2) throw std::invalid_argument("singleton class under leave-one-out: model selection needs >= 2 instances per class");
  }
  if (target.size() < 2) throw std::invalid_argument("target PCA initialization needs at least 2 target rows");

  SelectionReport report;
  for (int d : grid.dims)
    for (double l : grid.lambdas) {
      CellRecord cell;
      cell.d = d;
      cell.lambda = l;
      report.cells.push_back(std::move(cell));
    }

  auto run_cell = [&](CellRecord& cell) {
    try {
      auto res = minimize_with_restarts(source, target, cell.lambda, cell.d, options.restarts, options.optimizer);
      const Transform& l = res.best.transform;
      const auto& last = res.best.trace.records.back();
      cell.objective.total = last.total;
      cell.objective.i_t = last.i_t;
      cell.objective.i_st = last.i_st;
      cell.objective.lambda = cell.lambda;
      cell.objective.eps_s = source_error(l, source);
      cell.trace = std::move(res.best.trace);
      cell.transform = l;
      cell.best_restart = res.best_restart;
      cell.failed_restarts = res.failed_restarts;
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  };

  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(report.cells.size())));
  if (threads == 1) {
    for (auto& cell : report.cells) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < report.cells.size(); i = next++) run_cell(report.cells[i]);
      });
  }

  bool any_ok = false;
  for (const auto& c : report.cells) any_ok = any_ok || c.ok;
  if (!any_ok) {
    std::ostringstream os;
    os << "numerical failure: every grid cell failed;";
    for (const auto& c : report.cells) os << " [d=" << c.d << " lambda=" << c.lambda << ": " << c.error << "]";
    throw GridSearchFailure(os.str(), std::move(report.cells));
  }
  report.winner = select_winner(report.cells, &report.tie_break_note);
  return report;
}

}  // namespace itda
