#pragma once

#include "itda/cli/experiment.hpp"

#include "json.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace itda::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitIoOrConfig = 2;

/// standardize -> grid search -> 1-NN with the winning transform. Writes the
/// JSON report to config.output_path and the learned L as CSV; returns the report.
nlohmann::json run_adapt(const ExperimentConfig& config);

/// Writes source.csv, target.csv, target_labels.csv and meta.json into `out_dir`.
void run_synth(const SyntheticConfig& config, const std::filesystem::path& out_dir);

/// Reads a SyntheticConfig back from a meta.json written by run_synth.
SyntheticConfig read_synth_meta(const std::filesystem::path& meta_path);

struct EvalConfig {
  std::string transform_path;
  std::string source_path;
  std::string target_path;
  std::string truth_path;
  StandardizeMode standardize = StandardizeMode::Pooled;  // must match the adapt run
  std::optional<std::string> output_path;
};

/// 1-NN under a saved transform, scored against held-out labels.
nlohmann::json run_eval(const EvalConfig& config);

/// Runs `body`, mapping exceptions to exit codes (0 ok, 1 numerical failure,
/// 2 I/O or configuration failure) and writing a JSON error object to `err`.
int run_guarded(const std::function<void()>& body, std::ostream& err);

}  // namespace itda::cli
