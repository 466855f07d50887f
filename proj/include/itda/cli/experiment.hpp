#pragma once

#include "itda/model_selection.hpp"
#include "itda/optimizer.hpp"
#include "itda/synthetic.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace itda::cli {

inline constexpr int kSchemaVersion = 1;

/// Everything `itda adapt` needs. A JSON config file may provide any subset
/// of the fields; explicit command-line flags override it.
struct ExperimentConfig {
  std::string source_path;
  std::string target_path;
  std::optional<std::string> target_labels_path;  // scoring only
  std::optional<std::string> label_map_path;      // "id,name" rows
  HyperGrid grid = HyperGrid::reference();
  OptimizerConfig optimizer;
  StandardizeMode standardize = StandardizeMode::Pooled;
  int restarts = 3;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output_path = "report.json";
  std::optional<std::string> transform_path;  // defaults next to the report

  /// Checks the input files exist and the grid is non-empty. Throws
  /// itda::IoError for missing files and std::invalid_argument otherwise.
  void validate() const;

  std::string resolved_transform_path() const;
};

std::string to_string(StandardizeMode mode);
StandardizeMode parse_standardize_mode(const std::string& text);

/// Overlays the keys present in `j` onto `config`; unknown keys are rejected.
void apply_json(const nlohmann::json& j, ExperimentConfig& config);
nlohmann::json to_json(const ExperimentConfig& config);

void apply_json(const nlohmann::json& j, SyntheticConfig& config);
nlohmann::json to_json(const SyntheticConfig& config);

/// Thread count from ITDA_THREADS, if set to a positive integer.
std::optional<int> threads_from_env();

}  // namespace itda::cli
