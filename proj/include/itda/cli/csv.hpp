#pragma once

#include "itda/data_model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace itda::cli {

/// Dataset CSV: comma-separated, '.' decimals, optional header row (detected
/// when the first non-blank row has a non-numeric cell). Labeled files carry
/// the 0-based integer class id in the last column.
SourceDataset load_labeled_csv(const std::filesystem::path& path, std::optional<int> num_classes = std::nullopt);
TargetDataset load_unlabeled_csv(const std::filesystem::path& path);
std::variant<SourceDataset, TargetDataset> load_csv(const std::filesystem::path& path, bool labeled);

/// One integer label per row (a header row is allowed).
std::vector<int> load_labels_csv(const std::filesystem::path& path);

/// d rows of D comma-separated entries.
Transform load_transform_csv(const std::filesystem::path& path);

void save_csv(const std::filesystem::path& path, const SourceDataset& data);
void save_csv(const std::filesystem::path& path, const TargetDataset& data);
void save_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels);
void save_transform_csv(const std::filesystem::path& path, const Transform& transform);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace itda::cli
