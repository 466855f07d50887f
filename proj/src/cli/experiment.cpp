#include "itda/cli/experiment.hpp"

#include "itda/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>
#include <stdexcept>

namespace itda::cli {
namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument(std::string("unknown ") + what + " key '" + key + "'");
  }
}

template <typename T>
void take(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_string(StandardizeMode mode) {
  switch (mode) {
    case StandardizeMode::Pooled:
      return "pooled";
    case StandardizeMode::PerDomain:
      return "per-domain";
    case StandardizeMode::Off:
      return "off";
  }
  return "pooled";
}

StandardizeMode parse_standardize_mode(const std::string& text) {
  if (text == "pooled") return StandardizeMode::Pooled;
  if (text == "per-domain") return StandardizeMode::PerDomain;
  if (text == "off") return StandardizeMode::Off;
  throw std::invalid_argument("standardization mode must be pooled, per-domain or off (got '" + text + "')");
}

void ExperimentConfig::validate() const {
  auto require_file = [](const std::string& path, const char* what) {
    if (path.empty()) throw std::invalid_argument(std::string(what) + " path is required");
    if (!std::filesystem::is_regular_file(path)) throw IoError(std::string(what) + " file not found: " + path);
  };
  require_file(source_path, "source");
  require_file(target_path, "target");
  if (target_labels_path) require_file(*target_labels_path, "target labels");
  if (label_map_path) require_file(*label_map_path, "label map");
  if (grid.dims.empty() || grid.lambdas.empty()) throw std::invalid_argument("hyperparameter grid is empty");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  optimizer.validate();
}

std::string ExperimentConfig::resolved_transform_path() const {
  if (transform_path) return *transform_path;
  std::filesystem::path p(output_path);
  p.replace_extension();
  return p.string() + "_transform.csv";
}

void apply_json(const nlohmann::json& j, ExperimentConfig& c) {
  reject_unknown(j,
                 {"source", "target", "target_labels", "label_map", "dims", "lambdas", "standardize", "restarts",
                  "seed", "threads", "output", "transform_output", "optimizer"},
                 "experiment config");
  take(j, "source", c.source_path);
  take(j, "target", c.target_path);
  if (j.contains("target_labels") && !j.at("target_labels").is_null())
    c.target_labels_path = j.at("target_labels").get<std::string>();
  if (j.contains("label_map") && !j.at("label_map").is_null())
    c.label_map_path = j.at("label_map").get<std::string>();
  take(j, "dims", c.grid.dims);
  take(j, "lambdas", c.grid.lambdas);
  if (j.contains("standardize")) c.standardize = parse_standardize_mode(j.at("standardize").get<std::string>());
  take(j, "restarts", c.restarts);
  take(j, "seed", c.seed);
  take(j, "threads", c.threads);
  take(j, "output", c.output_path);
  if (j.contains("transform_output") && !j.at("transform_output").is_null())
    c.transform_path = j.at("transform_output").get<std::string>();
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    reject_unknown(o, {"max_iters", "grad_tol", "armijo_c", "backtrack_factor", "initial_step", "min_step"},
                   "optimizer config");
    take(o, "max_iters", c.optimizer.max_iters);
    take(o, "grad_tol", c.optimizer.grad_tol);
    take(o, "armijo_c", c.optimizer.armijo_c);
    take(o, "backtrack_factor", c.optimizer.backtrack_factor);
    take(o, "initial_step", c.optimizer.initial_step);
    take(o, "min_step", c.optimizer.min_step);
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["source"] = c.source_path;
  j["target"] = c.target_path;
  j["target_labels"] = c.target_labels_path ? nlohmann::json(*c.target_labels_path) : nlohmann::json(nullptr);
  j["label_map"] = c.label_map_path ? nlohmann::json(*c.label_map_path) : nlohmann::json(nullptr);
  j["dims"] = c.grid.dims;
  j["lambdas"] = c.grid.lambdas;
  j["standardize"] = to_string(c.standardize);
  j["restarts"] = c.restarts;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output"] = c.output_path;
  j["transform_output"] = c.resolved_transform_path();
  j["optimizer"] = {{"max_iters", c.optimizer.max_iters},
                    {"grad_tol", c.optimizer.grad_tol},
                    {"armijo_c", c.optimizer.armijo_c},
                    {"backtrack_factor", c.optimizer.backtrack_factor},
                    {"initial_step", c.optimizer.initial_step},
                    {"min_step", c.optimizer.min_step}};
  return j;
}

void apply_json(const nlohmann::json& j, SyntheticConfig& c) {
  reject_unknown(j,
                 {"num_classes", "signal_dim", "noise_dim", "points_per_class", "cluster_std", "class_separation",
                  "rotation_angle", "translation", "noise_std", "seed"},
                 "synthetic config");
  take(j, "num_classes", c.num_classes);
  take(j, "signal_dim", c.signal_dim);
  take(j, "noise_dim", c.noise_dim);
  take(j, "points_per_class", c.points_per_class);
  take(j, "cluster_std", c.cluster_std);
  take(j, "class_separation", c.class_separation);
  take(j, "rotation_angle", c.shift.rotation_angle);
  take(j, "translation", c.shift.translation);
  take(j, "noise_std", c.noise_std);
  take(j, "seed", c.seed);
}

nlohmann::json to_json(const SyntheticConfig& c) {
  return {{"num_classes", c.num_classes},
          {"signal_dim", c.signal_dim},
          {"noise_dim", c.noise_dim},
          {"points_per_class", c.points_per_class},
          {"cluster_std", c.cluster_std},
          {"class_separation", c.class_separation},
          {"rotation_angle", c.shift.rotation_angle},
          {"translation", c.shift.translation},
          {"noise_std", c.noise_std},
          {"seed", c.seed}};
}

std::optional<int> threads_from_env() {
  const char* v = std::getenv("ITDA_THREADS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw std::invalid_argument(std::string("ITDA_THREADS must be a positive integer, got '") + v + "'");
  return static_cast<int>(n);
}

}  // namespace itda::cli
