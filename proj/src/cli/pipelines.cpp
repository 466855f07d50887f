#include "itda/cli/pipelines.hpp"

#include "itda/cli/csv.hpp"
#include "itda/errors.hpp"
#include "itda/evaluation.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#ifndef ITDA_VERSION
#define ITDA_VERSION "dev"
#endif

namespace itda::cli {
namespace {

using nlohmann::json;

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_json(const PredictionResult& r) {
  json per_class = json::array();
  for (const auto& a : r.per_class_accuracy) per_class.push_back(optional_number(a));
  return {{"accuracy", optional_number(r.accuracy)}, {"per_class_accuracy", per_class}, {"confusion", r.confusion}};
}

json cell_json(const CellRecord& c) {
  json j;
  j["d"] = c.d;
  j["lambda"] = c.lambda;
  j["status"] = c.ok ? "ok" : "failed";
  if (!c.ok) {
    j["error"] = c.error;
    return j;
  }
  j["objective"] = {{"total", c.objective.total},
                    {"i_t", c.objective.i_t},
                    {"i_st", c.objective.i_st},
                    {"eps_s", optional_number(c.objective.eps_s)}};
  j["termination"] = to_string(c.trace.termination);
  j["iterations"] = c.trace.records.size() - 1;
  j["best_restart"] = c.best_restart;
  j["failed_restarts"] = c.failed_restarts;
  json traj = {{"total", json::array()}, {"i_t", json::array()}, {"i_st", json::array()},
               {"eps_s", json::array()}, {"step", json::array()}, {"trace", json::array()}};
  for (const auto& r : c.trace.records) {
    traj["total"].push_back(r.total);
    traj["i_t"].push_back(r.i_t);
    traj["i_st"].push_back(r.i_st);
    traj["eps_s"].push_back(optional_number(r.eps_s));
    traj["step"].push_back(r.step);
    traj["trace"].push_back(r.trace);
  }
  j["trajectory"] = std::move(traj);
  return j;
}

std::map<int, std::string> load_label_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<int, std::string> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("label map rows must be 'id,name'", number);
    try {
      std::size_t used = 0;
      const int id = std::stoi(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("trailing characters");
      out[id] = line.substr(comma + 1);
    } catch (const std::exception&) {
      if (number == 1 && out.empty()) continue;  // header
      throw ParseError("label map id is not an integer", number);
    }
  }
  return out;
}

}  // namespace

nlohmann::json run_adapt(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();

  const SourceDataset raw_source = load_labeled_csv(config.source_path);
  const TargetDataset raw_target = load_unlabeled_csv(config.target_path);
  std::optional<std::vector<int>> truth;
  if (config.target_labels_path) {
    truth = load_labels_csv(*config.target_labels_path);
    if (static_cast<Index>(truth->size()) != raw_target.size())
      throw std::invalid_argument("target label count does not match target rows");
  }
  const auto [source, target] = standardize(raw_source, raw_target, config.standardize);

  SelectionOptions options;
  options.optimizer = config.optimizer;
  options.optimizer.seed = config.seed;
  options.optimizer.record_source_error = true;
  options.restarts = config.restarts;
  options.threads = config.threads;
  const SelectionReport selection = grid_search(source, target, config.grid, options);
  const CellRecord& win = selection.winning_cell();

  const std::vector<int> predictions = knn1_classify(*win.transform, source, target);
  save_transform_csv(config.resolved_transform_path(), *win.transform);

  json report;
  report["schema_version"] = kSchemaVersion;
  json echo = to_json(config);
  echo["artifact_version"] = ITDA_VERSION;
  echo["num_classes"] = source.num_classes();
  echo["source_rows"] = source.size();
  echo["target_rows"] = target.size();
  echo["dim"] = source.dim();
  if (config.label_map_path) {
    json table = json::object();
    for (const auto& [id, name] : load_label_map(*config.label_map_path)) table[std::to_string(id)] = name;
    echo["label_names"] = std::move(table);
  }
  report["config_echo"] = std::move(echo);

  json cells = json::array();
  for (const auto& c : selection.cells) cells.push_back(cell_json(c));
  report["cells"] = std::move(cells);
  report["winner"] = {{"index", selection.winner},
                      {"d", win.d},
                      {"lambda", win.lambda},
                      {"eps_s", optional_number(win.objective.eps_s)},
                      {"i_t", win.objective.i_t},
                      {"i_st", win.objective.i_st},
                      {"total", win.objective.total},
                      {"tie_break", selection.tie_break_note},
                      {"transform_path", config.resolved_transform_path()}};
  report["predictions"] = predictions;
  report["metrics"] = truth ? metrics_json(score(predictions, *truth, source.num_classes())) : json(nullptr);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  report["timings"] = {{"wall_clock_seconds", seconds}};
  write_json(config.output_path, report);
  return report;
}

void run_synth(const SyntheticConfig& config, const std::filesystem::path& out_dir) {
  const SyntheticData data = generate(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  save_csv(out_dir / "source.csv", data.source);
  save_csv(out_dir / "target.csv", data.target);
  save_labels_csv(out_dir / "target_labels.csv", data.target_labels);
  write_json(out_dir / "meta.json", {{"schema_version", kSchemaVersion},
                                     {"config", to_json(config)},
                                     {"seed", config.seed},
                                     {"artifact_version", ITDA_VERSION}});
}

SyntheticConfig read_synth_meta(const std::filesystem::path& meta_path) {
  std::ifstream in(meta_path);
  if (!in) throw IoError("cannot open " + meta_path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(meta_path.string() + ": " + e.what(), 0);
  }
  SyntheticConfig c;
  apply_json(j.at("config"), c);
  return c;
}

nlohmann::json run_eval(const EvalConfig& config) {
  const Transform l = load_transform_csv(config.transform_path);
  const SourceDataset raw_source = load_labeled_csv(config.source_path);
  const TargetDataset raw_target = load_unlabeled_csv(config.target_path);
  const std::vector<int> truth = load_labels_csv(config.truth_path);
  if (static_cast<Index>(truth.size()) != raw_target.size())
    throw std::invalid_argument("truth has " + std::to_string(truth.size()) + " labels for " +
                                std::to_string(raw_target.size()) + " target rows");
  if (l.in_dim() != raw_source.dim())
    throw std::invalid_argument("transform input dimension " + std::to_string(l.in_dim()) +
                                " does not match data dimension " + std::to_string(raw_source.dim()));
  const auto [source, target] = standardize(raw_source, raw_target, config.standardize);
  const PredictionResult r = score(knn1_classify(l, source, target), truth, source.num_classes());

  json out = metrics_json(r);
  out["schema_version"] = kSchemaVersion;
  out["predictions"] = r.predicted;
  if (config.output_path) write_json(*config.output_path, out);
  return out;
}

int run_guarded(const std::function<void()>& body, std::ostream& err) {
  auto fail = [&](int code, const char* kind, const std::string& message) {
    err << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
    return code;
  };
  try {
    body();
    return kExitOk;
  } catch (const ParseError& e) {
    return fail(kExitIoOrConfig, "data", e.what());
  } catch (const IoError& e) {
    return fail(kExitIoOrConfig, "io", e.what());
  } catch (const NumericalFailure& e) {
    return fail(kExitNumerical, "numerical", e.what());
  } catch (const GridSearchFailure& e) {
    return fail(kExitNumerical, "numerical", e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(kExitIoOrConfig, "config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitIoOrConfig, "config", e.what());
  } catch (const std::exception& e) {
    return fail(kExitNumerical, "internal", e.what());
  }
}

}  // namespace itda::cli
