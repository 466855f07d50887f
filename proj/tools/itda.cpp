// itda: learn a domain-adaptive linear transform and classify target data with 1-NN.
#include "itda/cli/experiment.hpp"
#include "itda/cli/pipelines.hpp"
#include "itda/errors.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <thread>

namespace {

using namespace itda;
using namespace itda::cli;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-theoretic unsupervised domain adaptation with 1-NN classification"};
  app.require_subcommand(1);

  // adapt ------------------------------------------------------------------
  auto* adapt = app.add_subcommand("adapt", "Standardize, grid-search (d, lambda), classify the target domain");
  std::string cfg_path, source, target, target_labels, label_map, output, transform_out, standardize_mode;
  std::vector<int> dims;
  std::vector<double> lambdas;
  int restarts = 0, threads = 0, max_iters = 0;
  std::uint64_t seed = 0;
  double grad_tol = 0, armijo_c = 0, backtrack = 0, initial_step = 0, min_step = 0;
  adapt->add_option("--config", cfg_path, "JSON file supplying any of the options below");
  auto* o_source = adapt->add_option("--source", source, "Labeled source CSV (features..., label)");
  auto* o_target = adapt->add_option("--target", target, "Unlabeled target CSV");
  auto* o_tlabels = adapt->add_option("--target-labels", target_labels, "Held-out target labels for scoring");
  auto* o_lmap = adapt->add_option("--label-map", label_map, "CSV of 'id,name' rows echoed into the report");
  auto* o_dims = adapt->add_option("--dims", dims, "Candidate output dimensions")->delimiter(',');
  auto* o_lambdas = adapt->add_option("--lambdas", lambdas, "Candidate lambda values")->delimiter(',');
  auto* o_std = adapt->add_option("--standardize", standardize_mode, "pooled | per-domain | off");
  auto* o_restarts = adapt->add_option("--restarts", restarts, "Starts per cell (1 PCA + random)");
  auto* o_seed = adapt->add_option("--seed", seed, "Random seed");
  auto* o_threads = adapt->add_option("--threads", threads, "Concurrent grid cells (default: all cores)");
  auto* o_out = adapt->add_option("--out", output, "Report JSON path");
  auto* o_tout = adapt->add_option("--transform-out", transform_out, "Learned transform CSV path");
  auto* o_iters = adapt->add_option("--max-iters", max_iters, "Iteration budget per run");
  auto* o_gtol = adapt->add_option("--grad-tol", grad_tol, "Projected-gradient tolerance");
  auto* o_armijo = adapt->add_option("--armijo-c", armijo_c, "Armijo sufficient-decrease constant");
  auto* o_back = adapt->add_option("--backtrack-factor", backtrack, "Step shrink factor on rejection");
  auto* o_step = adapt->add_option("--initial-step", initial_step, "First trial step size");
  auto* o_minstep = adapt->add_option("--min-step", min_step, "Step size below which descent stops");

  // synth ------------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Write a synthetic two-domain dataset");
  SyntheticConfig sc;
  std::string synth_cfg, out_dir;
  synth->add_option("--config", synth_cfg, "JSON synthetic config (or a meta.json from a previous run)");
  synth->add_option("--out-dir", out_dir, "Output directory")->required();
  auto* s_classes = synth->add_option("--classes", sc.num_classes);
  auto* s_signal = synth->add_option("--signal-dim", sc.signal_dim);
  auto* s_noise = synth->add_option("--noise-dim", sc.noise_dim);
  auto* s_points = synth->add_option("--points-per-class", sc.points_per_class);
  auto* s_cstd = synth->add_option("--cluster-std", sc.cluster_std);
  auto* s_sep = synth->add_option("--class-separation", sc.class_separation);
  auto* s_rot = synth->add_option("--rotation", sc.shift.rotation_angle, "Radians");
  auto* s_trans = synth->add_option("--translation", sc.shift.translation);
  auto* s_nstd = synth->add_option("--noise-std", sc.noise_std);
  auto* s_seed = synth->add_option("--seed", sc.seed);

  // eval -------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Score 1-NN predictions under a saved transform");
  EvalConfig ec;
  std::string eval_std = "pooled", eval_out;
  eval->add_option("--transform", ec.transform_path)->required();
  eval->add_option("--source", ec.source_path)->required();
  eval->add_option("--target", ec.target_path)->required();
  eval->add_option("--truth", ec.truth_path)->required();
  eval->add_option("--standardize", eval_std, "Must match the adapt run")->capture_default_str();
  auto* e_out = eval->add_option("--out", eval_out, "Metrics JSON path (also printed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitIoOrConfig;
  }

  if (adapt->parsed()) {
    return run_guarded(
        [&] {
          ExperimentConfig c;
          c.threads = default_threads();
          if (!cfg_path.empty()) apply_json(read_json_file(cfg_path), c);
          if (o_source->count()) c.source_path = source;
          if (o_target->count()) c.target_path = target;
          if (o_tlabels->count()) c.target_labels_path = target_labels;
          if (o_lmap->count()) c.label_map_path = label_map;
          if (o_dims->count()) c.grid.dims = dims;
          if (o_lambdas->count()) c.grid.lambdas = lambdas;
          if (o_std->count()) c.standardize = parse_standardize_mode(standardize_mode);
          if (o_restarts->count()) c.restarts = restarts;
          if (o_seed->count()) c.seed = seed;
          if (o_threads->count()) c.threads = threads;
          if (o_out->count()) c.output_path = output;
          if (o_tout->count()) c.transform_path = transform_out;
          if (o_iters->count()) c.optimizer.max_iters = max_iters;
          if (o_gtol->count()) c.optimizer.grad_tol = grad_tol;
          if (o_armijo->count()) c.optimizer.armijo_c = armijo_c;
          if (o_back->count()) c.optimizer.backtrack_factor = backtrack;
          if (o_step->count()) c.optimizer.initial_step = initial_step;
          if (o_minstep->count()) c.optimizer.min_step = min_step;
          if (auto env = threads_from_env()) c.threads = *env;
          const auto report = run_adapt(c);
          std::cout << "winner d=" << report["winner"]["d"] << " lambda=" << report["winner"]["lambda"]
                    << " eps_s=" << report["winner"]["eps_s"];
          if (!report["metrics"].is_null()) std::cout << " accuracy=" << report["metrics"]["accuracy"];
          std::cout << "\nreport: " << c.output_path << "\n";
        },
        std::cerr);
  }

  if (synth->parsed()) {
    return run_guarded(
        [&] {
          SyntheticConfig c;
          if (!synth_cfg.empty()) {
            auto j = read_json_file(synth_cfg);
            apply_json(j.contains("config") ? j.at("config") : j, c);
          }
          if (s_classes->count()) c.num_classes = sc.num_classes;
          if (s_signal->count()) c.signal_dim = sc.signal_dim;
          if (s_noise->count()) c.noise_dim = sc.noise_dim;
          if (s_points->count()) c.points_per_class = sc.points_per_class;
          if (s_cstd->count()) c.cluster_std = sc.cluster_std;
          if (s_sep->count()) c.class_separation = sc.class_separation;
          if (s_rot->count()) c.shift.rotation_angle = sc.shift.rotation_angle;
          if (s_trans->count()) c.shift.translation = sc.shift.translation;
          if (s_nstd->count()) c.noise_std = sc.noise_std;
          if (s_seed->count()) c.seed = sc.seed;
          run_synth(c, out_dir);
          std::cout << "wrote " << out_dir << "\n";
        },
        std::cerr);
  }

  return run_guarded(
      [&] {
        ec.standardize = parse_standardize_mode(eval_std);
        if (e_out->count()) ec.output_path = eval_out;
        std::cout << run_eval(ec).dump(2) << "\n";
      },
      std::cerr);
}
