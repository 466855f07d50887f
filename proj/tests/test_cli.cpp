#include "itda/cli/csv.hpp"
#include "itda/cli/experiment.hpp"
#include "itda/cli/pipelines.hpp"
#include "itda/errors.hpp"
#include "itda/evaluation.hpp"

#include "doctest.h"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace itda;
using namespace itda::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("itda_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SyntheticConfig tiny_synth(std::uint64_t seed) {
  SyntheticConfig c;
  c.signal_dim = 3;
  c.noise_dim = 2;
  c.points_per_class = 6;
  c.seed = seed;
  return c;
}

ExperimentConfig tiny_experiment(const fs::path& dir) {
  ExperimentConfig e;
  e.source_path = (dir / "source.csv").string();
  e.target_path = (dir / "target.csv").string();
  e.target_labels_path = (dir / "target_labels.csv").string();
  e.grid = HyperGrid{{2}, {0.0, 1.0}};
  e.optimizer.max_iters = 15;
  e.restarts = 2;
  e.output_path = (dir / "report.json").string();
  return e;
}

}  // namespace

TEST_CASE("load_csv example") {
  auto dir = scratch("load");
  write_file(dir / "a.csv", "1.0,2.0,0\n3.0,4.0,1\n");
  auto s = std::get<SourceDataset>(load_csv(dir / "a.csv", true));
  CHECK(s.size() == 2);
  CHECK(s.dim() == 2);
  CHECK(s.labels() == std::vector<int>{0, 1});
  CHECK(s.features().values()(1, 0) == 3.0);

  auto t = std::get<TargetDataset>(load_csv(dir / "a.csv", false));
  CHECK(t.dim() == 3);

  write_file(dir / "h.csv", "x,y,label\n1,2,0\n\n3,4,1\n");
  CHECK(load_labeled_csv(dir / "h.csv").size() == 2);
}

TEST_CASE("malformed CSV names the line") {
  auto dir = scratch("bad");
  write_file(dir / "ragged.csv", "1.0,2.0,0\n3.0,1\n");
  try {
    load_labeled_csv(dir / "ragged.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  write_file(dir / "nan.csv", "1.0,nan,0\n");
  CHECK_THROWS_AS(load_labeled_csv(dir / "nan.csv"), ParseError);
  write_file(dir / "word.csv", "1.0,2.0,0\n1.0,abc,1\n");
  CHECK_THROWS_AS(load_labeled_csv(dir / "word.csv"), ParseError);
  write_file(dir / "label.csv", "1.0,2.0,0.5\n");
  CHECK_THROWS_AS(load_labeled_csv(dir / "label.csv"), ParseError);
  CHECK_THROWS_AS(load_labeled_csv(dir / "missing.csv"), IoError);
}

TEST_CASE("save and load round trip exactly") {
  auto dir = scratch("roundtrip");
  auto data = generate(tiny_synth(3));
  save_csv(dir / "s.csv", data.source);
  save_csv(dir / "t.csv", data.target);
  save_labels_csv(dir / "l.csv", data.target_labels);
  CHECK(load_labeled_csv(dir / "s.csv") == data.source);
  CHECK(load_unlabeled_csv(dir / "t.csv") == data.target);
  CHECK(load_labels_csv(dir / "l.csv") == data.target_labels);

  Transform l(Eigen::MatrixXd::Random(2, 5) * 1e-3);
  save_transform_csv(dir / "l.tsv", l);
  CHECK(load_transform_csv(dir / "l.tsv") == l);
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("synth output is deterministic and self-describing") {
  auto a = scratch("synth_a"), b = scratch("synth_b"), c = scratch("synth_c");
  run_synth(tiny_synth(7), a);
  run_synth(tiny_synth(7), b);
  run_synth(tiny_synth(8), c);
  for (const char* f : {"source.csv", "target.csv", "target_labels.csv", "meta.json"})
    CHECK(read_file(a / f) == read_file(b / f));
  CHECK(read_file(a / "source.csv") != read_file(c / "source.csv"));
  CHECK(read_synth_meta(a / "meta.json") == tiny_synth(7));
  auto meta = json::parse(read_file(a / "meta.json"));
  CHECK(meta["schema_version"] == kSchemaVersion);
  CHECK(meta["seed"] == 7);
}

TEST_CASE("experiment config json") {
  ExperimentConfig e;
  apply_json(json::parse(R"({"source":"s.csv","dims":[2,3],"lambdas":[0,1],"standardize":"per-domain",
                             "optimizer":{"max_iters":5}})"),
             e);
  CHECK(e.source_path == "s.csv");
  CHECK(e.grid.dims == std::vector<int>{2, 3});
  CHECK(e.standardize == StandardizeMode::PerDomain);
  CHECK(e.optimizer.max_iters == 5);
  CHECK(e.restarts == 3);
  CHECK_THROWS(apply_json(json::parse(R"({"sauce":"s.csv"})"), e));
  CHECK_THROWS_AS(parse_standardize_mode("zscore"), std::invalid_argument);

  ExperimentConfig back;
  apply_json(to_json(e), back);
  CHECK(to_json(back) == to_json(e));
  e.output_path = "out/run.json";
  CHECK(fs::path(e.resolved_transform_path()) == fs::path("out/run_transform.csv"));
}

TEST_CASE("adapt and eval agree with the library") {
  auto dir = scratch("adapt");
  run_synth(tiny_synth(11), dir);
  auto config = tiny_experiment(dir);
  auto report = run_adapt(config);
  for (const char* key : {"schema_version", "config_echo", "cells", "winner", "predictions", "metrics", "timings"})
    CHECK(report.contains(key));
  CHECK(report["cells"].size() == 2);
  CHECK(fs::exists(config.resolved_transform_path()));

  EvalConfig ev{config.resolved_transform_path(), config.source_path, config.target_path, *config.target_labels_path};
  auto metrics = run_eval(ev);
  CHECK(metrics["predictions"] == report["predictions"]);
  CHECK(metrics["accuracy"] == report["metrics"]["accuracy"]);

  // Independent recomputation with library calls.
  auto [s, t] = standardize(load_labeled_csv(config.source_path), load_unlabeled_csv(config.target_path),
                            StandardizeMode::Pooled);
  auto truth = load_labels_csv(*config.target_labels_path);
  auto pred = knn1_classify(load_transform_csv(config.resolved_transform_path()), s, t);
  CHECK(metrics["accuracy"].get<double>() == accuracy(pred, truth));

  // Truth equal to the predictions scores 1; a constant wrong label scores 0.
  save_labels_csv(dir / "self.csv", pred);
  ev.truth_path = (dir / "self.csv").string();
  CHECK(run_eval(ev)["accuracy"].get<double>() == 1.0);
  std::vector<int> wrong(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) wrong[i] = (pred[i] + 1) % 3;
  save_labels_csv(dir / "wrong.csv", wrong);
  ev.truth_path = (dir / "wrong.csv").string();
  CHECK(run_eval(ev)["accuracy"].get<double>() == 0.0);
}

TEST_CASE("run_guarded maps failures to exit codes") {
  std::ostringstream err;
  CHECK(run_guarded([] {}, err) == kExitOk);
  CHECK(run_guarded([] { throw IoError("gone"); }, err) == kExitIoOrConfig);
  auto j = json::parse(err.str());
  CHECK(j["error"]["kind"] == "io");
  CHECK(j["error"]["exit_code"] == 2);

  std::ostringstream err2;
  ExperimentConfig missing;
  missing.source_path = "/nonexistent/source.csv";
  missing.target_path = "/nonexistent/target.csv";
  CHECK(run_guarded([&] { run_adapt(missing); }, err2) == kExitIoOrConfig);
  CHECK(json::parse(err2.str())["error"]["kind"] == "io");

  std::ostringstream err3;
  CHECK(run_guarded([] { throw NumericalFailure("boom", {}); }, err3) == kExitNumerical);
  CHECK(json::parse(err3.str())["error"]["kind"] == "numerical");
}

TEST_CASE("command-line binary") {
  auto dir = scratch("binary");
  const std::string exe = ITDA_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                                    (dir / "stderr.txt").string())
                                       .c_str());
    return WEXITSTATUS(status);
  };
  REQUIRE(run("synth --out-dir " + dir.string() + " --signal-dim 3 --noise-dim 2 --points-per-class 6 --seed 4") == 0);
  CHECK(read_synth_meta(dir / "meta.json") == tiny_synth(4));

  write_file(dir / "cfg.json", R"({"dims":[2],"lambdas":[0,1],"restarts":1,"optimizer":{"max_iters":50}})");
  const std::string common = " --source " + (dir / "source.csv").string() + " --target " +
                             (dir / "target.csv").string() + " --config " + (dir / "cfg.json").string() +
                             " --out " + (dir / "r.json").string();
  REQUIRE(run("adapt" + common + " --max-iters 3 --lambdas 4") == 0);
  auto report = json::parse(read_file(dir / "r.json"));
  CHECK(report["config_echo"]["optimizer"]["max_iters"] == 3);
  CHECK(report["config_echo"]["lambdas"] == json::array({4.0}));
  CHECK(report["metrics"].is_null());

  CHECK(run("adapt --source " + (dir / "nope.csv").string() + " --target " + (dir / "target.csv").string()) == 2);
  CHECK(json::parse(read_file(dir / "stderr.txt"))["error"]["kind"] == "io");
  CHECK(run("adapt --bogus-flag") == 2);
  CHECK(run("eval --transform " + (dir / "r_transform.csv").string() + " --source " + (dir / "source.csv").string() +
            " --target " + (dir / "target.csv").string() + " --truth " + (dir / "target_labels.csv").string()) == 0);
}
