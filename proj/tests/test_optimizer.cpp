#include "itda/optimizer.hpp"

#include "itda/synthetic.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <limits>

using namespace itda;

namespace {

double captured_variance(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& centered) {
  return (centered * rows.transpose()).squaredNorm();
}

SyntheticData small_synthetic(std::uint64_t seed) {
  SyntheticConfig c;
  c.signal_dim = 3;
  c.noise_dim = 3;
  c.points_per_class = 10;
  c.seed = seed;
  return generate(c);
}

}  // namespace

TEST_CASE("project_trace_ball") {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd l = oracle::gaussian(3, 6, 1.0, rng);

  Transform inside(l * std::sqrt(1.5 / l.squaredNorm()));  // trace = d / 2
  CHECK(project_trace_ball(inside, 3) == inside);

  Transform outside(l * std::sqrt(12.0 / l.squaredNorm()));  // trace = 4d
  Transform projected = project_trace_ball(outside, 3);
  CHECK((projected.matrix() - outside.matrix() * 0.5).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(projected.trace_norm() - 3.0) < 1e-12);

  for (int trial = 0; trial < 20; ++trial) {
    Transform r(oracle::gaussian(2, 5, 3.0, rng));
    Transform once = project_trace_ball(r, 2);
    CHECK(project_trace_ball(once, 2) == once);
    CHECK(once.trace_norm() <= 2.0 + 1e-12);
  }
}

TEST_CASE("init_target_pca") {
  SUBCASE("points on a line") {
    Eigen::MatrixXd x(5, 2);
    for (int i = 0; i < 5; ++i) x.row(i) << 3.0 * i, 4.0 * i;
    Transform l = init_target_pca(TargetDataset(FeatureMatrix(x)), 1);
    CHECK(std::abs(std::abs(l.matrix()(0, 0)) - 0.6) < 1e-12);
    CHECK(std::abs(std::abs(l.matrix()(0, 1)) - 0.8) < 1e-12);
    CHECK(std::abs(l.trace_norm() - 1.0) < 1e-12);
  }
  SUBCASE("isotropic cloud gives orthonormal rows") {
    std::mt19937_64 rng(2);
    Transform l = init_target_pca(oracle::random_target(200, 6, rng), 2);
    CHECK((l.matrix() * l.matrix().transpose() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(l.trace_norm() - 2.0) < 1e-9);
  }
  SUBCASE("captures at least as much variance as random subspaces") {
    std::mt19937_64 rng(3);
    Eigen::MatrixXd x = oracle::gaussian(60, 7, 1.0, rng);
    x.col(2) *= 4.0;
    x.col(5) += 0.5 * x.col(2);
    TargetDataset t{FeatureMatrix(x)};
    Transform l = init_target_pca(t, 3);
    Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const double best = captured_variance(l.matrix(), centered);
    for (int k = 0; k < 100; ++k) {
      Transform r = init_random(7, 3, 1000 + k);
      CHECK(best >= captured_variance(r.matrix(), centered) - 1e-9);
    }
  }
  SUBCASE("rank-deficient targets are padded with orthonormal directions") {
    std::mt19937_64 rng(4);
    Transform l = init_target_pca(oracle::random_target(3, 6, rng), 4, 99);
    CHECK((l.matrix() * l.matrix().transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(init_target_pca(oracle::random_target(3, 6, rng), 4, 99).out_dim() == 4);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(init_target_pca(TargetDataset(FeatureMatrix(Eigen::MatrixXd::Ones(1, 3))), 1), std::invalid_argument);
    CHECK_THROWS_AS(init_target_pca(TargetDataset(FeatureMatrix(Eigen::MatrixXd::Random(5, 3))), 4), std::invalid_argument);
  }
}

TEST_CASE("init_random") {
  Transform a = init_random(9, 4, 17);
  CHECK(a == init_random(9, 4, 17));
  CHECK((a.matrix() * a.matrix().transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(a.trace_norm() - 4.0) < 1e-10);
  CHECK((a.matrix() - init_random(9, 4, 18).matrix()).norm() > 0.0);
  CHECK_THROWS_AS(init_random(3, 4, 0), std::invalid_argument);
}

TEST_CASE("optimizer config validation") {
  OptimizerConfig c;
  c.validate();
  c.armijo_c = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.backtrack_factor = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.initial_step = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("minimize with zero iterations returns the projected init") {
  auto data = small_synthetic(1);
  Transform init(init_random(6, 2, 5).matrix() * 3.0);
  OptimizerConfig c;
  c.max_iters = 0;
  auto res = minimize(data.source, data.target, 1.0, 2, init, c);
  CHECK(res.transform == project_trace_ball(init, 2));
  CHECK(res.trace.termination == Termination::MaxIters);
  CHECK(res.trace.records.size() == 1);
}

TEST_CASE("minimize contract on synthetic clusters") {
  OptimizerConfig c;
  c.max_iters = 60;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto data = small_synthetic(seed);
    Transform init = init_target_pca(data.target, 2);
    auto res = minimize(data.source, data.target, 1.0, 2, init, c);
    const auto& recs = res.trace.records;
    for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].total <= recs[i - 1].total);
    CHECK(res.transform.trace_norm() <= 2.0 + 1e-9);
    const auto init_value = total_objective(project_trace_ball(init, 2), data.source, data.target, 1.0);
    const auto final_value = total_objective(res.transform, data.source, data.target, 1.0);
    CHECK(final_value.total <= init_value.total + 1e-12);
    CHECK(final_value.i_t > init_value.i_t);
    CHECK(std::abs(final_value.total - recs.back().total) < 1e-12);
  }
}

TEST_CASE("minimize is deterministic") {
  auto data = small_synthetic(4);
  OptimizerConfig c;
  c.max_iters = 25;
  c.record_source_error = true;
  Transform init = init_random(6, 3, 8);
  auto a = minimize(data.source, data.target, 4.0, 3, init, c);
  auto b = minimize(data.source, data.target, 4.0, 3, init, c);
  CHECK(a.transform == b.transform);
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
    CHECK(a.trace.records[i].total == b.trace.records[i].total);
    CHECK(a.trace.records[i].step == b.trace.records[i].step);
    REQUIRE(a.trace.records[i].eps_s.has_value());
    CHECK(*a.trace.records[i].eps_s == *b.trace.records[i].eps_s);
  }
}

TEST_CASE("lambda = 0 follows the pure target-information objective") {
  auto data = small_synthetic(6);
  OptimizerConfig c;
  c.max_iters = 30;
  Transform init = init_target_pca(data.target, 2);
  auto full = minimize(data.source, data.target, 0.0, 2, init, c);
  DescentObjective pure = [&](const Transform& l) {
    auto t = target_mi_with_gradient(l, data.source, data.target);
    return DescentPoint{-t.value, t.value, 0.0, -t.gradient};
  };
  auto ref = minimize_objective(pure, 2, init, c);
  REQUIRE(full.trace.records.size() == ref.trace.records.size());
  for (std::size_t i = 0; i < ref.trace.records.size(); ++i)
    CHECK(std::abs(full.trace.records[i].total - ref.trace.records[i].total) <= 1e-10);
  CHECK((full.transform.matrix() - ref.transform.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("gradient tolerance and step underflow terminate cleanly") {
  OptimizerConfig c;
  // A constant objective is stationary everywhere.
  DescentObjective flat = [](const Transform& l) { return DescentPoint{1.0, 0.0, 0.0, Eigen::MatrixXd::Zero(l.out_dim(), l.in_dim())}; };
  auto res = minimize_objective(flat, 2, init_random(4, 2, 1), c);
  CHECK(res.trace.termination == Termination::GradTol);

  // A gradient that lies about the descent direction is never accepted.
  DescentObjective liar = [](const Transform& l) {
    return DescentPoint{l.matrix().sum(), 0.0, 0.0, -Eigen::MatrixXd::Ones(l.out_dim(), l.in_dim())};
  };
  auto under = minimize_objective(liar, 2, Transform(Eigen::MatrixXd::Zero(2, 4)), c);
  CHECK(under.trace.termination == Termination::StepUnderflow);
  CHECK(under.trace.records.size() == 1);
}

TEST_CASE("non-finite objective raises a numerical failure with the trace") {
  OptimizerConfig c;
  int calls = 0;
  DescentObjective blowup = [&](const Transform& l) {
    ++calls;
    const double v = calls > 3 ? std::numeric_limits<double>::quiet_NaN() : -static_cast<double>(calls);
    return DescentPoint{v, 0.0, 0.0, -Eigen::MatrixXd::Constant(l.out_dim(), l.in_dim(), 0.01)};
  };
  try {
    minimize_objective(blowup, 2, Transform(init_random(4, 2, 3).matrix() * 0.1), c);
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(std::string(e.what()).find("numerical failure") != std::string::npos);
    CHECK(e.trace().records.size() == 3);
  }
}

TEST_CASE("restarts keep the lowest final objective") {
  auto data = small_synthetic(2);
  OptimizerConfig c;
  c.max_iters = 15;
  auto best = minimize_with_restarts(data.source, data.target, 1.0, 2, 3, c);
  for (int r = 0; r < 3; ++r) {
    const auto seed = derive_seed(c.seed, 2, static_cast<std::uint64_t>(r));
    Transform init = r == 0 ? init_target_pca(data.target, 2, seed) : init_random(6, 2, seed);
    auto single = minimize(data.source, data.target, 1.0, 2, init, c);
    CHECK(best.best.trace.records.back().total <= single.trace.records.back().total);
    if (r == best.best_restart) CHECK(single.transform == best.best.transform);
  }
  CHECK_THROWS_AS(minimize_with_restarts(data.source, data.target, 1.0, 2, 0, c), std::invalid_argument);
}
