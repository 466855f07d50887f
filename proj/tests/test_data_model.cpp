#include "itda/data_model.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <limits>

using namespace itda;

TEST_CASE("feature matrix rejects non-finite values and empty dimensionality") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 2, 3, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(FeatureMatrix{x}, std::invalid_argument);
  x(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(FeatureMatrix{x}, std::invalid_argument);
  CHECK_THROWS_AS(FeatureMatrix{Eigen::MatrixXd(3, 0)}, std::invalid_argument);
}

TEST_CASE("source dataset validates labels") {
  FeatureMatrix f(Eigen::MatrixXd::Zero(3, 2));
  CHECK_THROWS_AS(SourceDataset(f, {0, 1}, 2), std::invalid_argument);      // length
  CHECK_THROWS_AS(SourceDataset(f, {0, 1, 2}, 2), std::invalid_argument);   // range
  CHECK_THROWS_AS(SourceDataset(f, {0, -1, 1}, 2), std::invalid_argument);  // negative
  CHECK_THROWS_AS(SourceDataset(f, {0, 0, 2}, 3), std::invalid_argument);   // class 1 empty
  SourceDataset ok(f, {0, 1, 1}, 2);
  CHECK(ok.class_counts() == std::vector<Index>{1, 2});
  CHECK(SourceDataset::with_inferred_classes(f, {2, 0, 1}).num_classes() == 3);
}

TEST_CASE("target dataset and transform invariants") {
  CHECK_THROWS_AS(TargetDataset(FeatureMatrix(Eigen::MatrixXd(0, 3))), std::invalid_argument);
  CHECK_THROWS_AS(Transform(Eigen::MatrixXd::Zero(3, 2)), std::invalid_argument);  // d > D
  CHECK_THROWS_AS(Transform(Eigen::MatrixXd(0, 2)), std::invalid_argument);
  Transform zero(Eigen::MatrixXd::Zero(2, 4));
  CHECK(zero.trace_norm() == 0.0);
  CHECK(Transform::identity(3).trace_norm() == doctest::Approx(3.0));
}

TEST_CASE("fit_standardizer examples") {
  SUBCASE("two-point column") {
    Eigen::MatrixXd x(2, 1);
    x << 1, 3;
    auto s = fit_standardizer(FeatureMatrix(x));
    CHECK(s.mean[0] == 2.0);
    CHECK(s.std[0] == 1.0);
  }
  SUBCASE("constant column is floored") {
    auto s = fit_standardizer(FeatureMatrix(Eigen::MatrixXd::Constant(3, 1, 5.0)));
    CHECK(s.mean[0] == 5.0);
    CHECK(s.std[0] == kStdFloor);
  }
  SUBCASE("fewer than two rows") {
    CHECK_THROWS_WITH_AS(fit_standardizer(FeatureMatrix(Eigen::MatrixXd::Ones(1, 3))),
                         doctest::Contains("insufficient data"), std::invalid_argument);
  }
}

TEST_CASE("apply_standardizer examples") {
  Eigen::MatrixXd x(2, 2);
  x << 2, -1, 7, 4;
  StandardizationStats unit{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
  CHECK(apply_standardizer(unit, FeatureMatrix(x)).values() == x);

  StandardizationStats shift{Eigen::VectorXd::Constant(2, 2.0), Eigen::VectorXd::Ones(2)};
  CHECK(apply_standardizer(shift, FeatureMatrix(x)).values()(0, 0) == 0.0);

  StandardizationStats wrong{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3)};
  CHECK_THROWS_AS(apply_standardizer(wrong, FeatureMatrix(x)), std::invalid_argument);
}

TEST_CASE("standardized columns have zero mean and unit population std") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x = oracle::gaussian(10, 4, 3.0, rng);
    x.col(1).array() += 100.0;
    FeatureMatrix z = apply_standardizer(fit_standardizer(FeatureMatrix(x)), FeatureMatrix(x));
    for (Index k = 0; k < 4; ++k) {
      double mean = 0.0, var = 0.0;
      for (Index i = 0; i < 10; ++i) mean += z.values()(i, k) / 10.0;
      for (Index i = 0; i < 10; ++i) var += (z.values()(i, k) - mean) * (z.values()(i, k) - mean) / 10.0;
      CHECK(std::abs(mean) < 1e-10);
      CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("pooled and per-domain standardization") {
  std::mt19937_64 rng(3);
  SourceDataset s(FeatureMatrix(oracle::gaussian(6, 3, 1.0, rng)), {0, 0, 0, 1, 1, 1}, 2);
  Eigen::MatrixXd xt = oracle::gaussian(5, 3, 2.0, rng);
  xt.array() += 5.0;
  TargetDataset t{FeatureMatrix(xt)};

  auto [ps, pt] = standardize(s, t, StandardizeMode::Pooled);
  Eigen::MatrixXd all(11, 3);
  all << ps.features().values(), pt.features().values();
  CHECK(all.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ps.labels() == s.labels());

  auto [ds, dt] = standardize(s, t, StandardizeMode::PerDomain);
  CHECK(ds.features().values().colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(dt.features().values().colwise().mean().cwiseAbs().maxCoeff() < 1e-12);

  auto [os, ot] = standardize(s, t, StandardizeMode::Off);
  CHECK(os == s);
  CHECK(ot == t);

  TargetDataset narrow{FeatureMatrix(Eigen::MatrixXd::Ones(3, 2))};
  CHECK_THROWS_AS(standardize(s, narrow, StandardizeMode::Pooled), std::invalid_argument);
}
