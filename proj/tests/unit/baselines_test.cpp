// Copyright 2026 The locgc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>

#include "locgc/baselines/baselines.hpp"
#include "locgc/metrics/predictions.hpp"
#include "test_support.hpp"

namespace locgc {
namespace {

using testing::random_matrix;

TEST(LinearFitTest, RecoversNoiselessPlane) {
  Rng rng(1);
  const MatrixXd x = random_matrix(200, 2, rng, -5, 5);
  const MatrixXd y = (2 * x.col(0) - x.col(1)).array() + 3;
  const LinearModel m = fit_linear(x, y);
  EXPECT_NEAR(m.coef(0, 0), 2, 1e-8);
  EXPECT_NEAR(m.coef(1, 0), -1, 1e-8);
  EXPECT_NEAR(m.intercept(0), 3, 1e-8);
}

TEST(LinearFitTest, DegenerateTargets) {
  Rng rng(2);
  const MatrixXd x = random_matrix(50, 3, rng);
  const LinearModel constant = fit_linear(x, MatrixXd::Constant(50, 1, 7.0));
  EXPECT_LE(constant.coef.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(constant.intercept(0), 7, 1e-6);

  const LinearModel identity = fit_linear(x.col(1), x.col(1));
  EXPECT_NEAR(identity.coef(0, 0), 1, 1e-8);
  EXPECT_NEAR(identity.intercept(0), 0, 1e-8);
}

TEST(LinearFitTest, ResidualIsOrthogonalToRegressors) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd x = random_matrix(80, 6, rng);
    const MatrixXd y = random_matrix(80, 3, rng);
    const LinearModel m = fit_linear(x, y);
    const MatrixXd residual = y - m.predict(x);
    EXPECT_LE((x.transpose() * residual).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(residual.colwise().sum().cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(LinearFitTest, ConstantRegressorColumnIsHandledByRidge) {
  Rng rng(4);
  MatrixXd x = random_matrix(30, 3, rng);
  x.col(2).setConstant(5);
  const MatrixXd y = x.col(0) * 4;
  const LinearModel m = fit_linear(x, y);
  EXPECT_TRUE(m.coef.allFinite());
  EXPECT_NEAR(m.coef(0, 0), 4, 1e-6);
}

TEST(LinearFitTest, Errors) {
  EXPECT_THROW(fit_linear(MatrixXd::Ones(3, 2), MatrixXd::Ones(2, 1)), ShapeError);
  EXPECT_THROW(fit_linear(MatrixXd::Ones(1, 2), MatrixXd::Ones(1, 1)), ContractError);
  MatrixXd bad = MatrixXd::Ones(3, 1);
  bad(1, 0) = std::nan("");
  EXPECT_THROW(fit_linear(bad, MatrixXd::Ones(3, 1)), NumericError);
}

TEST(PersistenceTest, RepeatsLastFlow) {
  MatrixXd input(2, 3 * 2);  // 3 lags, features (flow, other)
  input << 1, 9, 2, 9, 10, 9,  //
      4, 0, 5, 0, 6, 0;
  const MatrixXd p = persistence_predict(input, 3, 2, 12);
  EXPECT_TRUE((p.row(0).array() == 10).all());
  EXPECT_TRUE((p.row(1).array() == 6).all());
  EXPECT_THROW(persistence_predict(input, 4, 2, 12), ShapeError);
}

SampleSet ramp_samples(double slope, Index count) {
  SampleSet s(1, 12, 1, 12, {"flow"});
  for (Index k = 0; k < count; ++k) {
    MatrixXd in(1, 12), out(1, 12);
    for (Index t = 0; t < 24; ++t) (t < 12 ? in(0, t) : out(0, t - 12)) = 100 + slope * static_cast<double>(k + t);
    s.append(in, out, k * 300);
  }
  return s;
}

TEST(PersistenceTest, ErrorOnRamp) {
  const SampleSet s = ramp_samples(0.5, 5);
  std::vector<Index> all = {0, 1, 2, 3, 4};
  const auto pred = predict_samples(
      s, all, [](const Eigen::Ref<const MatrixXd>& in) { return persistence_predict(in, 12, 1, 12); });
  EXPECT_NEAR(evaluate(pred).mae, 6.5 * 0.5, 1e-12);

  const SampleSet flat = ramp_samples(0, 5);
  const auto zero = predict_samples(
      flat, all, [](const Eigen::Ref<const MatrixXd>& in) { return persistence_predict(in, 12, 1, 12); });
  EXPECT_EQ(evaluate(zero).rmse, 0);
}

TEST(LinearBaselineTest, RampIsLinearAndFitOnlyReadsTrainingRows) {
  const SampleSet s = ramp_samples(0.5, 40);
  std::vector<Index> train, test;
  for (Index k = 0; k < 40; ++k) (k % 4 == 0 ? test : train).push_back(k);
  std::vector<Index> log;
  s.set_access_log(&log);
  for (LinearMode mode : {LinearMode::kPerNode, LinearMode::kGlobal}) {
    log.clear();
    const LinearBaseline b = fit_linear_baseline(s, train, mode);
    for (Index k : log) EXPECT_TRUE(std::binary_search(train.begin(), train.end(), k)) << "read sample " << k;
    const auto pred = predict_samples(s, test, [&](const Eigen::Ref<const MatrixXd>& in) { return b.predict(in); });
    EXPECT_LE(evaluate(pred).mae, 1e-4);
  }
  s.set_access_log(nullptr);
}

TEST(LinearBaselineTest, ModesOnMultiNodeData) {
  Rng rng(8);
  SampleSet s(3, 2, 2, 12, {"flow", "x"});
  for (Index k = 0; k < 60; ++k) s.append(random_matrix(3, 4, rng), random_matrix(3, 12, rng), k);
  std::vector<Index> train(60);
  for (Index k = 0; k < 60; ++k) train[k] = k;
  const LinearBaseline per_node = fit_linear_baseline(s, train);
  const LinearBaseline global = fit_linear_baseline(s, train, LinearMode::kGlobal);
  EXPECT_EQ(per_node.models.size(), 3u);
  EXPECT_EQ(per_node.models[0].coef.rows(), 4);
  EXPECT_EQ(global.models.size(), 1u);
  EXPECT_EQ(global.models[0].coef.rows(), 12);
  EXPECT_EQ(per_node.predict(s.input(0)).rows(), 3);
  EXPECT_EQ(global.predict(s.input(0)).cols(), 12);
  EXPECT_EQ(parse_linear_mode("global"), LinearMode::kGlobal);
  EXPECT_THROW(parse_linear_mode("both"), ValidationError);
}

TEST(PredictionSetTest, PerNodeBreakdown) {
  SampleSet s(2, 1, 1, 12, {"flow"});
  MatrixXd in(2, 1), out(2, 12);
  in << 1, 2;
  out.row(0).setConstant(1);
  out.row(1).setConstant(5);
  s.append(in, out, 0);
  s.append(in, out, 300);
  const auto p = predict_samples(
      s, {0, 1}, [](const Eigen::Ref<const MatrixXd>& x) { return persistence_predict(x, 1, 1, 12); });
  const auto per_node = evaluate_per_node(p);
  ASSERT_EQ(per_node.size(), 2u);
  EXPECT_EQ(per_node[0].mae, 0);
  EXPECT_EQ(per_node[1].mae, 3);
  std::ostringstream svg;
  write_prediction_svg(svg, p, 1);
  EXPECT_NE(svg.str().find("<polyline"), std::string::npos);
}

}  // namespace
}  // namespace locgc
