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
#include <cmath>
#include <sstream>

#include "locgc/metrics/metrics.hpp"
#include "locgc/numerics/random.hpp"
#include "oracle.hpp"

namespace locgc {
namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

TEST(MetricsTest, PerfectPredictionIsZero) {
  const std::vector<double> y = {3, 1, 4, 1, 5};
  const MetricsReport r = evaluate(y, y);
  EXPECT_EQ(r.mse, 0);
  EXPECT_EQ(r.rmse, 0);
  EXPECT_EQ(r.mae, 0);
  EXPECT_EQ(*r.mape, 0);
  EXPECT_EQ(r.mdae, 0);
  EXPECT_EQ(*r.mdape, 0);
}

TEST(MetricsTest, WorkedPair) {
  const std::vector<double> pred = {2, 4}, truth = {1, 2};
  const MetricsReport r = evaluate(pred, truth);
  EXPECT_DOUBLE_EQ(r.mae, 1.5);
  EXPECT_DOUBLE_EQ(r.mse, 2.5);
  EXPECT_NEAR(r.rmse, 1.58114, 5e-6);
  EXPECT_DOUBLE_EQ(*r.mape, 100);
  EXPECT_DOUBLE_EQ(r.mdae, 1.5);
  EXPECT_DOUBLE_EQ(*r.mdape, 100);
}

TEST(MetricsTest, MedianResistsSingleOutlier) {
  const std::vector<double> pred = {1, 2, 4}, truth = {1, 2, 2};
  const MetricsReport r = evaluate(pred, truth);
  EXPECT_EQ(r.mdae, 0);
  EXPECT_NEAR(r.mae, 2.0 / 3.0, 1e-15);
}

TEST(MetricsTest, NearZeroTruthIsExcludedFromPercentages) {
  const std::vector<double> pred = {1, 3}, truth = {0, 2};
  const MetricsReport r = evaluate(pred, truth);
  EXPECT_EQ(r.excluded, 1);
  EXPECT_DOUBLE_EQ(*r.mape, 50);
  EXPECT_DOUBLE_EQ(r.mae, 1);

  const std::vector<double> zeros = {0, 0};
  const MetricsReport none = evaluate(pred, zeros);
  EXPECT_FALSE(none.mape.has_value());
  EXPECT_FALSE(none.mdape.has_value());
  EXPECT_EQ(format_metric(none.mape), "NA");
}

TEST(MetricsTest, MatchesDirectOracle) {
  Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(200);
    const auto truth = random_vector(n, rng, -50, 150);
    auto pred = random_vector(n, rng, -50, 150);
    const MetricsReport r = evaluate(pred, truth);
    const oracle::Metrics o = oracle::direct_metrics(pred, truth);
    EXPECT_NEAR(r.rmse, o.rmse, 1e-10);
    EXPECT_NEAR(r.mae, o.mae, 1e-10);
    EXPECT_NEAR(r.mdae, o.mdae, 1e-10);
    ASSERT_EQ(r.mape.has_value(), o.mape.has_value());
    if (o.mape) {
      EXPECT_NEAR(*r.mape, *o.mape, 1e-10 * std::max(1.0, *o.mape));
      EXPECT_NEAR(*r.mdape, *o.mdape, 1e-10 * std::max(1.0, *o.mdape));
    }
    EXPECT_GE(r.rmse, r.mae);
  }
}

TEST(MetricsTest, PermutationAndScaleLaws) {
  Rng rng(9);
  auto truth = random_vector(64, rng, 1, 100);
  auto pred = random_vector(64, rng, 1, 100);
  const MetricsReport base = evaluate(pred, truth);

  std::vector<std::size_t> order(64);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<double> pp, tp;
  for (auto i : order) {
    pp.push_back(pred[i]);
    tp.push_back(truth[i]);
  }
  const MetricsReport shuffled = evaluate(pp, tp);
  EXPECT_NEAR(shuffled.rmse, base.rmse, 1e-12);
  EXPECT_NEAR(shuffled.mae, base.mae, 1e-12);
  EXPECT_EQ(shuffled.mdae, base.mdae);

  for (auto& v : pred) v *= 3;
  for (auto& v : truth) v *= 3;
  const MetricsReport scaled = evaluate(pred, truth);
  EXPECT_NEAR(scaled.rmse, 3 * base.rmse, 1e-10);
  EXPECT_NEAR(scaled.mae, 3 * base.mae, 1e-10);
  EXPECT_NEAR(*scaled.mape, *base.mape, 1e-10);
  EXPECT_NEAR(*scaled.mdape, *base.mdape, 1e-10);
}

TEST(MetricsTest, RejectsBadInput) {
  const std::vector<double> a = {1, 2}, b = {1};
  EXPECT_THROW(evaluate(a, b), ShapeError);
  EXPECT_THROW(evaluate(std::vector<double>{}, std::vector<double>{}), ContractError);
  const std::vector<double> nan = {1, std::nan("")};
  EXPECT_THROW(evaluate(nan, a), NumericError);
}

TEST(MetricsTest, EigenOverloadAndTables) {
  MatrixXd p(1, 2), t(1, 2);
  p << 2, 4;
  t << 1, 2;
  const MetricsReport r = evaluate(p, t);
  EXPECT_DOUBLE_EQ(r.mae, 1.5);

  std::ostringstream csv;
  write_metrics_csv(csv, {{"m", r}});
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "model,MSE,RMSE,MAE,MAPE,MdAE,MdAPE,count,excluded");
  std::ostringstream table;
  write_comparison_table(table, {{"a", r}, {"b", r}});
  EXPECT_NE(table.str().find("MdAPE"), std::string::npos);
}

}  // namespace
}  // namespace locgc
