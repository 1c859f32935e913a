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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "locgc/training/checkpoint.hpp"
#include "locgc/training/grid_search.hpp"
#include "locgc/training/model.hpp"
#include "locgc/training/optim.hpp"
#include "locgc/training/train.hpp"
#include "model_check.hpp"
#include "test_support.hpp"

namespace locgc {
namespace {

namespace fs = std::filesystem;
using testing::random_matrix;

TEST(LossTest, Examples) {
  Tape<double> tape;
  MatrixXd p(1, 2), t(1, 2);
  p << 1, 0;
  t << 0, 1;
  EXPECT_DOUBLE_EQ(mse_loss(tape.constant(p), tape.constant(t)).value()(0, 0), 1.0);
  EXPECT_EQ(mse_loss(tape.constant(p), tape.constant(p)).value()(0, 0), 0.0);
  MatrixXd b = MatrixXd::Zero(1, 3);
  b(0, 1) = 2;
  EXPECT_DOUBLE_EQ(l2_penalty<double>({tape.constant(b)}, 0.01).value()(0, 0), 0.04);
}

TEST(RmsPropTest, HandEvaluatedStep) {
  ParameterSet<double> ps;
  ps.add("w", MatrixXd::Zero(1, 1));
  RMSProp<double> opt(ps, 0.9, 1e-7);
  ps.grad(0)(0, 0) = 1;
  opt.step(ps, 0.01);
  EXPECT_NEAR(opt.accumulator(0)(0, 0), 0.1, 1e-16);
  EXPECT_NEAR(ps.value(0)(0, 0), -0.01 / (std::sqrt(0.1) + 1e-7), 1e-16);
  EXPECT_NEAR(ps.value(0)(0, 0), -0.0316227, 1e-7);
}

TEST(RmsPropTest, ZeroGradientAndSignSymmetry) {
  Rng rng(1);
  ParameterSet<double> ps;
  ps.add("a", random_matrix(3, 2, rng));
  RMSProp<double> opt(ps);
  ps.grad(0) = random_matrix(3, 2, rng);
  opt.step(ps, 0.1);
  const MatrixXd before = ps.value(0);
  const MatrixXd accum = opt.accumulator(0);
  ps.grad(0).setZero();
  opt.step(ps, 0.1);
  EXPECT_EQ(ps.value(0), before);
  EXPECT_TRUE(opt.accumulator(0).isApprox(0.9 * accum, 1e-15));

  // lr = 0 leaves parameters untouched.
  ps.grad(0) = random_matrix(3, 2, rng);
  opt.step(ps, 0.0);
  EXPECT_EQ(ps.value(0), before);

  ParameterSet<double> plus, minus;
  plus.add("a", MatrixXd::Zero(2, 2));
  minus.add("a", MatrixXd::Zero(2, 2));
  RMSProp<double> op(plus), om(minus);
  const MatrixXd g = random_matrix(2, 2, rng);
  plus.grad(0) = g;
  minus.grad(0) = -g;
  op.step(plus, 0.05);
  om.step(minus, 0.05);
  EXPECT_EQ(plus.value(0), (-minus.value(0)).eval());

  ps.grad(0)(0, 0) = std::nan("");
  EXPECT_THROW(opt.step(ps, 0.1), NumericError);
}

TEST(CalraTest, EndpointsAndRestarts) {
  const double hi = 2.4e-5, lo = 1.5e-5;
  EXPECT_EQ(calra_lr(0, 600, 4, hi, lo), hi);
  EXPECT_EQ(calra_lr(150, 600, 4, hi, lo), hi);
  EXPECT_NEAR(calra_lr(75, 600, 4, hi, lo), 1.95e-5, 1e-20);
  EXPECT_EQ(cosine_annealing(150, 150, hi, lo), lo);
  int maxima = 0;
  for (int e = 0; e < 600; ++e) {
    const double lr = calra_lr(e, 600, 4, hi, lo);
    EXPECT_GE(lr, lo);
    EXPECT_LE(lr, hi);
    if (lr == hi) ++maxima;
    if (e % 150 != 0) EXPECT_LT(lr, calra_lr(e - 1, 600, 4, hi, lo));
  }
  EXPECT_EQ(maxima, 4);
  EXPECT_THROW(calra_lr(600, 600, 4, hi, lo), ContractError);
}

ModelConfig tiny_config(ModelKind kind = ModelKind::kLocGCLSTM) {
  ModelConfig c;
  c.kind = kind;
  c.nodes = 3;
  c.features = 2;
  c.lags = 4;
  c.horizon = 12;
  c.gcn_units = 4;
  c.lstm_units = 4;
  c.lstm_layers = 2;
  return c;
}

RoadGraph tiny_graph() { return RoadGraph::from_edges(3, {{1, 0}, {2, 0}, {2, 1}}); }

SampleSet random_samples(const ModelConfig& c, Index count, Rng& rng) {
  std::vector<std::string> names;
  for (Index f = 0; f < c.features; ++f) names.push_back(f == 0 ? "flow" : "x" + std::to_string(f));
  SampleSet s(c.nodes, c.lags, c.features, c.horizon, names);
  for (Index k = 0; k < count; ++k) {
    s.append(random_matrix(c.nodes, c.lags * c.features, rng, 0, 100), random_matrix(c.nodes, c.horizon, rng, 0, 100),
             k * 300);
  }
  return s;
}

std::vector<Index> all_of(const SampleSet& s) {
  std::vector<Index> v(static_cast<std::size_t>(s.size()));
  for (Index k = 0; k < s.size(); ++k) v[k] = k;
  return v;
}

TEST(ModelTest, ParameterLayout) {
  Rng rng(1);
  const Model m = Model::initialize(tiny_config(), tiny_graph(), rng);
  EXPECT_EQ(m.params().value("gcn/W").rows(), 2);
  EXPECT_EQ(m.params().value("gcn/W").cols(), 4);
  EXPECT_EQ(m.params().value("gcn/mask").rows(), 3);
  EXPECT_EQ(m.params().value("lstm1/V_o").rows(), 4);
  EXPECT_EQ(m.params().value("dense/W").cols(), 12);
  EXPECT_EQ(m.lstm_bias_indices().size(), 8u);
  const MatrixXd& mask = m.params().value("gcn/mask");
  EXPECT_GE(mask.minCoeff(), 0.5);
  EXPECT_LE(mask.maxCoeff(), 1.5);
  const double bound = 1 / std::sqrt(2.0);
  EXPECT_LE(m.params().value("gcn/W").cwiseAbs().maxCoeff(), bound);

  const Model ablation = Model::initialize(tiny_config(ModelKind::kLSTM), tiny_graph(), rng);
  EXPECT_FALSE(ablation.params().contains("gcn/W"));
  EXPECT_EQ(ablation.params().value("lstm0/W_f").rows(), 2);
}

TEST(ModelTest, RecordedForwardMatchesPlainForward) {
  Rng rng(2);
  for (ModelKind kind : {ModelKind::kLocGCLSTM, ModelKind::kLSTM}) {
    for (Normalization norm : {Normalization::kDynamic, Normalization::kStatic}) {
      ModelConfig c = tiny_config(kind);
      c.normalization = norm;
      const Model m = Model::initialize(c, tiny_graph(), rng);
      std::vector<MatrixXd> steps;
      for (int t = 0; t < 4; ++t) steps.push_back(random_matrix(3 * 5, 2, rng));
      Tape<double> tape;
      const MatrixXd recorded = m.forward(tape, m.params().bind(tape), steps).value();
      const MatrixXd plain = m.forward(steps);
      EXPECT_LE((recorded - plain).cwiseAbs().maxCoeff(), 1e-14);
      EXPECT_EQ(plain.rows(), 15);
    }
  }
}

TEST(ModelTest, ZeroParametersPredictTheTrainingMean) {
  Rng rng(3);
  const ModelConfig c = tiny_config();
  const SampleSet s = random_samples(c, 10, rng);
  Model m(c, tiny_graph());
  m.fit_scaling(s, all_of(s));
  const MatrixXd p = m.predict(s.input(0));
  EXPECT_TRUE((p.array() - m.target_scaling.mean(0)).abs().maxCoeff() < 1e-12);
  double mean = 0;
  for (Index k = 0; k < s.size(); ++k) mean += s.target(k).mean();
  EXPECT_NEAR(m.target_scaling.mean(0), mean / 10, 1e-10);
}

TEST(ModelTest, SingleNodeGcnIsALinearMapOfOwnFeatures) {
  Rng rng(4);
  ModelConfig c = tiny_config();
  c.nodes = 1;
  const Model m = Model::initialize(c, RoadGraph::isolated(1), rng);
  EXPECT_DOUBLE_EQ(m.support()(0, 0), 1.0);
  ModelConfig ablation = c;
  ablation.kind = ModelKind::kLSTM;
  ablation.features = c.gcn_units;
  Model direct(ablation, RoadGraph::isolated(1));
  for (std::size_t i = 0; i < direct.params().size(); ++i) {
    direct.params().value(i) = m.params().value(direct.params().name(i));
  }
  std::vector<MatrixXd> steps, mapped;
  for (int t = 0; t < 4; ++t) {
    steps.push_back(random_matrix(1, 2, rng));
    mapped.push_back(steps.back() * m.params().value("gcn/W"));
  }
  EXPECT_LE((m.forward(steps) - direct.forward(mapped)).cwiseAbs().maxCoeff(), 1e-15);
}

double logistic(double z) { return 1 / (1 + std::exp(-z)); }

TEST(ModelTest, TwoNodeHandOracle) {
  // Node 1 feeds node 0. Unit mask, GCN weight 1, one LSTM unit with all
  // weights 1 and zero bias, dense head of ones.
  ModelConfig c;
  c.nodes = 2;
  c.features = 1;
  c.lags = 1;
  c.gcn_units = 1;
  c.lstm_units = 1;
  c.lstm_layers = 1;
  Model m(c, RoadGraph::from_edges(2, {{1, 0}}));
  for (std::size_t i = 0; i < m.params().size(); ++i) {
    const std::string& name = m.params().name(i);
    if (name.find("/b") == std::string::npos) m.params().value(i).setOnes();
  }
  MatrixXd x(2, 1);
  x << 0.8, -0.4;
  const MatrixXd y = m.forward({x});
  const double g[2] = {0.5 * 0.8 + 0.5 * -0.4, -0.4};
  for (int n = 0; n < 2; ++n) {
    const double gate = logistic(g[n]);
    const double cell = gate * std::tanh(g[n]);
    const double h = gate * std::tanh(cell);
    for (Index k = 0; k < 12; ++k) EXPECT_NEAR(y(n, k), h, 1e-15);
  }
}

TEST(ModelTest, EndToEndGradientMatchesFiniteDifferences) {
  Rng rng(5);
  for (Normalization norm : {Normalization::kDynamic, Normalization::kStatic}) {
    ModelConfig c = tiny_config();
    c.normalization = norm;
    Model m = Model::initialize(c, tiny_graph(), rng);
    for (std::size_t i : m.lstm_bias_indices()) m.params().value(i) = random_matrix(1, 4, rng, -0.5, 0.5);
    const SampleSet s = random_samples(c, 3, rng);
    m.fit_scaling(s, all_of(s));
    const Batch b = m.make_batch(s, all_of(s));
    const auto r = testing::check_model_gradient(m, b, 0.01);
    EXPECT_LT(r.worst, 1e-4) << r.worst_param;
    EXPECT_EQ(r.checked, m.params().scalar_count());
  }
}

TEST(ModelTest, BatchLayoutAndShapeErrors) {
  Rng rng(6);
  const ModelConfig c = tiny_config();
  const SampleSet s = random_samples(c, 4, rng);
  Model m = Model::initialize(c, tiny_graph(), rng);
  EXPECT_THROW(m.make_batch(s, {0}), ContractError);
  m.fit_scaling(s, all_of(s));
  const Batch b = m.make_batch(s, {2, 0});
  ASSERT_EQ(b.steps.size(), 4u);
  const double expected = (s.input(0)(1, 2 * 2 + 1) - m.input_scaling.mean(1)) / m.input_scaling.stddev(1);
  EXPECT_DOUBLE_EQ(b.steps[2](3 + 1, 1), expected);
  EXPECT_EQ(b.targets.rows(), 6);
  std::vector<MatrixXd> wrong(4, MatrixXd::Zero(4, 2));
  EXPECT_THROW(m.forward(wrong), ShapeError);
  EXPECT_THROW(m.predict(MatrixXd::Zero(3, 7)), ShapeError);
  EXPECT_THROW(Model(c, RoadGraph::isolated(2)), ValidationError);
}

TrainConfig quick_train(int epochs, double lr) {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = 4;
  t.lr_max = lr;
  t.lr_min = lr;
  t.calra_cycles = 1;
  t.seed = 11;
  return t;
}

TEST(TrainTest, MemorizesTwoSamples) {
  Rng rng(7);
  // Six (sample, node) rows of random targets need more than four hidden
  // units to be representable exactly.
  ModelConfig c = tiny_config();
  c.lstm_units = 16;
  const SampleSet s = random_samples(c, 2, rng);
  TrainConfig t = quick_train(2000, 3e-3);
  t.bias_l2 = 0;
  const TrainResult r = train(Model::initialize(c, tiny_graph(), rng), s, {0, 1}, {}, t);
  EXPECT_LT(r.history.back().train_loss, 1e-3);
}

TEST(TrainTest, SameSeedSameParameters) {
  const ModelConfig c = tiny_config();
  Rng data_rng(8);
  const SampleSet s = random_samples(c, 9, data_rng);
  auto run = [&] {
    Rng rng(21);
    return train(Model::initialize(c, tiny_graph(), rng), s, {0, 1, 2, 3, 4, 5}, {6, 7, 8}, quick_train(5, 1e-3));
  };
  const TrainResult a = run(), b = run();
  EXPECT_TRUE(a.final_model == b.final_model);
  EXPECT_TRUE(a.best_model == b.best_model);
  EXPECT_EQ(a.best_epoch, b.best_epoch);
  ASSERT_EQ(a.history.size(), 5u);
  EXPECT_TRUE(a.history[0].val_rmse.has_value());
}

TEST(TrainTest, LossMostlyDecreasesOverTheFirstCycle) {
  Rng rng(9);
  const ModelConfig c = tiny_config();
  const SampleSet s = random_samples(c, 16, rng);
  TrainConfig t = quick_train(40, 2e-3);
  t.lr_min = 2e-4;
  t.calra_cycles = 1;
  const TrainResult r = train(Model::initialize(c, tiny_graph(), rng), s, all_of(s), {}, t);
  int decreasing = 0;
  for (std::size_t e = 1; e < r.history.size(); ++e) decreasing += r.history[e].train_loss <= r.history[e - 1].train_loss;
  EXPECT_GE(decreasing, static_cast<int>(0.8 * (r.history.size() - 1)));
}

TEST(TrainTest, FitReadsOnlyTrainingSamples) {
  Rng rng(10);
  const ModelConfig c = tiny_config();
  const SampleSet s = random_samples(c, 12, rng);
  const std::vector<Index> train_idx = {0, 2, 4, 6, 8, 10};
  std::vector<Index> log;
  s.set_access_log(&log);
  train(Model::initialize(c, tiny_graph(), rng), s, train_idx, {}, quick_train(2, 1e-3));
  s.set_access_log(nullptr);
  EXPECT_FALSE(log.empty());
  for (Index k : log) EXPECT_EQ(k % 2, 0) << "read sample " << k;
}

TEST(TrainTest, NonFiniteLossNamesTheBatch) {
  Rng rng(12);
  const ModelConfig c = tiny_config();
  const SampleSet s = random_samples(c, 4, rng);
  Model m = Model::initialize(c, tiny_graph(), rng);
  m.params().value("dense/b")(0, 0) = std::numeric_limits<double>::infinity();
  try {
    train(m, s, all_of(s), {}, quick_train(1, 1e-3));
    FAIL() << "expected a numeric error";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("batch 0"), std::string::npos) << e.what();
  }
}

TEST(GridSearchTest, LatticeAndLayerMapping) {
  const GridSpec full;
  EXPECT_EQ(full.cells().size(), 32u);
  EXPECT_EQ(full.cells().front(), (GridCell{16, 32, 3}));
  EXPECT_EQ(full.cells()[1], (GridCell{16, 32, 4}));

  ModelConfig m;
  TrainConfig t;
  apply_grid_cell({32, 64, 4}, m, t);
  EXPECT_EQ(t.batch_size, 32);
  EXPECT_EQ(m.lstm_units, 64);
  EXPECT_EQ(m.lstm_layers, 2);
  apply_grid_cell({32, 64, 3}, m, t);
  EXPECT_EQ(m.lstm_layers, 1);
  EXPECT_THROW(apply_grid_cell({32, 64, 2}, m, t), ValidationError);

  const GridSpec parsed = parse_grid_spec({{"grid.units", "8, 16"}, {"grid.layers", "3"}});
  EXPECT_EQ(parsed.units, (std::vector<Index>{8, 16}));
  EXPECT_EQ(parsed.layers, (std::vector<int>{3}));
  EXPECT_EQ(parsed.batch_sizes, full.batch_sizes);
  EXPECT_THROW(parse_grid_spec({{"grid.units", ""}}), ValidationError);
  EXPECT_THROW(parse_grid_spec({{"grid.batch_size", "0"}}), ValidationError);
}

TEST(GridSearchTest, RankingPrefersMseThenMaeThenRmse) {
  MetricsReport a, b;
  a.mse = 1;
  a.mae = 2;
  a.rmse = 3;
  b = a;
  b.mse = 2;
  b.mae = 1;
  EXPECT_TRUE(better_report(a, b));
  b.mse = 1;
  EXPECT_TRUE(better_report(b, a));
  b.mae = 2;
  b.rmse = 2;
  EXPECT_TRUE(better_report(b, a));
  EXPECT_FALSE(better_report(a, a));
}

TEST(GridSearchTest, OneRowPerCellAndBestMarked) {
  Rng rng(13);
  const ModelConfig c = tiny_config();
  const SampleSet s = random_samples(c, 10, rng);
  GridSpec spec;
  spec.batch_sizes = {2, 4};
  spec.units = {3, 5};
  spec.layers = {3};
  int seen = 0;
  const GridSearchResult r = grid_search(spec, c, quick_train(2, 1e-3), tiny_graph(), s, {0, 1, 2, 3, 4, 5, 6},
                                         {7, 8, 9}, [&](const GridRow&) { ++seen; });
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(seen, 4);
  ASSERT_TRUE(r.best.has_value());
  for (const GridRow& row : r.rows) {
    ASSERT_FALSE(row.failed()) << row.error;
    EXPECT_FALSE(better_report(*row.report, *r.rows[*r.best].report));
  }
  EXPECT_EQ(r.rows[2].cell, (GridCell{4, 3, 3}));

  std::ostringstream csv;
  write_grid_csv(csv, r);
  std::string header;
  std::istringstream lines(csv.str());
  std::getline(lines, header);
  EXPECT_EQ(header, "batch_size,units,layers,MSE,RMSE,MAE,MAPE,MdAE,MdAPE,best_epoch,status,best");
  int rows = 0, marked = 0;
  for (std::string line; std::getline(lines, line); ++rows) marked += line.back() == '*';
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(marked, 1);

  spec.batch_sizes = {4};
  spec.units = {3};
  const GridSearchResult one = grid_search(spec, c, quick_train(1, 1e-3), tiny_graph(), s, {0, 1, 2}, {3});
  ASSERT_EQ(one.rows.size(), 1u);
  EXPECT_EQ(one.best, std::optional<std::size_t>(0));
}

TEST(GridSearchTest, FailedCellsAreFlaggedAndTheSearchContinues) {
  Rng rng(14);
  const ModelConfig c = tiny_config();
  const SampleSet s = random_samples(c, 6, rng);
  GridSpec spec;
  spec.batch_sizes = {2, 3};
  spec.units = {3};
  spec.layers = {3};
  // A step this size overflows the parameters within the first epoch.
  TrainConfig t = quick_train(3, 1e300);
  const GridSearchResult r = grid_search(spec, c, t, tiny_graph(), s, {0, 1, 2, 3}, {4, 5});
  ASSERT_EQ(r.rows.size(), 2u);
  for (const GridRow& row : r.rows) {
    EXPECT_TRUE(row.failed());
    EXPECT_FALSE(row.error.empty());
  }
  EXPECT_FALSE(r.best.has_value());
  std::ostringstream csv;
  write_grid_csv(csv, r);
  EXPECT_NE(csv.str().find("failed: "), std::string::npos);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(CheckpointTest, RoundTripIsLosslessAndBitIdentical) {
  Rng rng(13);
  const ModelConfig c = tiny_config();
  const SampleSet s = random_samples(c, 6, rng);
  const TrainResult r =
      train(Model::initialize(c, tiny_graph(), rng), s, {0, 1, 2, 3}, {4, 5}, quick_train(3, 1e-3));
  const Checkpoint ckpt{r.best_model, quick_train(3, 1e-3), r.history, r.best_epoch, "best"};
  const fs::path dir = fs::temp_directory_path() / "locgc_ckpt_test";
  fs::create_directories(dir);
  const std::string a = (dir / "a.ckpt").string(), b = (dir / "b.ckpt").string();
  save_checkpoint(a, ckpt);
  const Checkpoint back = load_checkpoint(a);
  save_checkpoint(b, back);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_TRUE(back.model == ckpt.model);
  EXPECT_EQ(back.train, ckpt.train);
  EXPECT_EQ(back.epoch, r.best_epoch);
  EXPECT_EQ(back.history.size(), 3u);
  EXPECT_EQ(back.history[1].val_rmse, r.history[1].val_rmse);
  EXPECT_EQ(back.model.predict(s.input(5)), ckpt.model.predict(s.input(5)));

  std::string bytes = slurp(a);
  bytes[30] ^= 0x20;  // inside the config text
  std::ofstream(a, std::ios::binary) << bytes;
  EXPECT_THROW(load_checkpoint(a), ValidationError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace locgc
