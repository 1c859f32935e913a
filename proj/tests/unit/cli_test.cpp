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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "locgc/cli/cli.hpp"
#include "locgc/training/checkpoint.hpp"

namespace locgc::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("locgc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome run_cli(std::vector<std::string> args) const {
    args.insert(args.begin(), "locgc");
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
  }

  // Two nodes, node 1 feeds node 0, `steps` five-minute records each.
  void write_toy(int steps, bool drop_one = false) const {
    std::ofstream f(path("flow.csv"));
    f << "timestamp,node_id,flow\n";
    for (int t = 0; t < steps; ++t) {
      const int minutes = 5 * t;
      char stamp[32];
      std::snprintf(stamp, sizeof stamp, "2024-01-01T%02d:%02d:00", minutes / 60, minutes % 60);
      for (int n = 0; n < 2; ++n) {
        f << stamp << ',' << n << ',';
        if (!(drop_one && t == 10 && n == 1)) f << 50 + 10 * n + 20 * std::sin(0.3 * t + n);
        f << '\n';
      }
    }
    std::ofstream a(path("adj.csv"));
    a << "src,dst\n1,0\n";
  }

  Outcome prepare(const std::vector<std::string>& extra = {}) const {
    std::vector<std::string> args = {"--out-dir", dir_.string(), "prepare", "--flow", path("flow.csv"),
                                     "--adjacency", path("adj.csv")};
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
  }

  // Small enough to train in milliseconds.
  std::vector<std::string> tiny() const {
    return {"--gcn-units", "3", "--lstm-units", "3", "--lstm-layers", "1", "--batch-size", "8"};
  }

  Outcome train(const std::string& out_dir, std::vector<std::string> extra) const {
    std::vector<std::string> args = {"--out-dir", out_dir, "--seed", "7", "train", "--cache", path("samples.bin")};
    const std::vector<std::string> t = tiny();
    args.insert(args.end(), t.begin(), t.end());
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
  }

  fs::path dir_;
};

TEST_F(CliTest, PrepareReportsSampleCount) {
  write_toy(48);
  const Outcome o = prepare();
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("samples: 25\n"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("imputed: 0\n"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("samples.bin")));
  EXPECT_TRUE(fs::exists(path("scaling.csv")));
  EXPECT_TRUE(fs::exists(path("manifest.json")));

  // Same inputs, same cache bytes.
  const std::string first = slurp(path("samples.bin"));
  ASSERT_EQ(prepare().code, 0);
  EXPECT_EQ(slurp(path("samples.bin")), first);
}

TEST_F(CliTest, PrepareCountsImputedCells) {
  write_toy(48, true);
  const Outcome o = prepare();
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("imputed: 1\n"), std::string::npos) << o.out;
}

TEST_F(CliTest, PrepareRejectsAdjacencyOutsideTheData) {
  write_toy(48);
  std::ofstream(path("adj.csv")) << "src,dst\n1,0\n2,0\n";
  const Outcome o = prepare();
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("adj.csv"), std::string::npos) << o.err;
}

TEST_F(CliTest, MalformedFlowRowNamesTheLine) {
  write_toy(30);
  std::ofstream(path("flow.csv"), std::ios::app) << "2024-01-01T09:00:00,0,abc\n";
  const Outcome o = prepare();
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("line 62"), std::string::npos) << o.err;
}

TEST_F(CliTest, TrainTwiceGivesIdenticalCheckpoints) {
  write_toy(60);
  ASSERT_EQ(prepare().code, 0);
  const Outcome a = train(path("a"), {"--epochs", "1"});
  const Outcome b = train(path("b"), {"--epochs", "1"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  for (const char* name : {"checkpoint.bin", "checkpoint_final.bin", "history.csv"}) {
    const std::string x = slurp(fs::path(path("a")) / name);
    EXPECT_FALSE(x.empty()) << name;
    EXPECT_EQ(x, slurp(fs::path(path("b")) / name)) << name;
  }
  EXPECT_EQ(count_lines(fs::path(path("a")) / "history.csv"), 2);
}

TEST_F(CliTest, ModelAndNormalizationSwitchesReachTheCheckpoint) {
  write_toy(60);
  ASSERT_EQ(prepare().code, 0);
  ASSERT_EQ(train(path("l"), {"--epochs", "1", "--model", "lstm"}).code, 0);
  ASSERT_EQ(train(path("s"), {"--epochs", "1", "--normalization", "static"}).code, 0);
  const Checkpoint l = load_checkpoint(path("l/checkpoint.bin"));
  const Checkpoint s = load_checkpoint(path("s/checkpoint.bin"));
  EXPECT_EQ(l.model.config().kind, ModelKind::kLSTM);
  EXPECT_EQ(s.model.config().kind, ModelKind::kLocGCLSTM);
  EXPECT_EQ(s.model.config().normalization, Normalization::kStatic);
  EXPECT_EQ(s.model.config().gcn_units, 3);
  EXPECT_EQ(s.train.seed, 7u);
}

TEST_F(CliTest, NonFiniteTrainingExitsWithNumericCode) {
  write_toy(60);
  ASSERT_EQ(prepare().code, 0);
  const Outcome o = train(path("x"), {"--epochs", "3", "--lr-max", "1e300", "--lr-min", "1e300"});
  EXPECT_EQ(o.code, 3);
  EXPECT_NE(o.err.find("epoch"), std::string::npos) << o.err;
}

TEST_F(CliTest, EvaluateWritesReportsAndChecksShapes) {
  write_toy(60);
  ASSERT_EQ(prepare().code, 0);
  ASSERT_EQ(train(path("m"), {"--epochs", "1"}).code, 0);
  const Outcome o = run_cli({"--out-dir", path("e"), "--seed", "7", "evaluate", "--cache", path("samples.bin"),
                             "--checkpoint", path("m/checkpoint.bin"), "--per-road", "--pairs", "--svg"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("checkpoint: best"), std::string::npos);
  EXPECT_EQ(count_lines(path("e/per_road.csv")), 1 + 2);
  EXPECT_EQ(count_lines(path("e/metrics.csv")), 2);
  EXPECT_TRUE(fs::exists(path("e/pairs.csv")));
  EXPECT_NE(slurp(path("e/chart.svg")).find("<svg"), std::string::npos);

  const Outcome p = run_cli({"--out-dir", path("p"), "evaluate", "--cache", path("samples.bin"), "--model", "persistence"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_NE(slurp(path("p/metrics.csv")).find("persistence,"), std::string::npos);

  EXPECT_EQ(run_cli({"--out-dir", path("q"), "evaluate", "--cache", path("samples.bin")}).code, 4);

  // A cache with other lags no longer fits the checkpoint.
  write_toy(60);
  ASSERT_EQ(prepare({"--lags", "6"}).code, 0);
  const Outcome bad = run_cli({"--out-dir", path("b"), "evaluate", "--cache", path("samples.bin"), "--checkpoint",
                               path("m/checkpoint.bin")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("lags"), std::string::npos) << bad.err;
}

TEST_F(CliTest, PredictWritesOneRowPerSampleAndNode) {
  write_toy(60);
  ASSERT_EQ(prepare().code, 0);
  ASSERT_EQ(train(path("m"), {"--epochs", "1"}).code, 0);
  const Outcome o = run_cli({"--out-dir", path("o"), "--seed", "7", "predict", "--cache", path("samples.bin"),
                             "--checkpoint", path("m/checkpoint.bin")});
  ASSERT_EQ(o.code, 0) << o.err;
  // 37 samples in 5 folds: the test fold holds 8.
  EXPECT_EQ(count_lines(path("o/predictions.csv")), 1 + 8 * 2);
}

TEST_F(CliTest, GridSearchTableShape) {
  write_toy(60);
  ASSERT_EQ(prepare().code, 0);
  std::vector<std::string> base = {"--seed", "7", "grid-search", "--cache", path("samples.bin"), "--epochs", "1",
                                   "--gcn-units", "3"};
  std::vector<std::string> one = base;
  one.insert(one.begin(), {"--out-dir", path("g1")});
  one.insert(one.end(), {"--batch-sizes", "8", "--units", "3", "--layers", "3"});
  const Outcome a = run_cli(one);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(count_lines(path("g1/grid.csv")), 2);
  std::ifstream header_in(path("g1/grid.csv"));
  std::string header;
  std::getline(header_in, header);
  EXPECT_EQ(header.substr(0, header.find(",best_epoch")), "batch_size,units,layers,MSE,RMSE,MAE,MAPE,MdAE,MdAPE");
  EXPECT_NE(slurp(path("g1/best_config.txt")).find("lstm_layers = 1"), std::string::npos);

  std::vector<std::string> four = base;
  four.insert(four.begin(), {"--out-dir", path("g4")});
  four.insert(four.end(), {"--batch-sizes", "4,8", "--units", "2,3", "--layers", "3"});
  ASSERT_EQ(run_cli(four).code, 0);
  EXPECT_EQ(count_lines(path("g4/grid.csv")), 5);
}

TEST_F(CliTest, CompareDeduplicatesAndRejectsUnknownModels) {
  write_toy(60);
  ASSERT_EQ(prepare().code, 0);
  const Outcome one = run_cli({"--out-dir", path("c1"), "compare", "--cache", path("samples.bin"), "--models", "persistence"});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(count_lines(path("c1/comparison.csv")), 2);

  const Outcome dup = run_cli({"--out-dir", path("c2"), "compare", "--cache", path("samples.bin"), "--models",
                               "persistence,lr,persistence"});
  ASSERT_EQ(dup.code, 0) << dup.err;
  EXPECT_NE(dup.err.find("warning"), std::string::npos);
  EXPECT_EQ(count_lines(path("c2/comparison.csv")), 3);

  const Outcome bad = run_cli({"--out-dir", path("c3"), "compare", "--cache", path("samples.bin"), "--models", "xgboost"});
  EXPECT_EQ(bad.code, 4);
}

TEST_F(CliTest, ConfigFileEnvironmentAndUsageErrors) {
  write_toy(60);
  ASSERT_EQ(prepare().code, 0);
  std::ofstream(path("cfg.txt")) << "# tiny run\nepochs = 1\ngcn_units = 3\nlstm_units = 3\nlstm_layers = 1\n";
  const Outcome a = run_cli({"--out-dir", path("a"), "--config", path("cfg.txt"), "train", "--cache", path("samples.bin")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(load_checkpoint(path("a/checkpoint.bin")).model.config().lstm_units, 3);

  // Flags beat the file; the environment supplies the default path.
  ::setenv("LOCGC_CONFIG", path("cfg.txt").c_str(), 1);
  const Outcome b = run_cli({"--out-dir", path("b"), "train", "--cache", path("samples.bin"), "--lstm-units", "2"});
  ::unsetenv("LOCGC_CONFIG");
  ASSERT_EQ(b.code, 0) << b.err;
  const Checkpoint cb = load_checkpoint(path("b/checkpoint.bin"));
  EXPECT_EQ(cb.model.config().lstm_units, 2);
  EXPECT_EQ(cb.model.config().gcn_units, 3);

  std::ofstream(path("typo.txt")) << "epoch = 3\n";
  EXPECT_EQ(run_cli({"--config", path("typo.txt"), "train", "--cache", path("samples.bin")}).code, 2);
  EXPECT_EQ(run_cli({"train"}).code, 4);
  EXPECT_EQ(run_cli({}).code, 4);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({"train", "--cache", path("samples.bin"), "--epochs", "x"}).code, 2);
}

TEST_F(CliTest, ManifestRecordsInputsAndSeed) {
  write_toy(48);
  ASSERT_EQ(prepare().code, 0);
  const std::string m = slurp(path("manifest.json"));
  EXPECT_NE(m.find("\"command\": \"prepare\""), std::string::npos);
  EXPECT_NE(m.find("flow.csv"), std::string::npos);
  EXPECT_NE(m.find("\"fnv1a\""), std::string::npos);
  EXPECT_NE(m.find("\"seed\": 0"), std::string::npos);
  int manifests = 0;
  for (const auto& e : fs::directory_iterator(dir_)) manifests += e.path().filename() == "manifest.json";
  EXPECT_EQ(manifests, 1);
}

TEST_F(CliTest, ConvertWideAndSynth) {
  std::ofstream(path("wide.csv")) << "timestamp,773869,767541\n2012-03-01 00:00:00,64.4,0\n2012-03-01 00:05:00,62.8,67.1\n";
  const Outcome o = run_cli({"--out-dir", dir_.string(), "convert-wide", "--input", path("wide.csv"), "--zero-missing"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(slurp(path("flow.csv")),
            "timestamp,node_id,flow\n2012-03-01T00:00:00,0,64.4\n2012-03-01T00:00:00,1,\n"
            "2012-03-01T00:05:00,0,62.8\n2012-03-01T00:05:00,1,67.1\n");
  EXPECT_EQ(slurp(path("sensors.csv")), "node_id,sensor\n0,773869\n1,767541\n");

  const Outcome s = run_cli({"--out-dir", path("s"), "--seed", "3", "synth", "--days", "2"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(slurp(path("s/adjacency.csv")), "src,dst\n1,2\n2,0\n3,0\n");
  EXPECT_EQ(count_lines(path("s/flow.csv")), 1 + 2 * 288 * 4);
}

TEST(ExitCodeTest, Taxonomy) {
  EXPECT_EQ(exit_code(ValidationError("x")), 2);
  EXPECT_EQ(exit_code(ShapeError("x")), 2);
  EXPECT_EQ(exit_code(ContractError("x")), 2);
  EXPECT_EQ(exit_code(NumericError("x")), 3);
  EXPECT_EQ(exit_code(UsageError("x")), 4);
}

TEST(SplitTest, ValidationFoldFollowsTheTestFold) {
  SampleSet s(1, 1, 1, 1, {"flow"});
  for (int i = 0; i < 10; ++i) s.append(MatrixXd::Constant(1, 1, i), MatrixXd::Zero(1, 1), 300 * i);
  DataConfig d;
  const Split sp = make_split(s, d, 5, 4);
  const FoldSplit f = kfold_split(10, 5, 5);
  EXPECT_EQ(sp.test, f.test(4));
  EXPECT_EQ(sp.validation, f.test(0));
  EXPECT_EQ(sp.train.size(), 6u);
  for (Index i : sp.train) {
    EXPECT_EQ(std::count(sp.test.begin(), sp.test.end(), i), 0);
    EXPECT_EQ(std::count(sp.validation.begin(), sp.validation.end(), i), 0);
  }
  d.folds = 2;
  EXPECT_TRUE(make_split(s, d, 5, 0).validation.empty());
}

}  // namespace
}  // namespace locgc::cli
