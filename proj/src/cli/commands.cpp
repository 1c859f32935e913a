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

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <sstream>

#include "locgc/baselines/baselines.hpp"
#include "locgc/cli/cli.hpp"
#include "locgc/data/synthetic.hpp"
#include "locgc/metrics/predictions.hpp"
#include "locgc/training/checkpoint.hpp"

namespace locgc::cli {

namespace {

namespace fs = std::filesystem;

// State shared by every subcommand of one invocation.
struct Context {
  Context(std::ostream& o, std::ostream& e) : out(o), err(e) {}

  std::ostream& out;
  std::ostream& err;
  std::string out_dir = ".";
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  KeyValues flags;  // flag overrides, applied after the config file
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  ResolvedConfig config() const {
    KeyValues kv;
    if (!config_path.empty()) kv = read_key_values(config_path);
    for (const std::string& s : sets) {
      const std::size_t eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
      kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    for (const auto& [k, v] : flags) kv[k] = v;
    if (seed) kv["seed"] = std::to_string(*seed);
    return resolve_config(kv);
  }

  std::string path(const std::string& name) const { return (fs::path(out_dir) / name).string(); }

  std::string output(const std::string& name) {
    outputs.push_back(name);
    return path(name);
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

void write_manifest(const Context& ctx, const std::string& command, const ResolvedConfig& cfg) {
  nlohmann::json m;
  m["tool"] = "locgc";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = cfg.train.seed;
  m["config"] = cfg.to_key_values();
  m["inputs"] = nlohmann::json::array();
  for (const std::string& p : ctx.inputs) m["inputs"].push_back({{"path", p}, {"fnv1a", hex64(fnv1a(slurp(p)))}});
  m["outputs"] = ctx.outputs;
  const auto now = std::chrono::system_clock::now();
  m["created"] = format_timestamp(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
  std::ofstream f(ctx.path("manifest.json"));
  f << m.dump(2) << '\n';
  if (!f) throw ValidationError("cannot write manifest in '" + ctx.out_dir + "'");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  return f;
}

// Adds a flag whose value lands in ctx.flags[key].
CLI::Option* key_flag(CLI::App* app, Context& ctx, const std::string& name, const std::string& key,
                      const std::string& help) {
  return app->add_option_function<std::string>(
      name, [&ctx, key](const std::string& v) { ctx.flags[key] = v; }, help);
}

void split_flags(CLI::App* app, Context& ctx) {
  key_flag(app, ctx, "--folds", "folds", "Number of cross-validation folds");
  key_flag(app, ctx, "--fold", "fold", "Test fold; the next fold validates");
  key_flag(app, ctx, "--test-days", "test_days", "Hold out the last N days instead of a fold");
}

void model_flags(CLI::App* app, Context& ctx) {
  key_flag(app, ctx, "--model", "model", "loc-gclstm or lstm (GCN bypassed)");
  key_flag(app, ctx, "--normalization", "normalization", "dynamic or static support normalization");
  key_flag(app, ctx, "--gcn-units", "gcn_units", "GCN output width");
  key_flag(app, ctx, "--gcn-steps", "gcn_steps", "Propagation steps");
  key_flag(app, ctx, "--lstm-units", "lstm_units", "LSTM hidden units");
  key_flag(app, ctx, "--lstm-layers", "lstm_layers", "Stacked LSTM layers");
}

void train_flags(CLI::App* app, Context& ctx) {
  key_flag(app, ctx, "--epochs", "epochs", "Training epochs");
  key_flag(app, ctx, "--batch-size", "batch_size", "Samples per batch");
  key_flag(app, ctx, "--lr-max", "lr_max", "Learning rate at each cycle start");
  key_flag(app, ctx, "--lr-min", "lr_min", "Learning rate at each cycle end");
  key_flag(app, ctx, "--cycles", "calra_cycles", "Warm-restart cycles");
  key_flag(app, ctx, "--bias-l2", "bias_l2", "L2 weight on the LSTM biases");
}

SampleCache load_cache(Context& ctx, const std::string& path) {
  ctx.inputs.push_back(path);
  SampleCache c = read_sample_cache(path);
  if (c.samples.size() == 0) throw ValidationError(path + ": cache holds no samples");
  return c;
}

ModelConfig model_for(const ResolvedConfig& cfg, const SampleSet& s) {
  ModelConfig m = cfg.model;
  m.nodes = s.nodes();
  m.features = s.features();
  m.lags = s.lags();
  m.horizon = s.horizon();
  m.validate();
  return m;
}

const std::vector<Index>& pick_subset(const Split& split, const std::string& subset) {
  if (subset == "test") return split.test;
  if (subset == "validation") return split.validation;
  if (subset == "train") return split.train;
  throw UsageError("subset must be train, validation or test, got '" + subset + "'");
}

PredictionSet model_predictions(const Model& model, const SampleSet& s, const std::vector<Index>& idx) {
  PredictionSet p;
  p.nodes = s.nodes();
  p.samples = idx;
  p.pred = model.predict_samples(s, idx);
  p.truth.resize(p.pred.rows(), p.pred.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    p.start_times.push_back(s.start_time(idx[k]));
    p.truth.middleRows(static_cast<Index>(k) * p.nodes, p.nodes) = s.target(idx[k]);
  }
  return p;
}

Predictor persistence_predictor(const SampleSet& s) {
  return [lags = s.lags(), f = s.features(), h = s.horizon()](const Eigen::Ref<const MatrixXd>& x) {
    return persistence_predict(x, lags, f, h);
  };
}

void check_compatible(const Model& model, const SampleCache& cache) {
  const ModelConfig& c = model.config();
  const SampleSet& s = cache.samples;
  if (c.nodes != s.nodes() || c.features != s.features() || c.lags != s.lags() || c.horizon != s.horizon()) {
    throw ValidationError("checkpoint expects " + std::to_string(c.nodes) + " nodes, " +
                          std::to_string(c.features) + " features, " + std::to_string(c.lags) + " lags and " +
                          std::to_string(c.horizon) + " horizon steps; the cache has " + std::to_string(s.nodes()) +
                          ", " + std::to_string(s.features()) + ", " + std::to_string(s.lags()) + " and " +
                          std::to_string(s.horizon()));
  }
  if (!(model.graph() == cache.graph)) throw ValidationError("checkpoint and cache disagree on the road graph");
  if (model.feature_names != s.feature_names()) throw ValidationError("checkpoint and cache disagree on feature names");
}

Model fresh_model(const ResolvedConfig& cfg, const SampleCache& cache) {
  Rng rng(cfg.train.seed);
  return Model::initialize(model_for(cfg, cache.samples), cache.graph, rng);
}

MetricsReport mean_report(const std::vector<MetricsReport>& reports) {
  MetricsReport m;
  const double n = static_cast<double>(reports.size());
  bool mape = true, mdape = true;
  double sum_mape = 0, sum_mdape = 0;
  for (const MetricsReport& r : reports) {
    m.mse += r.mse / n;
    m.rmse += r.rmse / n;
    m.mae += r.mae / n;
    m.mdae += r.mdae / n;
    m.count += r.count;
    m.excluded += r.excluded;
    if (r.mape) sum_mape += *r.mape; else mape = false;
    if (r.mdape) sum_mdape += *r.mdape; else mdape = false;
  }
  if (mape) m.mape = sum_mape / n;
  if (mdape) m.mdape = sum_mdape / n;
  return m;
}

// ---- prepare ---------------------------------------------------------------

struct PrepareArgs {
  std::string flow;
  std::string adjacency;
};

SampleSet windows(const RawSeries& filled, const DataConfig& d, const Vocabulary& vocab) {
  const CalendarConfig calendar{d.moment_num, 168};
  const NodeFeatures features = build_features(filled, calendar, d.day_start_minute, vocab);
  SampleSet s = sliding_window(filled, features, {d.lags, d.horizon, d.stride});
  s.interval_seconds = filled.interval_seconds;
  return s;
}

void cmd_prepare(Context& ctx, const PrepareArgs& a) {
  const ResolvedConfig cfg = ctx.config();
  const DataConfig& d = cfg.data;
  ctx.inputs = {a.flow, a.adjacency};

  RawSeries series;
  try {
    series = ingest_csv(a.flow, {0, d.interval_seconds, d.max_fill_gap});
  } catch (const ValidationError& e) {
    throw ValidationError(a.flow + ": " + e.what());
  }
  RoadGraph graph = RoadGraph::isolated(1);
  try {
    graph = read_adjacency_csv(a.adjacency, series.node_count, d.orientation);
  } catch (const ValidationError& e) {
    throw ValidationError(a.adjacency + ": " + e.what());
  }

  const Index imputed = series.missing_cells();
  const RawSeries filled = impute_knn(series, d.knn);
  SampleSet samples = windows(filled, d, build_vocabulary(filled));
  if (d.test_days > 0 && filled.has_weather) {
    // Weather codes come from the training range only.
    const TrainTestSplit tt = split_by_test_days(samples, d.test_days, d.day_start_minute);
    samples = windows(filled, d, build_vocabulary(filled, tt.cutoff));
  }

  fs::create_directories(ctx.out_dir);
  write_sample_cache(ctx.output("samples.bin"), samples, graph);

  ctx.out << "nodes: " << series.node_count << "\n"
          << "edges: " << graph.edge_count() << "\n"
          << "records: " << series.record_count << "\n"
          << "time steps: " << series.time_count() << " in " << series.spans.size() << " span(s)\n"
          << "imputed: " << imputed << "\n"
          << "features: " << samples.features() << "\n"
          << "samples: " << samples.size() << "\n";

  if (samples.size() > 0) {
    const Split split = make_split(samples, d, cfg.train.seed, d.fold);
    Model scaler(model_for(cfg, samples), graph);
    scaler.fit_scaling(samples, split.train);
    std::ofstream f = open_out(ctx.output("scaling.csv"));
    f << "column,mean,stddev\n";
    f << std::setprecision(17);
    for (Index c = 0; c < samples.features(); ++c) {
      f << samples.feature_names()[static_cast<std::size_t>(c)] << ',' << scaler.input_scaling.mean(c) << ','
        << scaler.input_scaling.stddev(c) << '\n';
    }
    f << "target," << scaler.target_scaling.mean(0) << ',' << scaler.target_scaling.stddev(0) << '\n';
    ctx.out << "split: " << split.train.size() << " train, " << split.validation.size() << " validation, "
            << split.test.size() << " test\n";
  }
  write_manifest(ctx, "prepare", cfg);
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string cache;
  bool progress = false;
};

void cmd_train(Context& ctx, const TrainArgs& a) {
  const ResolvedConfig cfg = ctx.config();
  const SampleCache cache = load_cache(ctx, a.cache);
  const Split split = make_split(cache.samples, cfg.data, cfg.train.seed, cfg.data.fold);
  EpochCallback progress;
  if (a.progress) {
    progress = [&ctx](const EpochRecord& r) {
      ctx.out << "epoch " << r.epoch << " lr " << r.lr << " loss " << r.train_loss;
      if (r.val_rmse) ctx.out << " val_rmse " << *r.val_rmse;
      ctx.out << std::endl;
      return true;
    };
  }
  const TrainResult result = train(fresh_model(cfg, cache), cache.samples, split.train, split.validation, cfg.train, progress);

  fs::create_directories(ctx.out_dir);
  save_checkpoint(ctx.output("checkpoint.bin"),
                  {result.best_model, cfg.train, result.history, result.best_epoch, "best"});
  save_checkpoint(ctx.output("checkpoint_final.bin"),
                  {result.final_model, cfg.train, result.history, cfg.train.epochs - 1, "final"});
  {
    std::ofstream f = open_out(ctx.output("history.csv"));
    write_history_csv(f, result.history);
  }
  const EpochRecord& last = result.history.back();
  ctx.out << "trained " << to_string(cfg.model.kind) << " for " << cfg.train.epochs << " epochs, final loss "
          << last.train_loss << "\n";
  if (split.validation.empty()) {
    ctx.out << "no validation set: checkpoint.bin holds the final epoch\n";
  } else {
    ctx.out << "best validation RMSE " << *result.history[static_cast<std::size_t>(result.best_epoch)].val_rmse
            << " at epoch " << result.best_epoch << "\n";
  }
  write_manifest(ctx, "train", cfg);
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string cache;
  std::string checkpoint;
  std::string model = "checkpoint";
  std::string subset = "test";
  bool per_road = false;
  bool pairs = false;
  bool svg = false;
  Index svg_node = 0;
};

void cmd_evaluate(Context& ctx, const EvaluateArgs& a) {
  const ResolvedConfig cfg = ctx.config();
  const SampleCache cache = load_cache(ctx, a.cache);
  const SampleSet& s = cache.samples;
  const Split split = make_split(s, cfg.data, cfg.train.seed, cfg.data.fold);
  const std::vector<Index>& idx = pick_subset(split, a.subset);
  if (idx.empty()) throw ValidationError("the " + a.subset + " subset is empty");

  std::string name = a.model;
  PredictionSet p;
  if (a.model == "persistence") {
    p = predict_samples(s, idx, persistence_predictor(s));
  } else if (a.model == "lr") {
    const LinearBaseline lr = fit_linear_baseline(s, split.train, parse_linear_mode(cfg.data.linear_mode));
    p = predict_samples(s, idx, [&lr](const Eigen::Ref<const MatrixXd>& x) { return lr.predict(x); });
  } else if (a.model == "checkpoint") {
    if (a.checkpoint.empty()) throw UsageError("evaluate: --checkpoint is required unless --model is persistence or lr");
    ctx.inputs.push_back(a.checkpoint);
    const Checkpoint ckpt = load_checkpoint(a.checkpoint);
    check_compatible(ckpt.model, cache);
    name = to_string(ckpt.model.config().kind);
    ctx.out << "checkpoint: " << ckpt.selection << " (epoch " << ckpt.epoch << ")\n";
    p = model_predictions(ckpt.model, s, idx);
  } else {
    throw UsageError("evaluate: --model must be checkpoint, persistence or lr, got '" + a.model + "'");
  }

  fs::create_directories(ctx.out_dir);
  const MetricsReport report = evaluate(p);
  {
    std::ofstream f = open_out(ctx.output("metrics.csv"));
    write_metrics_csv(f, {{name, report}});
  }
  write_comparison_table(ctx.out, {{name, report}});
  if (a.per_road) {
    std::vector<NamedReport> rows;
    const std::vector<MetricsReport> per = evaluate_per_node(p);
    for (std::size_t n = 0; n < per.size(); ++n) rows.emplace_back(std::to_string(n), per[n]);
    std::ofstream f = open_out(ctx.output("per_road.csv"));
    write_metrics_csv(f, rows, "node");
  }
  if (a.pairs) {
    std::ofstream f = open_out(ctx.output("pairs.csv"));
    write_prediction_pairs(f, p);
  }
  if (a.svg) {
    if (a.svg_node < 0 || a.svg_node >= s.nodes()) throw ValidationError("--svg-node is out of range");
    std::ofstream f = open_out(ctx.output("chart.svg"));
    write_prediction_svg(f, p, a.svg_node);
  }
  write_manifest(ctx, "evaluate", cfg);
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  std::string cache;
  std::string checkpoint;
  std::string subset = "test";
};

void cmd_predict(Context& ctx, const PredictArgs& a) {
  const ResolvedConfig cfg = ctx.config();
  const SampleCache cache = load_cache(ctx, a.cache);
  ctx.inputs.push_back(a.checkpoint);
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  check_compatible(ckpt.model, cache);
  const SampleSet& s = cache.samples;
  const Split split = make_split(s, cfg.data, cfg.train.seed, cfg.data.fold);
  const std::vector<Index>& idx = pick_subset(split, a.subset);

  const MatrixXd pred = ckpt.model.predict_samples(s, idx);
  fs::create_directories(ctx.out_dir);
  std::ofstream f = open_out(ctx.output("predictions.csv"));
  f << "sample,target_start,node";
  for (Index h = 1; h <= s.horizon(); ++h) f << ",h" << h;
  f << '\n' << std::setprecision(10);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::int64_t first_target = s.start_time(idx[k]) + static_cast<std::int64_t>(s.lags()) * s.interval_seconds;
    for (Index n = 0; n < s.nodes(); ++n) {
      f << idx[k] << ',' << format_timestamp(first_target) << ',' << n;
      const Index row = static_cast<Index>(k) * s.nodes() + n;
      for (Index h = 0; h < s.horizon(); ++h) f << ',' << pred(row, h);
      f << '\n';
    }
  }
  ctx.out << "wrote " << idx.size() << " samples x " << s.nodes() << " nodes\n";
  write_manifest(ctx, "predict", cfg);
}

// ---- grid-search -----------------------------------------------------------

struct GridArgs {
  std::string cache;
};

void cmd_grid_search(Context& ctx, const GridArgs& a) {
  const ResolvedConfig cfg = ctx.config();
  const SampleCache cache = load_cache(ctx, a.cache);
  const Split split = make_split(cache.samples, cfg.data, cfg.train.seed, cfg.data.fold);
  if (split.validation.empty()) throw ValidationError("grid-search scores on the validation set, which is empty");

  const GridSearchResult r =
      grid_search(cfg.grid, model_for(cfg, cache.samples), cfg.train, cache.graph, cache.samples, split.train,
                  split.validation, [&ctx](const GridRow& row) {
                    ctx.out << "batch " << row.cell.batch_size << " units " << row.cell.units << " layers "
                            << row.cell.layers << ": ";
                    if (row.failed()) {
                      ctx.out << "failed (" << row.error << ")\n";
                    } else {
                      ctx.out << "MSE " << row.report->mse << " MAE " << row.report->mae << "\n";
                    }
                  });
  fs::create_directories(ctx.out_dir);
  {
    std::ofstream f = open_out(ctx.output("grid.csv"));
    write_grid_csv(f, r);
  }
  if (r.best) {
    ResolvedConfig best = cfg;
    apply_grid_cell(r.rows[*r.best].cell, best.model, best.train);
    KeyValues kv = best.to_key_values();
    for (auto it = kv.begin(); it != kv.end();) it = it->first.starts_with("grid.") ? kv.erase(it) : std::next(it);
    std::ofstream f = open_out(ctx.output("best_config.txt"));
    f << format_key_values(kv);
    const GridCell& c = r.rows[*r.best].cell;
    ctx.out << "best: batch " << c.batch_size << " units " << c.units << " layers " << c.layers << "\n";
  } else {
    ctx.err << "warning: every grid cell failed\n";
  }
  write_manifest(ctx, "grid-search", cfg);
}

// ---- compare ---------------------------------------------------------------

struct CompareArgs {
  std::string cache;
  std::vector<std::string> models{"loc-gclstm", "lstm", "lr", "persistence"};
  bool all_folds = false;
};

MetricsReport score(const std::string& name, const ResolvedConfig& cfg, const SampleCache& cache, const Split& split) {
  const SampleSet& s = cache.samples;
  if (name == "persistence") return evaluate(predict_samples(s, split.test, persistence_predictor(s)));
  if (name == "lr") {
    const LinearBaseline lr = fit_linear_baseline(s, split.train, parse_linear_mode(cfg.data.linear_mode));
    return evaluate(predict_samples(s, split.test, [&lr](const Eigen::Ref<const MatrixXd>& x) { return lr.predict(x); }));
  }
  ResolvedConfig c = cfg;
  c.model.kind = parse_model_kind(name);
  const TrainResult r = train(fresh_model(c, cache), s, split.train, split.validation, c.train);
  return evaluate_model(r.best_model, s, split.test);
}

void cmd_compare(Context& ctx, const CompareArgs& a) {
  std::vector<std::string> models;
  for (const std::string& m : a.models) {
    if (m != "loc-gclstm" && m != "lstm" && m != "lr" && m != "persistence") {
      throw UsageError("compare: unknown model '" + m + "' (choose from loc-gclstm, lstm, lr, persistence)");
    }
    if (std::find(models.begin(), models.end(), m) != models.end()) {
      ctx.err << "warning: model '" << m << "' listed more than once; using it once\n";
      continue;
    }
    models.push_back(m);
  }
  const ResolvedConfig cfg = ctx.config();
  const SampleCache cache = load_cache(ctx, a.cache);
  const bool folds = a.all_folds && cfg.data.test_days == 0;
  if (a.all_folds && !folds) ctx.err << "warning: --all-folds ignored with a test-days split\n";

  std::vector<int> fold_list;
  if (folds) {
    for (int f = 0; f < cfg.data.folds; ++f) fold_list.push_back(f);
  } else {
    fold_list.push_back(cfg.data.fold);
  }
  std::map<std::string, std::vector<MetricsReport>> per_model;
  for (int f : fold_list) {
    const Split split = make_split(cache.samples, cfg.data, cfg.train.seed, f);
    for (const std::string& m : models) per_model[m].push_back(score(m, cfg, cache, split));
  }
  std::vector<NamedReport> columns;
  for (const std::string& m : models) columns.emplace_back(m, mean_report(per_model[m]));

  fs::create_directories(ctx.out_dir);
  {
    std::ofstream f = open_out(ctx.output("comparison.csv"));
    write_metrics_csv(f, columns);
  }
  if (folds) ctx.out << "mean over " << fold_list.size() << " folds\n";
  write_comparison_table(ctx.out, columns);
  write_manifest(ctx, "compare", cfg);
}

// ---- synth / convert-wide --------------------------------------------------

struct SynthArgs {
  SyntheticConfig cfg;
};

void cmd_synth(Context& ctx, SynthArgs a) {
  const ResolvedConfig cfg = ctx.config();
  if (ctx.seed) a.cfg.seed = *ctx.seed;
  const SyntheticNetwork net = make_synthetic_network(a.cfg);
  fs::create_directories(ctx.out_dir);
  write_flow_csv(ctx.output("flow.csv"), net.series);
  write_adjacency_edges(ctx.output("adjacency.csv"), net.graph);
  ctx.out << "wrote " << net.series.node_count << " nodes x " << net.series.time_count() << " steps\n";
  write_manifest(ctx, "synth", cfg);
}

struct ConvertArgs {
  std::string input;
  bool zero_missing = false;
};

void cmd_convert_wide(Context& ctx, const ConvertArgs& a) {
  const ResolvedConfig cfg = ctx.config();
  ctx.inputs = {a.input};
  fs::create_directories(ctx.out_dir);
  const std::vector<std::string> sensors = convert_wide_csv(a.input, ctx.output("flow.csv"), a.zero_missing);
  std::ofstream f = open_out(ctx.output("sensors.csv"));
  f << "node_id,sensor\n";
  for (std::size_t i = 0; i < sensors.size(); ++i) f << i << ',' << sensors[i] << '\n';
  ctx.out << "converted " << sensors.size() << " sensors\n";
  write_manifest(ctx, "convert-wide", cfg);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx(out, err);
  CLI::App app{"Loc-GCLSTM traffic flow forecasting", args.empty() ? "locgc" : args[0]};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();
  if (const char* env = std::getenv("LOCGC_CONFIG")) ctx.config_path = env;
  app.add_option("--config", ctx.config_path, "key = value settings file (default: $LOCGC_CONFIG)");
  app.add_option("--out-dir", ctx.out_dir, "Directory for every output file")->capture_default_str();
  app.add_option_function<std::uint64_t>("--seed", [&ctx](std::uint64_t s) { ctx.seed = s; }, "Random seed");
  app.add_option("--set", ctx.sets, "Override a setting, key=value (repeatable)");

  PrepareArgs prepare;
  CLI::App* p = app.add_subcommand("prepare", "Ingest flow and adjacency CSVs into a sample cache");
  p->add_option("--flow", prepare.flow, "Flow CSV (timestamp,node_id,flow[,...])")->required();
  p->add_option("--adjacency", prepare.adjacency, "Edge list (src,dst) or dense 0/1 matrix")->required();
  key_flag(p, ctx, "--orientation", "orientation", "out: src feeds dst (default); in: transposed");
  key_flag(p, ctx, "--stride", "stride", "Window stride");
  key_flag(p, ctx, "--lags", "lags", "Input steps per sample");
  key_flag(p, ctx, "--horizon", "horizon", "Predicted steps per sample");
  key_flag(p, ctx, "--knn", "knn", "Neighbours used to impute a missing cell");
  key_flag(p, ctx, "--interval", "interval_seconds", "Record interval in seconds");
  key_flag(p, ctx, "--max-fill-gap", "max_fill_gap", "Longest gap (steps) filled rather than split");
  key_flag(p, ctx, "--day-start-minute", "day_start_minute", "Minute of the day the daily span starts");
  split_flags(p, ctx);
  p->callback([&] { cmd_prepare(ctx, prepare); });

  TrainArgs train_args;
  CLI::App* t = app.add_subcommand("train", "Train a model on the sample cache");
  t->add_option("--cache", train_args.cache, "Sample cache from prepare")->required();
  t->add_flag("--progress", train_args.progress, "Print one line per epoch");
  model_flags(t, ctx);
  train_flags(t, ctx);
  split_flags(t, ctx);
  t->callback([&] { cmd_train(ctx, train_args); });

  EvaluateArgs eval;
  CLI::App* e = app.add_subcommand("evaluate", "Score a checkpoint or a baseline");
  e->add_option("--cache", eval.cache, "Sample cache from prepare")->required();
  e->add_option("--checkpoint", eval.checkpoint, "Checkpoint from train");
  e->add_option("--model", eval.model, "checkpoint, persistence or lr")->capture_default_str();
  e->add_option("--subset", eval.subset, "train, validation or test")->capture_default_str();
  e->add_flag("--per-road", eval.per_road, "Also write one metrics row per node");
  e->add_flag("--pairs", eval.pairs, "Also write prediction/truth pairs");
  e->add_flag("--svg", eval.svg, "Also draw a prediction chart");
  e->add_option("--svg-node", eval.svg_node, "Node drawn by --svg")->capture_default_str();
  split_flags(e, ctx);
  e->callback([&] { cmd_evaluate(ctx, eval); });

  PredictArgs predict;
  CLI::App* pr = app.add_subcommand("predict", "Write checkpoint predictions for a subset");
  pr->add_option("--cache", predict.cache, "Sample cache from prepare")->required();
  pr->add_option("--checkpoint", predict.checkpoint, "Checkpoint from train")->required();
  pr->add_option("--subset", predict.subset, "train, validation or test")->capture_default_str();
  split_flags(pr, ctx);
  pr->callback([&] { cmd_predict(ctx, predict); });

  GridArgs grid;
  CLI::App* g = app.add_subcommand("grid-search", "Train every batch/units/layers combination");
  g->add_option("--cache", grid.cache, "Sample cache from prepare")->required();
  key_flag(g, ctx, "--batch-sizes", "grid.batch_size", "Comma list of batch sizes");
  key_flag(g, ctx, "--units", "grid.units", "Comma list of LSTM unit counts");
  key_flag(g, ctx, "--layers", "grid.layers", "Comma list of total layer counts (GCN + LSTMs + dense)");
  model_flags(g, ctx);
  train_flags(g, ctx);
  split_flags(g, ctx);
  g->callback([&] { cmd_grid_search(ctx, grid); });

  CompareArgs compare;
  CLI::App* c = app.add_subcommand("compare", "Side-by-side metrics of several models");
  c->add_option("--cache", compare.cache, "Sample cache from prepare")->required();
  c->add_option("--models", compare.models, "loc-gclstm, lstm, lr, persistence")->delimiter(',');
  c->add_flag("--all-folds", compare.all_folds, "Average over every fold");
  model_flags(c, ctx);
  train_flags(c, ctx);
  split_flags(c, ctx);
  c->callback([&] { cmd_compare(ctx, compare); });

  SynthArgs synth;
  CLI::App* sy = app.add_subcommand("synth", "Write the four-section synthetic network");
  sy->add_option("--days", synth.cfg.days, "Days of data")->capture_default_str();
  sy->add_option("--lag-steps", synth.cfg.lag_steps, "Travel time between sections")->capture_default_str();
  sy->add_option("--noise", synth.cfg.noise_fraction, "Relative noise level")->capture_default_str();
  sy->callback([&] { cmd_synth(ctx, synth); });

  ConvertArgs convert;
  CLI::App* cw = app.add_subcommand("convert-wide", "Wide sensor table to the flow CSV schema");
  cw->add_option("--input", convert.input, "CSV: timestamp, then one column per sensor")->required();
  cw->add_flag("--zero-missing", convert.zero_missing, "Treat 0 readings as missing");
  cw->callback([&] { cmd_convert_wide(ctx, convert); });

  std::vector<std::string> argv(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(argv.begin(), argv.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h, out, err);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h, out, err);
  } catch (const CLI::CallForVersion& h) {
    return app.exit(h, out, err);
  } catch (const CLI::ParseError& pe) {
    app.exit(pe, out, err);
    return 4;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return exit_code(ex);
  }
  return 0;
}

}  // namespace locgc::cli
