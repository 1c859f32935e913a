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

#include "locgc/training/grid_search.hpp"

#include "csv_util.hpp"

namespace locgc {

namespace {

template <typename T>
std::vector<T> parse_axis(const KeyValues& kv, const std::string& key, std::vector<T> fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::vector<T> out;
  for (std::string_view field : csv::split(it->second)) {
    out.push_back(static_cast<T>(parse_int_option(key, std::string(field))));
  }
  return out;
}

}  // namespace

void GridSpec::validate() const {
  if (batch_sizes.empty() || units.empty() || layers.empty()) throw ValidationError("grid: every axis needs a value");
  for (Index b : batch_sizes)
    if (b < 1) throw ValidationError("grid: batch sizes must be positive");
  for (Index u : units)
    if (u < 1) throw ValidationError("grid: unit counts must be positive");
  for (int l : layers)
    if (l < 3) throw ValidationError("grid: layers must be >= 3 (GCN, LSTM, dense)");
}

std::vector<GridCell> GridSpec::cells() const {
  std::vector<GridCell> out;
  for (Index b : batch_sizes)
    for (Index u : units)
      for (int l : layers) out.push_back({b, u, l});
  return out;
}

GridSpec parse_grid_spec(const KeyValues& kv) {
  GridSpec spec;
  spec.batch_sizes = parse_axis(kv, "grid.batch_size", spec.batch_sizes);
  spec.units = parse_axis(kv, "grid.units", spec.units);
  spec.layers = parse_axis(kv, "grid.layers", spec.layers);
  spec.validate();
  return spec;
}

void apply_grid_cell(const GridCell& cell, ModelConfig& model, TrainConfig& train) {
  if (cell.layers < 3) throw ValidationError("grid: layers must be >= 3 (GCN, LSTM, dense)");
  train.batch_size = cell.batch_size;
  model.lstm_units = cell.units;
  model.lstm_layers = cell.layers - 2;
}

bool better_report(const MetricsReport& a, const MetricsReport& b) {
  if (a.mse != b.mse) return a.mse < b.mse;
  if (a.mae != b.mae) return a.mae < b.mae;
  return a.rmse < b.rmse;
}

GridSearchResult grid_search(const GridSpec& spec, const ModelConfig& base_model, const TrainConfig& base_train,
                             const RoadGraph& graph, const SampleSet& samples, const std::vector<Index>& train_idx,
                             const std::vector<Index>& validation, const GridCallback& on_cell) {
  spec.validate();
  if (validation.empty()) throw ValidationError("grid_search: empty validation set");
  GridSearchResult result;
  for (const GridCell& cell : spec.cells()) {
    GridRow row{cell, std::nullopt, -1, {}};
    try {
      ModelConfig mc = base_model;
      TrainConfig tc = base_train;
      apply_grid_cell(cell, mc, tc);
      mc.validate();
      // Every cell starts from the same seed so cells differ only by the lattice.
      Rng rng(tc.seed);
      TrainResult fit = train(Model::initialize(mc, graph, rng), samples, train_idx, validation, tc);
      row.report = evaluate_model(fit.best_model, samples, validation);
      row.best_epoch = fit.best_epoch;
    } catch (const Error& e) {
      row.error = e.what();
    }
    if (row.report && (!result.best || better_report(*row.report, *result.rows[*result.best].report))) {
      result.best = result.rows.size();
    }
    result.rows.push_back(row);
    if (on_cell) on_cell(result.rows.back());
  }
  return result;
}

void write_grid_csv(std::ostream& out, const GridSearchResult& result) {
  out << "batch_size,units,layers";
  for (const std::string& name : metric_names()) out << ',' << name;
  out << ",best_epoch,status,best\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const GridRow& row = result.rows[i];
    out << row.cell.batch_size << ',' << row.cell.units << ',' << row.cell.layers;
    if (row.report) {
      for (const std::optional<double>& v : metric_values(*row.report)) out << ',' << format_metric(v, 6);
      out << ',' << row.best_epoch << ",ok";
    } else {
      for (std::size_t k = 0; k < metric_names().size(); ++k) out << ",NA";
      // Commas would break the row; the message is for humans anyway.
      std::string msg = row.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      out << ",NA,failed: " << msg;
    }
    out << ',' << (result.best == i ? "*" : "") << '\n';
  }
}

}  // namespace locgc
