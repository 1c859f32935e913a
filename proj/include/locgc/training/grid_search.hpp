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

#ifndef LOCGC_TRAINING_GRID_SEARCH_HPP
#define LOCGC_TRAINING_GRID_SEARCH_HPP

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "locgc/training/train.hpp"

namespace locgc {

/// One lattice point. `layers` counts the whole stack: the GCN layer, the
/// LSTM layers and the dense head, so layers = 4 means two LSTM layers.
struct GridCell {
  Index batch_size = 64;
  Index units = 256;  // LSTM units
  int layers = 4;

  bool operator==(const GridCell&) const = default;
};

/// Axis values; the defaults are the full search lattice.
struct GridSpec {
  std::vector<Index> batch_sizes{16, 32, 64, 128};
  std::vector<Index> units{32, 64, 128, 256};
  std::vector<int> layers{3, 4};

  void validate() const;
  /// Batch size varies slowest, layers fastest.
  std::vector<GridCell> cells() const;
};

/// Reads `grid.batch_size`, `grid.units` and `grid.layers` as comma lists;
/// missing keys keep the default axis.
GridSpec parse_grid_spec(const KeyValues& kv);

/// Applies a cell on top of base configs. Throws ValidationError when
/// layers leaves no room for an LSTM layer.
void apply_grid_cell(const GridCell& cell, ModelConfig& model, TrainConfig& train);

struct GridRow {
  GridCell cell;
  std::optional<MetricsReport> report;  // empty when the cell failed
  int best_epoch = -1;
  std::string error;

  bool failed() const { return !report.has_value(); }
};

struct GridSearchResult {
  std::vector<GridRow> rows;  // lattice order
  std::optional<std::size_t> best;  // empty when every cell failed
};

/// Lower MSE wins, then lower MAE, then lower RMSE.
bool better_report(const MetricsReport& a, const MetricsReport& b);

using GridCallback = std::function<void(const GridRow&)>;

/// Trains every cell from a fresh seeded initialization on `train` and scores
/// its best-validation model on `validation`. A cell whose training throws is
/// recorded as failed and the search moves on.
GridSearchResult grid_search(const GridSpec& spec, const ModelConfig& base_model, const TrainConfig& base_train,
                             const RoadGraph& graph, const SampleSet& samples, const std::vector<Index>& train,
                             const std::vector<Index>& validation, const GridCallback& on_cell = nullptr);

/// batch_size,units,layers, then MSE,RMSE,MAE,MAPE,MdAE,MdAPE, best_epoch,
/// status and a best marker.
void write_grid_csv(std::ostream& out, const GridSearchResult& result);

}  // namespace locgc

#endif  // LOCGC_TRAINING_GRID_SEARCH_HPP
