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

#ifndef LOCGC_DATA_SERIES_HPP
#define LOCGC_DATA_SERIES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locgc/core.hpp"
#include "locgc/encoding/encoding.hpp"

namespace locgc {

using MissingMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Seconds since 1970-01-01 of a naive ISO-8601 timestamp
/// (YYYY-MM-DD[T| ]HH:MM[:SS][Z]). Returns nullopt when malformed.
std::optional<std::int64_t> parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t seconds);

/// Daily slot and weekly hour of a timestamp. `day_start_minute` shifts the
/// start of the daily span (e.g. 180 for data recorded from 03:00).
TimeIndex time_index(std::int64_t seconds, const CalendarConfig& cfg, int day_start_minute = 0,
                     int interval_seconds = 300);

/// Per-node traffic records on a shared time grid.
///
/// The grid is the union of all timestamps. Short gaps (up to
/// IngestOptions::max_fill_gap intervals) are inserted as missing rows;
/// longer gaps end a span. Inside a span the grid step is uniform.
struct RawSeries {
  Index node_count = 0;
  int interval_seconds = 300;
  std::vector<std::string> numeric_columns;  // "flow" first
  bool has_weather = false;
  std::vector<std::int64_t> times;
  std::vector<std::pair<Index, Index>> spans;  // [begin, end) into times
  std::vector<MatrixXd> values;                // per node: times × numeric columns
  std::vector<MissingMask> missing;            // per node, same shape as values
  std::vector<std::vector<std::string>> weather;  // per node, per time; "" when missing
  Index record_count = 0;

  Index time_count() const { return static_cast<Index>(times.size()); }
  Index missing_cells() const;
};

struct IngestOptions {
  Index expected_nodes = 0;  // 0: infer as max id + 1
  int interval_seconds = 300;
  int max_fill_gap = 3;
};

/// Reads the flow CSV: header `timestamp,node_id,flow` followed by any of
/// `speed,density,heavy_ratio,lane_count,weather`. Empty cells are missing.
RawSeries ingest_csv(const std::string& path, const IngestOptions& options = {});

/// Writes a series back in the same schema; missing cells are left empty.
void write_flow_csv(const std::string& path, const RawSeries& series);

/// Assembles a series from dense per-node blocks on a regular grid starting
/// at `start`; nothing is missing.
RawSeries make_series(std::int64_t start, int interval_seconds, std::vector<std::string> numeric_columns,
                      std::vector<MatrixXd> values);

class ImputationError : public ValidationError {
 public:
  ImputationError(Index node, const std::string& column, Index observed, int k)
      : ValidationError("impute: node " + std::to_string(node) + " has " + std::to_string(observed) +
                        " observed '" + column + "' values, fewer than k=" + std::to_string(k)),
        node_(node) {}
  Index node() const { return node_; }

 private:
  Index node_;
};

/// Fills each missing cell with the inverse-time-distance weighted mean of
/// the k temporally nearest observed values of the same node and column
/// (ties go to the earlier value). Missing weather labels take the nearest
/// observed label. Only originally observed values are used as neighbours,
/// so the operation is idempotent.
RawSeries impute_knn(const RawSeries& series, int k = 4);

/// Labels seen strictly before `cutoff` (all labels when nullopt), in time
/// then node order.
Vocabulary build_vocabulary(const RawSeries& series, std::optional<std::int64_t> cutoff = std::nullopt);

/// Per-node model inputs: the numeric columns, the weather code when
/// present, then moment_sin, moment_cos, hour_sin, hour_cos.
struct NodeFeatures {
  std::vector<std::string> names;
  std::vector<MatrixXd> per_node;  // times × names.size()
};

NodeFeatures build_features(const RawSeries& series, const CalendarConfig& calendar, int day_start_minute,
                            const Vocabulary& vocabulary);

}  // namespace locgc

#endif  // LOCGC_DATA_SERIES_HPP
