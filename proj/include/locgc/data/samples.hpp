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

#ifndef LOCGC_DATA_SAMPLES_HPP
#define LOCGC_DATA_SAMPLES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "locgc/core.hpp"
#include "locgc/data/series.hpp"
#include "locgc/graph/road_graph.hpp"

namespace locgc {

/// Fixed-size supervised samples. Sample s holds, for every node, `lags`
/// consecutive feature rows and the next `horizon` raw flow values.
///
/// Inputs are stored row-major as [sample][node][lag][feature]; targets as
/// [sample][node][step]. Reads through input()/target() are appended to
/// an optional access log, which lets tests prove which rows a fit touched.
class SampleSet {
 public:
  using Block = Eigen::Map<const MatrixXd>;

  SampleSet() = default;
  SampleSet(Index nodes, Index lags, Index features, Index horizon, std::vector<std::string> feature_names);

  /// `inputs` is nodes × (lags·features), `targets` nodes × horizon.
  void append(const Eigen::Ref<const MatrixXd>& inputs, const Eigen::Ref<const MatrixXd>& targets,
              std::int64_t start_time);

  Index size() const { return static_cast<Index>(start_times_.size()); }
  Index nodes() const { return nodes_; }
  Index lags() const { return lags_; }
  Index features() const { return features_; }
  Index horizon() const { return horizon_; }
  Index input_width() const { return lags_ * features_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  Block input(Index s) const;
  Block target(Index s) const;
  std::int64_t start_time(Index s) const { return start_times_.at(static_cast<std::size_t>(s)); }
  const std::vector<std::int64_t>& start_times() const { return start_times_; }

  /// Interval between consecutive rows, used to locate a sample's last target.
  int interval_seconds = 300;
  std::int64_t end_time(Index s) const {
    return start_time(s) + static_cast<std::int64_t>(lags_ + horizon_ - 1) * interval_seconds;
  }

  void set_access_log(std::vector<Index>* log) const { access_log_ = log; }

  /// Samples `indices` in order, as a new set.
  SampleSet subset(const std::vector<Index>& indices) const;

  const std::vector<double>& raw_inputs() const { return inputs_; }
  const std::vector<double>& raw_targets() const { return targets_; }

  bool operator==(const SampleSet& other) const;

 private:
  void check(Index s) const;

  Index nodes_ = 0;
  Index lags_ = 0;
  Index features_ = 0;
  Index horizon_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<double> inputs_;
  std::vector<double> targets_;
  std::vector<std::int64_t> start_times_;
  mutable std::vector<Index>* access_log_ = nullptr;
};

struct WindowConfig {
  Index lags = 12;
  Index horizon = 12;
  Index stride = 1;
};

/// Slides a window of lags + horizon rows over every contiguous span.
/// Spans shorter than the window contribute nothing.
SampleSet sliding_window(const RawSeries& series, const NodeFeatures& features, const WindowConfig& cfg = {});

/// Disjoint folds of a shuffled index range. The first (n mod k) folds
/// hold one extra sample.
struct FoldSplit {
  std::uint64_t seed = 0;
  std::vector<std::vector<Index>> folds;

  int k() const { return static_cast<int>(folds.size()); }
  /// Held-out indices of fold f, sorted.
  std::vector<Index> test(int f) const;
  /// Every index outside fold f, sorted.
  std::vector<Index> train(int f) const;
};

FoldSplit kfold_split(Index sample_count, int k, std::uint64_t seed);

struct TrainTestSplit {
  std::vector<Index> train;
  std::vector<Index> test;
  std::int64_t cutoff = 0;
};

/// Holds out the last `test_days` calendar days (day boundaries shifted by
/// day_start_minute). Test samples start at or after the cutoff, training
/// samples end before it; samples straddling it are dropped.
TrainTestSplit split_by_test_days(const SampleSet& samples, int test_days, int day_start_minute = 0);

/// Holds out the latest `test_fraction` of samples by start time. Training
/// samples must end before the first held-out sample starts.
TrainTestSplit split_chronological(const SampleSet& samples, double test_fraction);

/// Binary sample cache: samples, feature names and adjacency.
void write_sample_cache(const std::string& path, const SampleSet& samples, const RoadGraph& graph);
struct SampleCache {
  SampleSet samples;
  RoadGraph graph;
};
SampleCache read_sample_cache(const std::string& path);

}  // namespace locgc

#endif  // LOCGC_DATA_SAMPLES_HPP
