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

#include "locgc/data/samples.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "binary_io.hpp"
#include "locgc/numerics/random.hpp"

namespace locgc {

SampleSet::SampleSet(Index nodes, Index lags, Index features, Index horizon, std::vector<std::string> feature_names)
    : nodes_(nodes), lags_(lags), features_(features), horizon_(horizon), feature_names_(std::move(feature_names)) {
  if (nodes <= 0 || lags <= 0 || features <= 0 || horizon <= 0) {
    throw ContractError("SampleSet: all dimensions must be positive");
  }
  if (static_cast<Index>(feature_names_.size()) != features) {
    throw ContractError("SampleSet: " + std::to_string(feature_names_.size()) + " feature names for " +
                        std::to_string(features) + " features");
  }
}

void SampleSet::append(const Eigen::Ref<const MatrixXd>& inputs, const Eigen::Ref<const MatrixXd>& targets,
                       std::int64_t start_time) {
  if (inputs.rows() != nodes_ || inputs.cols() != input_width()) {
    throw ShapeError("SampleSet::append: inputs " + shape_string(inputs) + ", expected " +
                     shape_string(nodes_, input_width()));
  }
  if (targets.rows() != nodes_ || targets.cols() != horizon_) {
    throw ShapeError("SampleSet::append: targets " + shape_string(targets) + ", expected " +
                     shape_string(nodes_, horizon_));
  }
  for (Index r = 0; r < nodes_; ++r) {
    for (Index c = 0; c < input_width(); ++c) inputs_.push_back(inputs(r, c));
    for (Index c = 0; c < horizon_; ++c) targets_.push_back(targets(r, c));
  }
  start_times_.push_back(start_time);
}

void SampleSet::check(Index s) const {
  if (s < 0 || s >= size()) {
    throw ContractError("SampleSet: index " + std::to_string(s) + " outside [0, " + std::to_string(size()) + ")");
  }
  if (access_log_ != nullptr) access_log_->push_back(s);
}

SampleSet::Block SampleSet::input(Index s) const {
  check(s);
  return Block(inputs_.data() + s * nodes_ * input_width(), nodes_, input_width());
}

SampleSet::Block SampleSet::target(Index s) const {
  check(s);
  return Block(targets_.data() + s * nodes_ * horizon_, nodes_, horizon_);
}

SampleSet SampleSet::subset(const std::vector<Index>& indices) const {
  SampleSet out(nodes_, lags_, features_, horizon_, feature_names_);
  out.interval_seconds = interval_seconds;
  for (Index s : indices) out.append(input(s), target(s), start_time(s));
  return out;
}

bool SampleSet::operator==(const SampleSet& other) const {
  return nodes_ == other.nodes_ && lags_ == other.lags_ && features_ == other.features_ &&
         horizon_ == other.horizon_ && feature_names_ == other.feature_names_ && inputs_ == other.inputs_ &&
         targets_ == other.targets_ && start_times_ == other.start_times_ &&
         interval_seconds == other.interval_seconds;
}

SampleSet sliding_window(const RawSeries& series, const NodeFeatures& features, const WindowConfig& cfg) {
  if (cfg.lags < 1 || cfg.horizon < 1 || cfg.stride < 1) {
    throw ContractError("sliding_window: lags, horizon and stride must be >= 1");
  }
  if (static_cast<Index>(features.per_node.size()) != series.node_count) {
    throw ShapeError("sliding_window: features for " + std::to_string(features.per_node.size()) + " nodes, series has " +
                     std::to_string(series.node_count));
  }
  const Index n_features = static_cast<Index>(features.names.size());
  SampleSet out(series.node_count, cfg.lags, n_features, cfg.horizon, features.names);
  out.interval_seconds = series.interval_seconds;
  const Index window = cfg.lags + cfg.horizon;
  MatrixXd inputs(series.node_count, cfg.lags * n_features);
  MatrixXd targets(series.node_count, cfg.horizon);
  for (const auto& [begin, end] : series.spans) {
    for (Index start = begin; start + window <= end; start += cfg.stride) {
      for (Index n = 0; n < series.node_count; ++n) {
        const MatrixXd& f = features.per_node[n];
        for (Index l = 0; l < cfg.lags; ++l) inputs.row(n).segment(l * n_features, n_features) = f.row(start + l);
        targets.row(n) = series.values[n].col(0).segment(start + cfg.lags, cfg.horizon).transpose();
      }
      out.append(inputs, targets, series.times[start]);
    }
  }
  return out;
}

std::vector<Index> FoldSplit::test(int f) const {
  if (f < 0 || f >= k()) throw ContractError("fold index " + std::to_string(f) + " out of range");
  std::vector<Index> out = folds[f];
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index> FoldSplit::train(int f) const {
  if (f < 0 || f >= k()) throw ContractError("fold index " + std::to_string(f) + " out of range");
  std::vector<Index> out;
  for (int g = 0; g < k(); ++g) {
    if (g != f) out.insert(out.end(), folds[g].begin(), folds[g].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

FoldSplit kfold_split(Index sample_count, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("kfold_split: k must be >= 2, got " + std::to_string(k));
  if (sample_count < k) {
    throw ContractError("kfold_split: " + std::to_string(sample_count) + " samples cannot fill " +
                          std::to_string(k) + " folds");
  }
  std::vector<Index> order(static_cast<std::size_t>(sample_count));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(order);
  FoldSplit split;
  split.seed = seed;
  const Index base = sample_count / k;
  const Index extra = sample_count % k;
  auto it = order.begin();
  for (int f = 0; f < k; ++f) {
    const Index len = base + (f < extra ? 1 : 0);
    split.folds.emplace_back(it, it + len);
    it += len;
  }
  return split;
}

TrainTestSplit split_by_test_days(const SampleSet& samples, int test_days, int day_start_minute) {
  if (test_days < 1) throw ValidationError("test_days must be >= 1");
  if (samples.size() == 0) throw ValidationError("split_by_test_days: no samples");
  std::int64_t last = samples.end_time(0);
  for (Index s = 1; s < samples.size(); ++s) last = std::max(last, samples.end_time(s));
  const std::int64_t shift = static_cast<std::int64_t>(day_start_minute) * 60;
  const std::int64_t shifted = last - shift;
  std::int64_t day = shifted / 86400;
  if (shifted < 0 && shifted % 86400 != 0) --day;
  TrainTestSplit split;
  split.cutoff = (day - (test_days - 1)) * 86400 + shift;
  for (Index s = 0; s < samples.size(); ++s) {
    if (samples.start_time(s) >= split.cutoff) {
      split.test.push_back(s);
    } else if (samples.end_time(s) < split.cutoff) {
      split.train.push_back(s);
    }
  }
  if (split.train.empty() || split.test.empty()) {
    throw ValidationError("split_by_test_days: holding out " + std::to_string(test_days) +
                          " days leaves an empty train or test set");
  }
  return split;
}

TrainTestSplit split_chronological(const SampleSet& samples, double test_fraction) {
  if (!(test_fraction > 0 && test_fraction < 1)) throw ValidationError("test fraction must lie in (0, 1)");
  std::vector<Index> order(static_cast<std::size_t>(samples.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return samples.start_time(a) < samples.start_time(b); });
  const auto first_test = static_cast<std::size_t>(static_cast<double>(order.size()) * (1 - test_fraction));
  if (first_test == 0 || first_test >= order.size()) {
    throw ValidationError("split_chronological: too few samples for the requested fraction");
  }
  TrainTestSplit split;
  split.cutoff = samples.start_time(order[first_test]);
  for (Index s : order) {
    if (samples.start_time(s) >= split.cutoff) {
      split.test.push_back(s);
    } else if (samples.end_time(s) < split.cutoff) {
      split.train.push_back(s);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  if (split.train.empty()) throw ValidationError("split_chronological: no training sample ends before the cutoff");
  return split;
}

namespace {
constexpr char kCacheMagic[8] = {'L', 'O', 'C', 'G', 'S', 'M', 'P', '\0'};
constexpr std::uint32_t kCacheVersion = 1;
}  // namespace

void write_sample_cache(const std::string& path, const SampleSet& samples, const RoadGraph& graph) {
  if (graph.node_count() != samples.nodes()) {
    throw ShapeError("write_sample_cache: graph has " + std::to_string(graph.node_count()) + " nodes, samples " +
                     std::to_string(samples.nodes()));
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp + "'");
    bin::Writer w(out);
    w.raw(kCacheMagic, 8);
    w.u32(kCacheVersion);
    w.u64(samples.nodes());
    w.u64(samples.lags());
    w.u64(samples.features());
    w.u64(samples.horizon());
    w.i64(samples.interval_seconds);
    for (const auto& name : samples.feature_names()) w.str(name);
    const AdjacencyMatrix& a = graph.adjacency();
    for (Index i = 0; i < a.size(); ++i) {
      const std::uint8_t b = static_cast<std::uint8_t>(a.data()[i]);
      w.raw(&b, 1);
    }
    w.u64(samples.start_times().size());
    for (auto t : samples.start_times()) w.i64(t);
    w.doubles(samples.raw_inputs().data(), samples.raw_inputs().size());
    w.doubles(samples.raw_targets().data(), samples.raw_targets().size());
    out.flush();
    if (!out) throw ValidationError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ValidationError("cannot rename into '" + path + "'");
}

SampleCache read_sample_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  bin::Reader r(in, "sample cache '" + path + "'");
  r.expect_magic(kCacheMagic);
  const std::uint32_t version = r.u32();
  if (version != kCacheVersion) {
    throw ValidationError(r.what() + ": unsupported version " + std::to_string(version));
  }
  const auto nodes = static_cast<Index>(r.count(1u << 20));
  const auto lags = static_cast<Index>(r.count(1u << 20));
  const auto features = static_cast<Index>(r.count(1u << 16));
  const auto horizon = static_cast<Index>(r.count(1u << 20));
  const std::int64_t interval = r.i64();
  std::vector<std::string> names;
  for (Index f = 0; f < features; ++f) names.push_back(r.str());
  AdjacencyMatrix a(nodes, nodes);
  for (Index i = 0; i < a.size(); ++i) {
    std::uint8_t b;
    r.raw(&b, 1);
    a.data()[i] = b;
  }
  SampleCache cache{SampleSet(nodes, lags, features, horizon, std::move(names)), RoadGraph(std::move(a))};
  cache.samples.interval_seconds = static_cast<int>(interval);
  const auto count = static_cast<Index>(r.count(std::uint64_t{1} << 32));
  std::vector<std::int64_t> starts(static_cast<std::size_t>(count));
  for (auto& t : starts) t = r.i64();
  const std::vector<double> inputs = r.doubles();
  const std::vector<double> targets = r.doubles();
  const Index in_block = nodes * lags * features;
  const Index out_block = nodes * horizon;
  if (static_cast<Index>(inputs.size()) != count * in_block ||
      static_cast<Index>(targets.size()) != count * out_block) {
    throw ValidationError(r.what() + ": payload size does not match the header");
  }
  for (Index s = 0; s < count; ++s) {
    cache.samples.append(Eigen::Map<const MatrixXd>(inputs.data() + s * in_block, nodes, lags * features),
                         Eigen::Map<const MatrixXd>(targets.data() + s * out_block, nodes, horizon), starts[s]);
  }
  return cache;
}

}  // namespace locgc
