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

#include <algorithm>
#include <fstream>
#include <numeric>

#include "../csv_util.hpp"
#include "locgc/baselines/baselines.hpp"
#include "locgc/cli/cli.hpp"

namespace locgc::cli {

int exit_code(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return 4;
  if (dynamic_cast<const NumericError*>(&e)) return 3;
  if (dynamic_cast<const Error*>(&e)) return 2;
  return 1;
}

void DataConfig::validate() const {
  if (knn < 1) throw ValidationError("data: knn must be >= 1");
  if (stride < 1 || lags < 1 || horizon < 1) throw ValidationError("data: stride, lags and horizon must be positive");
  if (interval_seconds < 1) throw ValidationError("data: interval_seconds must be positive");
  if (max_fill_gap < 0) throw ValidationError("data: max_fill_gap must be >= 0");
  if (day_start_minute < 0 || day_start_minute >= 1440) throw ValidationError("data: day_start_minute must lie in [0, 1440)");
  if (moment_num < 1) throw ValidationError("data: moment_num must be positive");
  if (folds < 2) throw ValidationError("data: folds must be >= 2");
  if (fold < 0 || fold >= folds) throw ValidationError("data: fold must lie in [0, folds)");
  if (test_days < 0) throw ValidationError("data: test_days must be >= 0");
  if (!(validation_fraction >= 0 && validation_fraction < 1)) {
    throw ValidationError("data: validation_fraction must lie in [0, 1)");
  }
  parse_linear_mode(linear_mode);
}

bool set_data_option(DataConfig& cfg, const std::string& key, const std::string& value) {
  auto as_int = [&] { return static_cast<int>(parse_int_option(key, value)); };
  if (key == "knn") {
    cfg.knn = as_int();
  } else if (key == "stride") {
    cfg.stride = parse_int_option(key, value);
  } else if (key == "lags") {
    cfg.lags = parse_int_option(key, value);
  } else if (key == "horizon") {
    cfg.horizon = parse_int_option(key, value);
  } else if (key == "interval_seconds") {
    cfg.interval_seconds = as_int();
  } else if (key == "max_fill_gap") {
    cfg.max_fill_gap = as_int();
  } else if (key == "day_start_minute") {
    cfg.day_start_minute = as_int();
  } else if (key == "moment_num") {
    cfg.moment_num = as_int();
  } else if (key == "orientation") {
    cfg.orientation = parse_orientation(value);
  } else if (key == "folds") {
    cfg.folds = as_int();
  } else if (key == "fold") {
    cfg.fold = as_int();
  } else if (key == "test_days") {
    cfg.test_days = as_int();
  } else if (key == "validation_fraction") {
    cfg.validation_fraction = parse_double_option(key, value);
  } else if (key == "linear_mode") {
    cfg.linear_mode = value;
  } else {
    return false;
  }
  return true;
}

KeyValues data_options(const DataConfig& cfg) {
  return {
      {"knn", std::to_string(cfg.knn)},
      {"stride", std::to_string(cfg.stride)},
      {"lags", std::to_string(cfg.lags)},
      {"horizon", std::to_string(cfg.horizon)},
      {"interval_seconds", std::to_string(cfg.interval_seconds)},
      {"max_fill_gap", std::to_string(cfg.max_fill_gap)},
      {"day_start_minute", std::to_string(cfg.day_start_minute)},
      {"moment_num", std::to_string(cfg.moment_num)},
      {"orientation", cfg.orientation == AdjacencyOrientation::kIn ? "in" : "out"},
      {"folds", std::to_string(cfg.folds)},
      {"fold", std::to_string(cfg.fold)},
      {"test_days", std::to_string(cfg.test_days)},
      {"validation_fraction", format_double(cfg.validation_fraction)},
      {"linear_mode", cfg.linear_mode},
  };
}

namespace {

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string s;
  for (const T& v : values) s += (s.empty() ? "" : ",") + std::to_string(v);
  return s;
}

}  // namespace

KeyValues ResolvedConfig::to_key_values() const {
  KeyValues kv = model_options(model);
  // Always taken from the data.
  kv.erase("nodes");
  kv.erase("features");
  kv.merge(train_options(train));
  kv.merge(data_options(data));
  kv["grid.batch_size"] = join(grid.batch_sizes);
  kv["grid.units"] = join(grid.units);
  kv["grid.layers"] = join(grid.layers);
  return kv;
}

ResolvedConfig resolve_config(const KeyValues& kv) {
  ResolvedConfig cfg;
  KeyValues grid;
  for (const auto& [key, value] : kv) {
    if (key.starts_with("grid.")) {
      grid[key] = value;
      continue;
    }
    // lags and horizon belong to both the windowing and the model.
    bool known = set_model_option(cfg.model, key, value);
    known = set_train_option(cfg.train, key, value) || known;
    known = set_data_option(cfg.data, key, value) || known;
    if (!known) throw ValidationError("unknown config key '" + key + "'");
  }
  for (const auto& [key, value] : grid) {
    if (key != "grid.batch_size" && key != "grid.units" && key != "grid.layers") {
      throw ValidationError("unknown config key '" + key + "'");
    }
  }
  cfg.grid = parse_grid_spec(grid);
  cfg.data.validate();
  cfg.train.validate();
  return cfg;
}

Split make_split(const SampleSet& samples, const DataConfig& data, std::uint64_t seed, int fold) {
  Split split;
  if (data.test_days > 0) {
    TrainTestSplit tt = split_by_test_days(samples, data.test_days, data.day_start_minute);
    split.test = std::move(tt.test);
    // Latest part of the training range validates.
    std::vector<Index> by_time = tt.train;
    std::stable_sort(by_time.begin(), by_time.end(),
                     [&](Index a, Index b) { return samples.start_time(a) < samples.start_time(b); });
    const auto n_val = static_cast<std::size_t>(data.validation_fraction * static_cast<double>(by_time.size()));
    split.train.assign(by_time.begin(), by_time.end() - static_cast<std::ptrdiff_t>(n_val));
    split.validation.assign(by_time.end() - static_cast<std::ptrdiff_t>(n_val), by_time.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.validation.begin(), split.validation.end());
  } else {
    if (fold < 0 || fold >= data.folds) throw ValidationError("fold must lie in [0, folds)");
    const FoldSplit folds = kfold_split(samples.size(), data.folds, seed);
    split.test = folds.test(fold);
    if (data.folds == 2) {
      split.train = folds.train(fold);
    } else {
      const int val_fold = (fold + 1) % data.folds;
      split.validation = folds.test(val_fold);
      for (int f = 0; f < data.folds; ++f) {
        if (f == fold || f == val_fold) continue;
        split.train.insert(split.train.end(), folds.folds[f].begin(), folds.folds[f].end());
      }
      std::sort(split.train.begin(), split.train.end());
    }
  }
  if (split.train.empty()) throw ValidationError("split: no training samples");
  if (split.test.empty()) throw ValidationError("split: no test samples");
  return split;
}

std::vector<std::string> convert_wide_csv(const std::string& in_path, const std::string& out_path,
                                          bool zero_is_missing) {
  std::ifstream in = csv::open(in_path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(in_path + ": empty file");
  const std::vector<std::string_view> header = csv::split(line);
  if (header.size() < 2) throw ParseError(in_path + ": need a timestamp column and at least one sensor", 1);
  std::vector<std::string> sensors(header.begin() + 1, header.end());

  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot write '" + out_path + "'");
  out << "timestamp,node_id,flow\n";
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const std::vector<std::string_view> fields = csv::split(line);
    if (fields.size() != header.size()) {
      throw ParseError(in_path + ": expected " + std::to_string(header.size()) + " fields", line_no);
    }
    const std::optional<std::int64_t> t = parse_timestamp(std::string(fields[0]));
    if (!t) throw ParseError(in_path + ": bad timestamp '" + std::string(fields[0]) + "'", line_no);
    const std::string stamp = format_timestamp(*t);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double v = 0;
      if (!fields[c].empty() && !csv::parse_double(fields[c], v)) {
        throw ParseError(in_path + ": bad value '" + std::string(fields[c]) + "'", line_no);
      }
      out << stamp << ',' << (c - 1) << ',';
      if (!fields[c].empty() && !(zero_is_missing && v == 0)) out << fields[c];
      out << '\n';
    }
  }
  return sensors;
}

}  // namespace locgc::cli
