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

#ifndef LOCGC_CLI_CLI_HPP
#define LOCGC_CLI_CLI_HPP

#include <cstdint>
#include <exception>
#include <ostream>
#include <string>
#include <vector>

#include "locgc/data/samples.hpp"
#include "locgc/training/config.hpp"
#include "locgc/training/grid_search.hpp"

namespace locgc::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Bad command-line usage that the parser itself cannot catch.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// 0 success, 2 validation/shape/contract, 3 numeric, 4 usage.
int exit_code(const std::exception& e);

/// Ingest, windowing and split settings.
struct DataConfig {
  int knn = 4;
  Index stride = 1;
  Index lags = 12;
  Index horizon = 12;
  int interval_seconds = 300;
  int max_fill_gap = 3;
  int day_start_minute = 0;
  int moment_num = 288;
  AdjacencyOrientation orientation = AdjacencyOrientation::kOut;
  int folds = 5;
  int fold = 0;
  int test_days = 0;                 // > 0 switches from k-fold to a fixed-day split
  double validation_fraction = 0.1;  // of the training range, test-days split only
  std::string linear_mode = "per-node";

  void validate() const;
};

bool set_data_option(DataConfig& cfg, const std::string& key, const std::string& value);
KeyValues data_options(const DataConfig& cfg);

/// Every setting a command may need. Later sources override earlier ones:
/// defaults, the config file, then command-line flags.
struct ResolvedConfig {
  ModelConfig model;
  TrainConfig train;
  DataConfig data;
  GridSpec grid;

  /// The effective settings as flat key/values (grid axes included).
  KeyValues to_key_values() const;
};

/// Unknown keys are a ValidationError so typos do not pass silently.
ResolvedConfig resolve_config(const KeyValues& kv);

/// Sample indices of one experiment. With k-fold, fold `fold` is the test
/// set and fold (fold+1) mod k validates; the rest trains (k = 2 trains
/// without validation). With test days, the latest validation_fraction of
/// the training range validates.
struct Split {
  std::vector<Index> train;
  std::vector<Index> validation;
  std::vector<Index> test;
};

Split make_split(const SampleSet& samples, const DataConfig& data, std::uint64_t seed, int fold);

/// Wide table (timestamp column, then one column per sensor) to the long
/// flow CSV. Sensor columns become node ids in column order. With
/// `zero_is_missing` a 0 reading is written as an empty cell. Returns the
/// sensor names.
std::vector<std::string> convert_wide_csv(const std::string& in_path, const std::string& out_path,
                                          bool zero_is_missing);

/// Runs one command line (args[0] is the program name). Errors are
/// reported on `err` and mapped onto the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace locgc::cli

#endif  // LOCGC_CLI_CLI_HPP
