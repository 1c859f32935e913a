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

#ifndef LOCGC_TRAINING_CONFIG_HPP
#define LOCGC_TRAINING_CONFIG_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <string>

#include "locgc/core.hpp"
#include "locgc/graph/location_gcn.hpp"

namespace locgc {

enum class ModelKind {
  kLocGCLSTM,  // Location-GCN feeding the LSTM
  kLSTM,       // ablation: the GCN layer is bypassed
};

ModelKind parse_model_kind(const std::string& text);
std::string to_string(ModelKind kind);

struct ModelConfig {
  ModelKind kind = ModelKind::kLocGCLSTM;
  Index nodes = 0;     // taken from the data
  Index features = 0;  // taken from the data
  Index lags = 12;
  Index horizon = 12;
  Index gcn_units = 128;
  int gcn_steps = 1;
  Normalization normalization = Normalization::kDynamic;
  Index lstm_units = 256;
  int lstm_layers = 2;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct TrainConfig {
  int epochs = 600;
  Index batch_size = 64;
  double lr_max = 2.4e-5;
  double lr_min = 1.5e-5;
  int calra_cycles = 4;
  double bias_l2 = 0.01;
  double rmsprop_rho = 0.9;
  double rmsprop_eps = 1e-7;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Flat `key = value` settings; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in, const std::string& source);
KeyValues read_key_values(const std::string& path);
std::string format_key_values(const KeyValues& kv);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Applies one setting; returns false when the key is not a model/train key.
bool set_model_option(ModelConfig& cfg, const std::string& key, const std::string& value);
bool set_train_option(TrainConfig& cfg, const std::string& key, const std::string& value);

KeyValues model_options(const ModelConfig& cfg);
KeyValues train_options(const TrainConfig& cfg);

double parse_double_option(const std::string& key, const std::string& value);
std::int64_t parse_int_option(const std::string& key, const std::string& value);

}  // namespace locgc

#endif  // LOCGC_TRAINING_CONFIG_HPP
