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

#include "locgc/training/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "csv_util.hpp"

namespace locgc {

ModelKind parse_model_kind(const std::string& text) {
  if (text == "loc-gclstm") return ModelKind::kLocGCLSTM;
  if (text == "lstm") return ModelKind::kLSTM;
  throw ValidationError("model must be 'loc-gclstm' or 'lstm', got '" + text + "'");
}

std::string to_string(ModelKind kind) { return kind == ModelKind::kLSTM ? "lstm" : "loc-gclstm"; }

void ModelConfig::validate() const {
  if (nodes < 1 || features < 1) throw ValidationError("model: nodes and features must be positive");
  if (lags < 1 || horizon < 1) throw ValidationError("model: lags and horizon must be positive");
  if (gcn_units < 1 || lstm_units < 1) throw ValidationError("model: unit counts must be positive");
  if (gcn_steps < 1) throw ValidationError("model: gcn_steps must be >= 1");
  if (lstm_layers < 1) throw ValidationError("model: lstm_layers must be >= 1");
  if (gcn_steps > 1 && kind == ModelKind::kLocGCLSTM && gcn_units != features) {
    // Steps share one weight, so it must map the width onto itself.
    throw ValidationError("model: gcn_steps > 1 needs gcn_units equal to the feature count");
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("train: epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("train: batch_size must be >= 1");
  if (!(lr_min > 0) || !(lr_max >= lr_min)) throw ValidationError("train: need lr_max >= lr_min > 0");
  if (calra_cycles < 1) throw ValidationError("train: calra_cycles must be >= 1");
  if (!(bias_l2 >= 0)) throw ValidationError("train: bias_l2 must be >= 0");
  if (!(rmsprop_rho >= 0 && rmsprop_rho < 1)) throw ValidationError("train: rmsprop_rho must lie in [0, 1)");
  if (!(rmsprop_eps > 0)) throw ValidationError("train: rmsprop_eps must be positive");
}

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    std::string_view body = csv::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(source + ": expected 'key = value'", line_no);
    const std::string key(csv::trim(body.substr(0, eq)));
    const std::string value(csv::trim(body.substr(eq + 1)));
    if (key.empty()) throw ParseError(source + ": empty key", line_no);
    if (kv.count(key)) throw ParseError(source + ": duplicate key '" + key + "'", line_no);
    kv[key] = value;
  }
  return kv;
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in = csv::open(path);
  return parse_key_values(in, path);
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ContractError("format_double failed");
  return std::string(buf, ptr);
}

double parse_double_option(const std::string& key, const std::string& value) {
  double v;
  if (!csv::parse_double(value, v)) throw ValidationError("option " + key + ": '" + value + "' is not a number");
  return v;
}

std::int64_t parse_int_option(const std::string& key, const std::string& value) {
  std::int64_t v;
  if (!csv::parse_int(value, v)) throw ValidationError("option " + key + ": '" + value + "' is not an integer");
  return v;
}

bool set_model_option(ModelConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "model") {
    cfg.kind = parse_model_kind(value);
  } else if (key == "nodes") {
    cfg.nodes = parse_int_option(key, value);
  } else if (key == "features") {
    cfg.features = parse_int_option(key, value);
  } else if (key == "lags") {
    cfg.lags = parse_int_option(key, value);
  } else if (key == "horizon") {
    cfg.horizon = parse_int_option(key, value);
  } else if (key == "gcn_units") {
    cfg.gcn_units = parse_int_option(key, value);
  } else if (key == "gcn_steps") {
    cfg.gcn_steps = static_cast<int>(parse_int_option(key, value));
  } else if (key == "normalization") {
    cfg.normalization = parse_normalization(value);
  } else if (key == "lstm_units") {
    cfg.lstm_units = parse_int_option(key, value);
  } else if (key == "lstm_layers") {
    cfg.lstm_layers = static_cast<int>(parse_int_option(key, value));
  } else {
    return false;
  }
  return true;
}

bool set_train_option(TrainConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "epochs") {
    cfg.epochs = static_cast<int>(parse_int_option(key, value));
  } else if (key == "batch_size") {
    cfg.batch_size = parse_int_option(key, value);
  } else if (key == "lr_max") {
    cfg.lr_max = parse_double_option(key, value);
  } else if (key == "lr_min") {
    cfg.lr_min = parse_double_option(key, value);
  } else if (key == "calra_cycles") {
    cfg.calra_cycles = static_cast<int>(parse_int_option(key, value));
  } else if (key == "bias_l2") {
    cfg.bias_l2 = parse_double_option(key, value);
  } else if (key == "rmsprop_rho") {
    cfg.rmsprop_rho = parse_double_option(key, value);
  } else if (key == "rmsprop_eps") {
    cfg.rmsprop_eps = parse_double_option(key, value);
  } else if (key == "seed") {
    const std::int64_t s = parse_int_option(key, value);
    if (s < 0) throw ValidationError("option seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else {
    return false;
  }
  return true;
}

KeyValues model_options(const ModelConfig& cfg) {
  return {{"model", to_string(cfg.kind)},
          {"nodes", std::to_string(cfg.nodes)},
          {"features", std::to_string(cfg.features)},
          {"lags", std::to_string(cfg.lags)},
          {"horizon", std::to_string(cfg.horizon)},
          {"gcn_units", std::to_string(cfg.gcn_units)},
          {"gcn_steps", std::to_string(cfg.gcn_steps)},
          {"normalization", to_string(cfg.normalization)},
          {"lstm_units", std::to_string(cfg.lstm_units)},
          {"lstm_layers", std::to_string(cfg.lstm_layers)}};
}

KeyValues train_options(const TrainConfig& cfg) {
  return {{"epochs", std::to_string(cfg.epochs)},
          {"batch_size", std::to_string(cfg.batch_size)},
          {"lr_max", format_double(cfg.lr_max)},
          {"lr_min", format_double(cfg.lr_min)},
          {"calra_cycles", std::to_string(cfg.calra_cycles)},
          {"bias_l2", format_double(cfg.bias_l2)},
          {"rmsprop_rho", format_double(cfg.rmsprop_rho)},
          {"rmsprop_eps", format_double(cfg.rmsprop_eps)},
          {"seed", std::to_string(cfg.seed)}};
}

}  // namespace locgc
