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

#include "locgc/training/checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "binary_io.hpp"

namespace locgc {

namespace {

constexpr char kMagic[8] = {'L', 'O', 'C', 'G', 'C', 'K', 'P', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

std::string config_text(const Checkpoint& ckpt) {
  KeyValues kv = model_options(ckpt.model.config());
  for (const auto& [k, v] : train_options(ckpt.train)) kv[k] = v;
  kv["epoch"] = std::to_string(ckpt.epoch);
  kv["selection"] = ckpt.selection;
  std::string names;
  for (const auto& f : ckpt.model.feature_names) names += (names.empty() ? "" : ",") + f;
  kv["feature_names"] = names;
  return format_key_values(kv);
}

MatrixXd history_tensor(const std::vector<EpochRecord>& history) {
  MatrixXd h(static_cast<Index>(history.size()), 6);
  for (std::size_t k = 0; k < history.size(); ++k) {
    const auto& r = history[k];
    h.row(static_cast<Index>(k)) << r.epoch, r.lr, r.train_loss, r.val_rmse.value_or(kAbsent),
        r.val_mae.value_or(kAbsent), r.val_mape.value_or(kAbsent);
  }
  return h;
}

std::optional<double> present(double v) { return std::isnan(v) ? std::nullopt : std::optional<double>(v); }

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const Model& m = ckpt.model;
  if (!m.has_scaling()) throw ContractError("save_checkpoint: model has no fitted scaling");
  std::vector<std::pair<std::string, MatrixXd>> tensors;
  for (std::size_t i = 0; i < m.params().size(); ++i) tensors.emplace_back(m.params().name(i), m.params().value(i));
  tensors.emplace_back("scaling/input_mean", m.input_scaling.mean);
  tensors.emplace_back("scaling/input_std", m.input_scaling.stddev);
  tensors.emplace_back("scaling/target_mean", m.target_scaling.mean);
  tensors.emplace_back("scaling/target_std", m.target_scaling.stddev);
  tensors.emplace_back("graph/adjacency", m.graph().adjacency().cast<double>());
  tensors.emplace_back("history", history_tensor(ckpt.history));

  const std::string text = config_text(ckpt);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp + "'");
    bin::Writer w(out);
    w.raw(kMagic, 8);
    w.u32(kVersion);
    w.u64(fnv1a(text));
    w.str(text);
    w.u64(tensors.size());
    for (const auto& [name, value] : tensors) {
      w.str(name);
      w.matrix(value);
    }
    out.flush();
    if (!out) throw ValidationError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ValidationError("cannot rename into '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  bin::Reader r(in, "checkpoint '" + path + "'");
  r.expect_magic(kMagic);
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw ValidationError(r.what() + ": unsupported version " + std::to_string(version));
  const std::uint64_t digest = r.u64();
  const std::string text = r.str();
  if (fnv1a(text) != digest) throw ValidationError(r.what() + ": config digest mismatch");
  std::istringstream text_in(text);
  const KeyValues kv = parse_key_values(text_in, r.what());

  ModelConfig mc;
  TrainConfig tc;
  int epoch = -1;
  std::string selection;
  std::vector<std::string> feature_names;
  for (const auto& [k, v] : kv) {
    if (set_model_option(mc, k, v) || set_train_option(tc, k, v)) continue;
    if (k == "epoch") {
      epoch = static_cast<int>(parse_int_option(k, v));
    } else if (k == "selection") {
      selection = v;
    } else if (k == "feature_names") {
      std::stringstream s(v);
      std::string f;
      while (std::getline(s, f, ',')) feature_names.push_back(f);
    } else {
      throw ValidationError(r.what() + ": unknown config key '" + k + "'");
    }
  }

  std::map<std::string, MatrixXd> tensors;
  const std::uint64_t count = r.count(1u << 20);
  for (std::uint64_t k = 0; k < count; ++k) {
    std::string name = r.str();
    tensors[name] = r.matrix();
  }
  auto take = [&](const std::string& name) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw ValidationError(r.what() + ": missing tensor '" + name + "'");
    MatrixXd v = std::move(it->second);
    tensors.erase(it);
    return v;
  };
  auto take_row = [&](const std::string& name) -> RowVectorXd {
    const MatrixXd v = take(name);
    if (v.rows() != 1) throw ValidationError(r.what() + ": tensor '" + name + "' is not a row vector");
    return v.row(0);
  };
  const MatrixXd adjacency = take("graph/adjacency");
  Model model(mc, RoadGraph(adjacency.cast<int>()));
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    const std::string& name = model.params().name(i);
    const MatrixXd v = take(name);
    if (v.rows() != model.params().value(i).rows() || v.cols() != model.params().value(i).cols()) {
      throw ValidationError(r.what() + ": tensor '" + name + "' has shape " + shape_string(v));
    }
    model.params().value(i) = v;
  }
  model.input_scaling = {take_row("scaling/input_mean"), take_row("scaling/input_std")};
  model.target_scaling = {take_row("scaling/target_mean"), take_row("scaling/target_std")};
  model.feature_names = feature_names;
  if (model.input_scaling.columns() != mc.features || model.target_scaling.columns() != 1) {
    throw ValidationError(r.what() + ": scaling does not match the feature count");
  }
  const MatrixXd h = take("history");
  if (h.cols() != 6) throw ValidationError(r.what() + ": history tensor has " + std::to_string(h.cols()) + " columns");
  if (!tensors.empty()) throw ValidationError(r.what() + ": unexpected tensor '" + tensors.begin()->first + "'");

  Checkpoint ckpt{std::move(model), tc, {}, epoch, selection};
  for (Index k = 0; k < h.rows(); ++k) {
    ckpt.history.push_back(
        {static_cast<int>(h(k, 0)), h(k, 1), h(k, 2), present(h(k, 3)), present(h(k, 4)), present(h(k, 5))});
  }
  return ckpt;
}

}  // namespace locgc
