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

#ifndef LOCGC_TRAINING_TRAIN_HPP
#define LOCGC_TRAINING_TRAIN_HPP

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "locgc/data/samples.hpp"
#include "locgc/metrics/metrics.hpp"
#include "locgc/training/model.hpp"

namespace locgc {

struct EpochRecord {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;  // mean regularized loss over the epoch's batches
  std::optional<double> val_rmse;
  std::optional<double> val_mae;
  std::optional<double> val_mape;
};

struct TrainResult {
  Model final_model;
  Model best_model;  // lowest validation RMSE; the final model when there is no validation set
  int best_epoch = -1;
  std::vector<EpochRecord> history;
};

/// Called after every epoch; return false to stop early (used by tools only).
using EpochCallback = std::function<bool(const EpochRecord&)>;

/// Fits scaling on `train`, then runs RMSProp over shuffled mini-batches
/// with the warm-restart cosine schedule. Validation metrics are computed in
/// raw units on `validation` after every epoch.
///
/// Throws NumericError naming the epoch and batch on a non-finite loss.
TrainResult train(Model model, const SampleSet& samples, const std::vector<Index>& train,
                  const std::vector<Index>& validation, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = nullptr);

/// Raw-unit metrics of `model` on the listed samples.
MetricsReport evaluate_model(const Model& model, const SampleSet& samples, const std::vector<Index>& indices);

void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history);

}  // namespace locgc

#endif  // LOCGC_TRAINING_TRAIN_HPP
