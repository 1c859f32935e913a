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

#include "locgc/training/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "locgc/training/optim.hpp"

namespace locgc {

namespace {

// Shuffling has its own stream so it does not depend on how many draws
// initialization consumed.
constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ull;

}  // namespace

MetricsReport evaluate_model(const Model& model, const SampleSet& samples, const std::vector<Index>& indices) {
  if (indices.empty()) throw ContractError("evaluate_model: no samples");
  const MatrixXd pred = model.predict_samples(samples, indices);
  MatrixXd truth(pred.rows(), pred.cols());
  const Index n = samples.nodes();
  for (std::size_t k = 0; k < indices.size(); ++k) truth.middleRows(static_cast<Index>(k) * n, n) = samples.target(indices[k]);
  return evaluate(pred, truth);
}

TrainResult train(Model model, const SampleSet& samples, const std::vector<Index>& train_idx,
                  const std::vector<Index>& validation, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_idx.empty()) throw ValidationError("train: empty training set");
  model.fit_scaling(samples, train_idx);

  ParameterSet<double>& params = model.params();
  RMSProp<double> optimizer(params, cfg.rmsprop_rho, cfg.rmsprop_eps);
  Rng shuffle(cfg.seed ^ kShuffleStream);
  std::vector<Index> order = train_idx;

  TrainResult result{model, model, -1, {}};
  double best_rmse = std::numeric_limits<double>::infinity();
  Tape<double> tape;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = calra_lr(epoch, cfg.epochs, cfg.calra_cycles, cfg.lr_max, cfg.lr_min);
    shuffle.shuffle(order);
    double weighted_loss = 0;
    Index batch_no = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch_size), ++batch_no) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      const Batch batch = model.make_batch(samples, std::vector<Index>(order.begin() + begin, order.begin() + end));
      tape.clear();
      const std::vector<Var<double>> bound = params.bind(tape);
      const Var<double> loss = model.loss(tape, bound, batch, cfg.bias_l2);
      const double value = loss.value()(0, 0);
      if (!std::isfinite(value)) {
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_no));
      }
      backward(loss, tape, params);
      try {
        optimizer.step(params, rec.lr);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_no));
      }
      weighted_loss += value * static_cast<double>(end - begin);
    }
    rec.train_loss = weighted_loss / static_cast<double>(order.size());
    if (!validation.empty()) {
      const MetricsReport r = evaluate_model(model, samples, validation);
      rec.val_rmse = r.rmse;
      rec.val_mae = r.mae;
      rec.val_mape = r.mape;
      if (r.rmse < best_rmse) {
        best_rmse = r.rmse;
        result.best_model = model;
        result.best_epoch = epoch;
      }
    }
    result.history.push_back(rec);
    if (on_epoch && !on_epoch(rec)) break;
  }
  result.final_model = model;
  if (validation.empty()) {
    result.best_model = model;
    result.best_epoch = result.history.back().epoch;
  }
  return result;
}

void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "epoch,lr,train_loss,val_RMSE,val_MAE,val_MAPE\n";
  out.precision(10);
  for (const auto& r : history) {
    out << r.epoch << ',' << r.lr << ',' << r.train_loss << ',' << format_metric(r.val_rmse, 6) << ','
        << format_metric(r.val_mae, 6) << ',' << format_metric(r.val_mape, 6) << '\n';
  }
}

}  // namespace locgc
