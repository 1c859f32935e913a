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

#ifndef LOCGC_TRAINING_MODEL_HPP
#define LOCGC_TRAINING_MODEL_HPP

#include <string>
#include <vector>

#include "locgc/data/samples.hpp"
#include "locgc/encoding/encoding.hpp"
#include "locgc/graph/location_gcn.hpp"
#include "locgc/numerics/parameters.hpp"
#include "locgc/temporal/dense.hpp"
#include "locgc/temporal/lstm.hpp"
#include "locgc/training/config.hpp"

namespace locgc {

/// A batch in model layout: one (B·N)×F matrix per lag, row b·N + n holding
/// node n of the b-th sample, plus (B·N)×horizon targets. Both standardized.
struct Batch {
  std::vector<MatrixXd> steps;
  MatrixXd targets;
  Index size = 0;  // B
};

/// Loc-GCLSTM: per lag a Location-GCN over the nodes, then a stacked LSTM
/// shared by all nodes and a dense head to the horizon. The lstm kind skips
/// the GCN. Works in standardized units; predict() maps raw to raw.
///
/// Parameters: "gcn/W" (F × gcn_units), "gcn/mask" (N × N),
/// "lstm<l>/W_<g>", "lstm<l>/V_<g>", "lstm<l>/b_<g>" for gates f, i, C, o,
/// "dense/W" (units × horizon) and "dense/b".
class Model {
 public:
  Model(ModelConfig config, RoadGraph graph);

  /// Fresh parameters: U(±1/√fan_in) weights, zero biases, mask U[0.5, 1.5].
  static Model initialize(const ModelConfig& config, const RoadGraph& graph, Rng& rng);

  const ModelConfig& config() const { return config_; }
  const RoadGraph& graph() const { return graph_; }
  ParameterSet<double>& params() { return params_; }
  const ParameterSet<double>& params() const { return params_; }

  StandardizationParams input_scaling;   // per feature column
  StandardizationParams target_scaling;  // flow targets, one column
  std::vector<std::string> feature_names;

  /// Fits both scalers on the listed samples only.
  void fit_scaling(const SampleSet& samples, const std::vector<Index>& indices);
  bool has_scaling() const { return input_scaling.columns() > 0 && target_scaling.columns() == 1; }

  Batch make_batch(const SampleSet& samples, const std::vector<Index>& indices) const;

  /// Recorded forward pass on bound parameters; (B·N) × horizon standardized.
  Var<double> forward(Tape<double>& tape, const std::vector<Var<double>>& bound,
                      const std::vector<MatrixXd>& steps) const;
  /// Plain forward pass; same result as the recorded one.
  MatrixXd forward(const std::vector<MatrixXd>& steps) const;

  /// Standardized MSE plus bias_l2 · Σ(LSTM bias²).
  Var<double> loss(Tape<double>& tape, const std::vector<Var<double>>& bound, const Batch& batch,
                   double bias_l2) const;

  /// Raw nodes × (lags·F) input to raw nodes × horizon flow.
  MatrixXd predict(const Eigen::Ref<const MatrixXd>& input) const;
  /// Row s·N + n: node n of the s-th listed sample.
  MatrixXd predict_samples(const SampleSet& samples, const std::vector<Index>& indices, Index batch = 256) const;

  /// The location support at the current mask (N × N).
  MatrixXd support() const;
  /// Indices of the LSTM bias tensors in params().
  const std::vector<std::size_t>& lstm_bias_indices() const { return bias_indices_; }

  bool operator==(const Model& other) const;

 private:
  void add_parameters(Rng* rng);
  std::vector<LSTMCellParams<double>> lstm_layers() const;
  void check_input(const std::vector<MatrixXd>& steps) const;

  ModelConfig config_;
  RoadGraph graph_;
  ParameterSet<double> params_;
  std::vector<std::size_t> bias_indices_;
};

std::string lstm_param_name(int layer, char kind, int gate);

}  // namespace locgc

#endif  // LOCGC_TRAINING_MODEL_HPP
