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

#include "locgc/training/model.hpp"

#include <algorithm>

#include "locgc/training/optim.hpp"

namespace locgc {

std::string lstm_param_name(int layer, char kind, int gate) {
  return "lstm" + std::to_string(layer) + "/" + kind + "_" + kGateNames[gate];
}

Model::Model(ModelConfig config, RoadGraph graph) : config_(std::move(config)), graph_(std::move(graph)) {
  config_.validate();
  if (graph_.node_count() != config_.nodes) {
    throw ValidationError("model: graph has " + std::to_string(graph_.node_count()) + " nodes, config says " +
                          std::to_string(config_.nodes));
  }
  add_parameters(nullptr);
}

Model Model::initialize(const ModelConfig& config, const RoadGraph& graph, Rng& rng) {
  Model m(config, graph);
  m.params_ = ParameterSet<double>();
  m.bias_indices_.clear();
  m.add_parameters(&rng);
  return m;
}

void Model::add_parameters(Rng* rng) {
  auto weight = [&](Index rows, Index cols) -> MatrixXd {
    return rng ? fan_in_uniform<double>(rows, cols, rows, *rng) : MatrixXd::Zero(rows, cols);
  };
  Index width = config_.features;
  if (config_.kind == ModelKind::kLocGCLSTM) {
    params_.add("gcn/W", weight(config_.features, config_.gcn_units));
    params_.add("gcn/mask", rng ? LocationMask<double>::initial(config_.nodes, *rng).weights
                                : MatrixXd::Ones(config_.nodes, config_.nodes));
    width = config_.gcn_units;
  }
  const Index units = config_.lstm_units;
  for (int l = 0; l < config_.lstm_layers; ++l) {
    const Index in = l == 0 ? width : units;
    for (int g = 0; g < 4; ++g) params_.add(lstm_param_name(l, 'W', g), weight(in, units));
    for (int g = 0; g < 4; ++g) params_.add(lstm_param_name(l, 'V', g), weight(units, units));
    for (int g = 0; g < 4; ++g) {
      bias_indices_.push_back(params_.add(lstm_param_name(l, 'b', g), MatrixXd::Zero(1, units)));
    }
  }
  params_.add("dense/W", weight(units, config_.horizon));
  params_.add("dense/b", MatrixXd::Zero(1, config_.horizon));
}

void Model::fit_scaling(const SampleSet& samples, const std::vector<Index>& indices) {
  if (samples.nodes() != config_.nodes || samples.features() != config_.features || samples.lags() != config_.lags ||
      samples.horizon() != config_.horizon) {
    throw ValidationError("model: sample dimensions do not match the model configuration");
  }
  if (indices.empty()) throw ContractError("fit_scaling: no samples");
  StandardizationAccumulator in(config_.features);
  StandardizationAccumulator out(1);
  for (Index s : indices) {
    const auto x = samples.input(s);
    in.add(Eigen::Map<const MatrixXd>(x.data(), config_.nodes * config_.lags, config_.features));
    const auto y = samples.target(s);
    out.add(Eigen::Map<const MatrixXd>(y.data(), config_.nodes * config_.horizon, 1));
  }
  input_scaling = in.finish();
  target_scaling = out.finish();
  feature_names = samples.feature_names();
}

Batch Model::make_batch(const SampleSet& samples, const std::vector<Index>& indices) const {
  if (!has_scaling()) throw ContractError("model: scaling has not been fitted");
  const Index n = config_.nodes, f = config_.features;
  Batch b;
  b.size = static_cast<Index>(indices.size());
  b.steps.assign(config_.lags, MatrixXd(b.size * n, f));
  b.targets.resize(b.size * n, config_.horizon);
  const RowVectorXd inv_std = input_scaling.stddev.cwiseInverse();
  for (Index k = 0; k < b.size; ++k) {
    const auto x = samples.input(indices[k]);
    const auto y = samples.target(indices[k]);
    for (Index node = 0; node < n; ++node) {
      for (Index t = 0; t < config_.lags; ++t) {
        b.steps[t].row(k * n + node) =
            (x.row(node).segment(t * f, f) - input_scaling.mean).cwiseProduct(inv_std);
      }
      b.targets.row(k * n + node) =
          (y.row(node).array() - target_scaling.mean(0)) / target_scaling.stddev(0);
    }
  }
  return b;
}

void Model::check_input(const std::vector<MatrixXd>& steps) const {
  if (static_cast<Index>(steps.size()) != config_.lags) {
    throw ShapeError("model: " + std::to_string(steps.size()) + " steps, expected " + std::to_string(config_.lags));
  }
  for (const auto& s : steps) {
    if (s.cols() != config_.features || s.rows() == 0 || s.rows() % config_.nodes != 0 ||
        s.rows() != steps.front().rows()) {
      throw ShapeError("model: step block " + shape_string(s) + " for " + std::to_string(config_.nodes) +
                       " nodes and " + std::to_string(config_.features) + " features");
    }
  }
}

Var<double> Model::forward(Tape<double>& tape, const std::vector<Var<double>>& bound,
                           const std::vector<MatrixXd>& steps) const {
  check_input(steps);
  if (bound.size() != params_.size()) throw ContractError("model: bound parameter count mismatch");
  auto p = [&](const std::string& name) -> const Var<double>& { return bound[params_.index(name)]; };
  std::vector<Var<double>> seq;
  if (config_.kind == ModelKind::kLocGCLSTM) {
    const Var<double> support = location_support(graph_, p("gcn/mask"), config_.normalization);
    for (const auto& x : steps) seq.push_back(gcn_forward(tape.constant(x), support, p("gcn/W"), config_.gcn_steps));
  } else {
    for (const auto& x : steps) seq.push_back(tape.constant(x));
  }
  std::vector<LSTMCellVars<double>> layers(config_.lstm_layers);
  for (int l = 0; l < config_.lstm_layers; ++l) {
    for (int g = 0; g < 4; ++g) {
      layers[l].input[g] = p(lstm_param_name(l, 'W', g));
      layers[l].recurrent[g] = p(lstm_param_name(l, 'V', g));
      layers[l].bias[g] = p(lstm_param_name(l, 'b', g));
    }
  }
  return dense_forward(lstm_sequence(seq, layers), p("dense/W"), p("dense/b"));
}

std::vector<LSTMCellParams<double>> Model::lstm_layers() const {
  std::vector<LSTMCellParams<double>> layers(config_.lstm_layers);
  for (int l = 0; l < config_.lstm_layers; ++l) {
    for (int g = 0; g < 4; ++g) {
      layers[l].input[g] = params_.value(lstm_param_name(l, 'W', g));
      layers[l].recurrent[g] = params_.value(lstm_param_name(l, 'V', g));
      layers[l].bias[g] = params_.value(lstm_param_name(l, 'b', g));
    }
  }
  return layers;
}

MatrixXd Model::support() const {
  if (config_.kind != ModelKind::kLocGCLSTM) throw ContractError("model: the lstm kind has no graph support");
  return location_support(graph_, params_.value("gcn/mask"), config_.normalization);
}

MatrixXd Model::forward(const std::vector<MatrixXd>& steps) const {
  check_input(steps);
  std::vector<MatrixXd> seq;
  if (config_.kind == ModelKind::kLocGCLSTM) {
    const MatrixXd s = support();
    const GCNLayerParams<double> gcn{params_.value("gcn/W"), config_.gcn_steps};
    for (const auto& x : steps) seq.push_back(gcn_forward<double>(x, s, gcn));
  } else {
    seq = steps;
  }
  const MatrixXd h = lstm_sequence(seq, lstm_layers());
  return dense_forward(h, DenseHead<double>{params_.value("dense/W"), params_.value("dense/b")});
}

Var<double> Model::loss(Tape<double>& tape, const std::vector<Var<double>>& bound, const Batch& batch,
                        double bias_l2) const {
  const Var<double> pred = forward(tape, bound, batch.steps);
  if (pred.rows() != batch.targets.rows() || pred.cols() != batch.targets.cols()) {
    throw ShapeError("loss: prediction " + shape_string(pred.value()) + " vs target " + shape_string(batch.targets));
  }
  Var<double> total = mse_loss(pred, tape.constant(batch.targets));
  if (bias_l2 > 0) {
    std::vector<Var<double>> biases;
    for (std::size_t i : bias_indices_) biases.push_back(bound[i]);
    total = add(total, l2_penalty(biases, bias_l2));
  }
  return total;
}

MatrixXd Model::predict(const Eigen::Ref<const MatrixXd>& input) const {
  if (!has_scaling()) throw ContractError("model: scaling has not been fitted");
  const Index f = config_.features;
  if (input.rows() != config_.nodes || input.cols() != config_.lags * f) {
    throw ShapeError("model: input " + shape_string(input) + ", expected " +
                     shape_string(config_.nodes, config_.lags * f));
  }
  const RowVectorXd inv_std = input_scaling.stddev.cwiseInverse();
  std::vector<MatrixXd> steps(config_.lags, MatrixXd(config_.nodes, f));
  for (Index t = 0; t < config_.lags; ++t) {
    for (Index n = 0; n < config_.nodes; ++n) {
      steps[t].row(n) = (input.row(n).segment(t * f, f) - input_scaling.mean).cwiseProduct(inv_std);
    }
  }
  return (forward(steps).array() * target_scaling.stddev(0) + target_scaling.mean(0)).matrix();
}

MatrixXd Model::predict_samples(const SampleSet& samples, const std::vector<Index>& indices, Index batch) const {
  MatrixXd out(static_cast<Index>(indices.size()) * config_.nodes, config_.horizon);
  for (std::size_t begin = 0; begin < indices.size(); begin += static_cast<std::size_t>(batch)) {
    const std::size_t end = std::min(indices.size(), begin + static_cast<std::size_t>(batch));
    const Batch b = make_batch(samples, std::vector<Index>(indices.begin() + begin, indices.begin() + end));
    out.middleRows(static_cast<Index>(begin) * config_.nodes, b.targets.rows()) =
        (forward(b.steps).array() * target_scaling.stddev(0) + target_scaling.mean(0)).matrix();
  }
  return out;
}

bool Model::operator==(const Model& other) const {
  return config_ == other.config_ && graph_ == other.graph_ && params_ == other.params_ &&
         input_scaling == other.input_scaling && target_scaling == other.target_scaling &&
         feature_names == other.feature_names;
}

}  // namespace locgc
