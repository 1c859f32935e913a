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

#ifndef LOCGC_METRICS_PREDICTIONS_HPP
#define LOCGC_METRICS_PREDICTIONS_HPP

#include <functional>
#include <ostream>
#include <vector>

#include "locgc/data/samples.hpp"
#include "locgc/metrics/metrics.hpp"

namespace locgc {

/// Maps one sample's input block (nodes × lags·features) to nodes × horizon
/// predictions in raw flow units.
using Predictor = std::function<MatrixXd(const Eigen::Ref<const MatrixXd>& input)>;

/// Predictions and truth for a list of samples, stacked sample-major:
/// row s·nodes + n holds node n of the s-th listed sample.
struct PredictionSet {
  Index nodes = 0;
  std::vector<Index> samples;
  std::vector<std::int64_t> start_times;
  MatrixXd pred;
  MatrixXd truth;
};

PredictionSet predict_samples(const SampleSet& samples, const std::vector<Index>& indices, const Predictor& predictor);

/// Pooled over every node, horizon and sample.
MetricsReport evaluate(const PredictionSet& p);

/// One report per node.
std::vector<MetricsReport> evaluate_per_node(const PredictionSet& p);

/// CSV of sample start, node, horizon step, prediction and truth.
void write_prediction_pairs(std::ostream& out, const PredictionSet& p);

/// Minimal SVG line chart of one node's one-step-ahead prediction and truth.
void write_prediction_svg(std::ostream& out, const PredictionSet& p, Index node, Index step = 0);

}  // namespace locgc

#endif  // LOCGC_METRICS_PREDICTIONS_HPP
