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

#include "locgc/metrics/predictions.hpp"

#include <algorithm>
#include <iomanip>

#include "locgc/data/series.hpp"

namespace locgc {

PredictionSet predict_samples(const SampleSet& samples, const std::vector<Index>& indices,
                              const Predictor& predictor) {
  if (indices.empty()) throw ContractError("predict_samples: no samples listed");
  PredictionSet p;
  p.nodes = samples.nodes();
  p.samples = indices;
  const Index rows = static_cast<Index>(indices.size()) * p.nodes;
  p.pred.resize(rows, samples.horizon());
  p.truth.resize(rows, samples.horizon());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index s = indices[k];
    const MatrixXd out = predictor(samples.input(s));
    if (out.rows() != p.nodes || out.cols() != samples.horizon()) {
      throw ShapeError("predictor returned " + shape_string(out) + ", expected " +
                       shape_string(p.nodes, samples.horizon()));
    }
    const Index r = static_cast<Index>(k) * p.nodes;
    p.pred.middleRows(r, p.nodes) = out;
    p.truth.middleRows(r, p.nodes) = samples.target(s);
    p.start_times.push_back(samples.start_time(s));
  }
  return p;
}

MetricsReport evaluate(const PredictionSet& p) { return evaluate(p.pred, p.truth); }

std::vector<MetricsReport> evaluate_per_node(const PredictionSet& p) {
  std::vector<MetricsReport> out;
  const Index count = p.pred.rows() / p.nodes;
  for (Index n = 0; n < p.nodes; ++n) {
    MatrixXd pred(count, p.pred.cols()), truth(count, p.pred.cols());
    for (Index k = 0; k < count; ++k) {
      pred.row(k) = p.pred.row(k * p.nodes + n);
      truth.row(k) = p.truth.row(k * p.nodes + n);
    }
    out.push_back(evaluate(pred, truth));
  }
  return out;
}

void write_prediction_pairs(std::ostream& out, const PredictionSet& p) {
  out << "start,node,step,prediction,truth\n" << std::setprecision(10);
  for (Index r = 0; r < p.pred.rows(); ++r) {
    const std::string start = format_timestamp(p.start_times[r / p.nodes]);
    for (Index h = 0; h < p.pred.cols(); ++h) {
      out << start << ',' << r % p.nodes << ',' << h + 1 << ',' << p.pred(r, h) << ',' << p.truth(r, h) << '\n';
    }
  }
}

void write_prediction_svg(std::ostream& out, const PredictionSet& p, Index node, Index step) {
  if (node < 0 || node >= p.nodes || step < 0 || step >= p.pred.cols()) {
    throw ContractError("write_prediction_svg: node or step out of range");
  }
  const Index count = p.pred.rows() / p.nodes;
  std::vector<Index> order(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return p.start_times[a] < p.start_times[b]; });
  double lo = std::min(p.pred.col(step).minCoeff(), p.truth.col(step).minCoeff());
  double hi = std::max(p.pred.col(step).maxCoeff(), p.truth.col(step).maxCoeff());
  if (hi <= lo) hi = lo + 1;
  constexpr double kW = 800, kH = 300, kPad = 20;
  auto polyline = [&](const MatrixXd& m, const char* colour) {
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
    for (Index k = 0; k < count; ++k) {
      const double x = kPad + (kW - 2 * kPad) * (count > 1 ? static_cast<double>(k) / (count - 1) : 0.5);
      const double y = kH - kPad - (kH - 2 * kPad) * (m(order[k] * p.nodes + node, step) - lo) / (hi - lo);
      out << x << ',' << y << ' ';
    }
    out << "\"/>\n";
  };
  out << std::fixed << std::setprecision(1);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  polyline(p.truth, "black");
  polyline(p.pred, "red");
  out << "<text x=\"" << kPad << "\" y=\"14\" font-size=\"12\">node " << node << ", step " << step + 1
      << ": truth (black), prediction (red)</text>\n</svg>\n";
}

}  // namespace locgc
