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

#include "locgc/baselines/baselines.hpp"

#include <Eigen/Cholesky>

namespace locgc {

MatrixXd LinearModel::predict(const Eigen::Ref<const MatrixXd>& x) const {
  if (x.cols() != coef.rows()) {
    throw ShapeError("linear predict: input " + shape_string(x) + " vs coefficients " + shape_string(coef));
  }
  return (x * coef).rowwise() + intercept;
}

LinearModel fit_linear(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const MatrixXd>& y, double ridge) {
  if (x.rows() != y.rows()) throw ShapeError("fit_linear: " + shape_string(x) + " vs " + shape_string(y));
  if (x.rows() < 2) throw ContractError("fit_linear: need at least 2 rows");
  if (!x.allFinite() || !y.allFinite()) throw NumericError("fit_linear: non-finite training data");
  const RowVectorXd x_mean = x.colwise().mean();
  const RowVectorXd y_mean = y.colwise().mean();
  const MatrixXd xc = x.rowwise() - x_mean;
  const MatrixXd yc = y.rowwise() - y_mean;
  MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += ridge;
  const Eigen::LDLT<MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw NumericError("fit_linear: normal equations could not be factorized");
  LinearModel m;
  m.coef = ldlt.solve(xc.transpose() * yc);
  if (!m.coef.allFinite()) throw NumericError("fit_linear: singular system");
  m.intercept = y_mean - x_mean * m.coef;
  return m;
}

LinearMode parse_linear_mode(const std::string& text) {
  if (text == "per-node") return LinearMode::kPerNode;
  if (text == "global") return LinearMode::kGlobal;
  throw ValidationError("linear mode must be 'per-node' or 'global', got '" + text + "'");
}

namespace {

// Per-node rows stacked, or one flattened row per sample.
MatrixXd design_rows(const Eigen::Ref<const MatrixXd>& input, LinearMode mode) {
  if (mode == LinearMode::kPerNode) return input;
  MatrixXd row(1, input.size());
  row = input.reshaped<Eigen::RowMajor>(1, input.size());
  return row;
}

}  // namespace

MatrixXd LinearBaseline::predict(const Eigen::Ref<const MatrixXd>& input) const {
  if (models.empty()) throw ContractError("linear baseline is not fitted");
  if (mode == LinearMode::kPerNode) {
    if (input.rows() != static_cast<Index>(models.size())) {
      throw ShapeError("linear baseline: " + std::to_string(input.rows()) + " nodes, model has " +
                       std::to_string(models.size()));
    }
    const MatrixXd z = zscore_apply(input, input_scaling);
    MatrixXd out(input.rows(), models.front().coef.cols());
    for (Index n = 0; n < input.rows(); ++n) out.row(n) = models[n].predict(z.row(n));
    return out;
  }
  const MatrixXd z = zscore_apply(design_rows(input, mode), input_scaling);
  const MatrixXd flat = models.front().predict(z);
  const Index nodes = input.rows();
  return flat.reshaped<Eigen::RowMajor>(nodes, flat.cols() / nodes);
}

LinearBaseline fit_linear_baseline(const SampleSet& samples, const std::vector<Index>& train, LinearMode mode) {
  if (train.size() < 2) throw ContractError("linear baseline: need at least 2 training samples");
  const Index nodes = samples.nodes();
  const Index width = samples.input_width();
  const Index horizon = samples.horizon();
  const Index n_train = static_cast<Index>(train.size());
  LinearBaseline b;
  b.mode = mode;
  if (mode == LinearMode::kPerNode) {
    std::vector<MatrixXd> x(nodes, MatrixXd(n_train, width));
    std::vector<MatrixXd> y(nodes, MatrixXd(n_train, horizon));
    MatrixXd pooled(n_train * nodes, width);
    for (Index r = 0; r < n_train; ++r) {
      const auto in = samples.input(train[r]);
      const auto out = samples.target(train[r]);
      for (Index n = 0; n < nodes; ++n) {
        x[n].row(r) = in.row(n);
        y[n].row(r) = out.row(n);
        pooled.row(r * nodes + n) = in.row(n);
      }
    }
    // One scaling shared by all nodes so a single transform serves predict().
    b.input_scaling = zscore_fit(pooled);
    for (Index n = 0; n < nodes; ++n) b.models.push_back(fit_linear(zscore_apply(x[n], b.input_scaling), y[n]));
  } else {
    MatrixXd x(n_train, nodes * width);
    MatrixXd y(n_train, nodes * horizon);
    for (Index r = 0; r < n_train; ++r) {
      x.row(r) = design_rows(samples.input(train[r]), mode);
      y.row(r) = samples.target(train[r]).reshaped<Eigen::RowMajor>(1, nodes * horizon);
    }
    b.input_scaling = zscore_fit(x);
    b.models.push_back(fit_linear(zscore_apply(x, b.input_scaling), y));
  }
  return b;
}

MatrixXd persistence_predict(const Eigen::Ref<const MatrixXd>& input, Index lags, Index features, Index horizon) {
  if (lags < 1 || features < 1 || input.cols() != lags * features) {
    throw ShapeError("persistence: input " + shape_string(input) + " does not hold " + std::to_string(lags) +
                     " lags of " + std::to_string(features) + " features");
  }
  return input.col((lags - 1) * features).replicate(1, horizon);
}

}  // namespace locgc
