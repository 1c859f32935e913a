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

#ifndef LOCGC_BASELINES_BASELINES_HPP
#define LOCGC_BASELINES_BASELINES_HPP

#include <string>
#include <vector>

#include "locgc/core.hpp"
#include "locgc/data/samples.hpp"
#include "locgc/encoding/encoding.hpp"

namespace locgc {

inline constexpr double kLinearRidge = 1e-8;

/// y = x·coef + intercept for a row x; several outputs at once.
struct LinearModel {
  MatrixXd coef;          // inputs × outputs
  RowVectorXd intercept;  // 1 × outputs

  MatrixXd predict(const Eigen::Ref<const MatrixXd>& x) const;
};

/// Least squares with intercept: solves the centred normal equations with a
/// small ridge term. Throws NumericError when the system cannot be solved.
LinearModel fit_linear(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const MatrixXd>& y,
                       double ridge = kLinearRidge);

enum class LinearMode {
  kPerNode,  // one model per node over its own lag block
  kGlobal,   // one model over every node's lags at once
};

LinearMode parse_linear_mode(const std::string& text);

/// Regression baseline over standardized lag blocks.
struct LinearBaseline {
  LinearMode mode = LinearMode::kPerNode;
  StandardizationParams input_scaling;  // per input column of the lag block
  std::vector<LinearModel> models;      // per node, or a single global model

  MatrixXd predict(const Eigen::Ref<const MatrixXd>& input) const;  // nodes × horizon
};

/// Fits on the listed samples only.
LinearBaseline fit_linear_baseline(const SampleSet& samples, const std::vector<Index>& train,
                                   LinearMode mode = LinearMode::kPerNode);

/// Repeats each node's last observed flow over the horizon. Flow is
/// feature 0 of every lag.
MatrixXd persistence_predict(const Eigen::Ref<const MatrixXd>& input, Index lags, Index features, Index horizon);

}  // namespace locgc

#endif  // LOCGC_BASELINES_BASELINES_HPP
