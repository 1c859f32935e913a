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

#ifndef LOCGC_TEMPORAL_DENSE_HPP
#define LOCGC_TEMPORAL_DENSE_HPP

#include "locgc/numerics/ops.hpp"

namespace locgc {

inline constexpr Index kHorizon = 12;

/// Linear map from the last hidden state to the prediction horizon.
template <typename Scalar>
struct DenseHead {
  Matrix<Scalar> weight;  // H × horizon
  Matrix<Scalar> bias;    // 1 × horizon

  static DenseHead zeros(Index hidden, Index horizon = kHorizon) {
    return {Matrix<Scalar>::Zero(hidden, horizon), Matrix<Scalar>::Zero(1, horizon)};
  }
};

/// y = h W + b, one row per batch entry, no activation.
template <typename Scalar>
Matrix<Scalar> dense_forward(const Matrix<Scalar>& h, const DenseHead<Scalar>& head) {
  if (h.cols() != head.weight.rows() || head.bias.rows() != 1 || head.bias.cols() != head.weight.cols()) {
    throw ShapeError("dense_forward: hidden " + shape_string(h) + " vs weight " + shape_string(head.weight));
  }
  Matrix<Scalar> y = h * head.weight;
  y.rowwise() += head.bias.row(0);
  return y;
}

template <typename Scalar>
Var<Scalar> dense_forward(const Var<Scalar>& h, const Var<Scalar>& weight, const Var<Scalar>& bias) {
  return add_bias(matmul(h, weight), bias);
}

}  // namespace locgc

#endif  // LOCGC_TEMPORAL_DENSE_HPP
