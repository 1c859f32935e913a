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

#ifndef LOCGC_TEMPORAL_LSTM_HPP
#define LOCGC_TEMPORAL_LSTM_HPP

#include <array>
#include <cmath>
#include <vector>

#include "locgc/numerics/ops.hpp"

namespace locgc {

/// Gate order used by every per-gate array below.
enum Gate : int { kForget = 0, kInputGate = 1, kCandidate = 2, kOutputGate = 3 };

inline constexpr std::array<const char*, 4> kGateNames = {"f", "i", "C", "o"};

/// One LSTM layer. Rows are batch entries, so x_t is batch × F and the gate
/// pre-activation is x_t W_g + h_{t-1} V_g + b_g. No peepholes.
template <typename Scalar>
struct LSTMCellParams {
  std::array<Matrix<Scalar>, 4> input;      // W_g, F × H
  std::array<Matrix<Scalar>, 4> recurrent;  // V_g, H × H
  std::array<Matrix<Scalar>, 4> bias;       // b_g, 1 × H

  Index input_width() const { return input[0].rows(); }
  Index hidden() const { return recurrent[0].rows(); }

  static LSTMCellParams zeros(Index features, Index hidden) {
    LSTMCellParams p;
    for (int g = 0; g < 4; ++g) {
      p.input[g] = Matrix<Scalar>::Zero(features, hidden);
      p.recurrent[g] = Matrix<Scalar>::Zero(hidden, hidden);
      p.bias[g] = Matrix<Scalar>::Zero(1, hidden);
    }
    return p;
  }

  void validate() const {
    const Index f = input_width(), h = hidden();
    for (int g = 0; g < 4; ++g) {
      if (input[g].rows() != f || input[g].cols() != h || recurrent[g].rows() != h ||
          recurrent[g].cols() != h || bias[g].rows() != 1 || bias[g].cols() != h) {
        throw ShapeError(std::string("lstm: inconsistent shapes for gate ") + kGateNames[g]);
      }
    }
  }
};

template <typename Scalar>
struct LSTMState {
  Matrix<Scalar> h;
  Matrix<Scalar> c;

  static LSTMState zeros(Index rows, Index hidden) {
    return {Matrix<Scalar>::Zero(rows, hidden), Matrix<Scalar>::Zero(rows, hidden)};
  }
};

namespace detail {

template <typename Scalar>
Matrix<Scalar> logistic(const Matrix<Scalar>& z) {
  return z.unaryExpr([](Scalar v) { return Scalar(1) / (Scalar(1) + std::exp(-v)); });
}

}  // namespace detail

template <typename Scalar>
LSTMState<Scalar> lstm_cell_step(const Matrix<Scalar>& x, const LSTMState<Scalar>& state,
                                 const LSTMCellParams<Scalar>& p) {
  if (x.cols() != p.input_width() || state.h.cols() != p.hidden() || state.c.cols() != p.hidden() ||
      state.h.rows() != x.rows() || state.c.rows() != x.rows()) {
    throw ShapeError("lstm_cell_step: input " + shape_string(x) + ", state " + shape_string(state.h) +
                     ", weights " + shape_string(p.input[0]));
  }
  auto pre = [&](int g) -> Matrix<Scalar> {
    Matrix<Scalar> z = x * p.input[g];
    z.noalias() += state.h * p.recurrent[g];
    z.rowwise() += p.bias[g].row(0);
    return z;
  };
  const Matrix<Scalar> f = detail::logistic<Scalar>(pre(kForget));
  const Matrix<Scalar> i = detail::logistic<Scalar>(pre(kInputGate));
  const Matrix<Scalar> cand = pre(kCandidate).array().tanh().matrix();
  const Matrix<Scalar> o = detail::logistic<Scalar>(pre(kOutputGate));
  LSTMState<Scalar> next;
  next.c = f.cwiseProduct(state.c) + i.cwiseProduct(cand);
  next.h = o.cwiseProduct(next.c.array().tanh().matrix());
  return next;
}

/// Runs the stacked layers over steps[0..T) from zero states and returns the
/// top layer's last hidden state.
template <typename Scalar>
Matrix<Scalar> lstm_sequence(const std::vector<Matrix<Scalar>>& steps,
                             const std::vector<LSTMCellParams<Scalar>>& layers) {
  if (steps.empty()) throw ContractError("lstm_sequence: empty sequence");
  if (layers.empty()) throw ContractError("lstm_sequence: no layers");
  for (std::size_t l = 1; l < layers.size(); ++l) {
    if (layers[l].input_width() != layers[l - 1].hidden()) {
      throw ShapeError("lstm_sequence: layer " + std::to_string(l) + " expects width " +
                       std::to_string(layers[l].input_width()) + ", previous layer has " +
                       std::to_string(layers[l - 1].hidden()));
    }
  }
  const Index rows = steps.front().rows();
  std::vector<LSTMState<Scalar>> states;
  for (const auto& layer : layers) states.push_back(LSTMState<Scalar>::zeros(rows, layer.hidden()));
  for (const auto& x : steps) {
    const Matrix<Scalar>* in = &x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      states[l] = lstm_cell_step(*in, states[l], layers[l]);
      in = &states[l].h;
    }
  }
  return states.back().h;
}

// Recorded counterparts.

template <typename Scalar>
struct LSTMCellVars {
  std::array<Var<Scalar>, 4> input;
  std::array<Var<Scalar>, 4> recurrent;
  std::array<Var<Scalar>, 4> bias;
};

template <typename Scalar>
struct LSTMStateVars {
  Var<Scalar> h;
  Var<Scalar> c;
};

template <typename Scalar>
LSTMStateVars<Scalar> lstm_cell_step(const Var<Scalar>& x, const LSTMStateVars<Scalar>& state,
                                     const LSTMCellVars<Scalar>& p) {
  if (x.cols() != p.input[0].rows() || state.h.cols() != p.recurrent[0].rows() ||
      state.h.rows() != x.rows()) {
    throw ShapeError("lstm_cell_step: input " + shape_string(x.value()) + ", state " +
                     shape_string(state.h.value()) + ", weights " + shape_string(p.input[0].value()));
  }
  auto pre = [&](int g) {
    return add_bias(add(matmul(x, p.input[g]), matmul(state.h, p.recurrent[g])), p.bias[g]);
  };
  const Var<Scalar> f = sigmoid(pre(kForget));
  const Var<Scalar> i = sigmoid(pre(kInputGate));
  const Var<Scalar> cand = locgc::tanh(pre(kCandidate));
  const Var<Scalar> o = sigmoid(pre(kOutputGate));
  const Var<Scalar> c = add(multiply(f, state.c), multiply(i, cand));
  return {multiply(o, locgc::tanh(c)), c};
}

template <typename Scalar>
Var<Scalar> lstm_sequence(const std::vector<Var<Scalar>>& steps, const std::vector<LSTMCellVars<Scalar>>& layers) {
  if (steps.empty()) throw ContractError("lstm_sequence: empty sequence");
  if (layers.empty()) throw ContractError("lstm_sequence: no layers");
  Tape<Scalar>& tape = steps.front().tape();
  const Index rows = steps.front().rows();
  std::vector<LSTMStateVars<Scalar>> states;
  for (const auto& layer : layers) {
    const Index h = layer.recurrent[0].rows();
    states.push_back({tape.constant(Matrix<Scalar>::Zero(rows, h)), tape.constant(Matrix<Scalar>::Zero(rows, h))});
  }
  for (const auto& x : steps) {
    Var<Scalar> in = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      states[l] = lstm_cell_step(in, states[l], layers[l]);
      in = states[l].h;
    }
  }
  return states.back().h;
}

}  // namespace locgc

#endif  // LOCGC_TEMPORAL_LSTM_HPP
