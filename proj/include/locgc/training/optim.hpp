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

#ifndef LOCGC_TRAINING_OPTIM_HPP
#define LOCGC_TRAINING_OPTIM_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "locgc/numerics/ops.hpp"
#include "locgc/numerics/parameters.hpp"

namespace locgc {

/// Mean of squared differences over every entry.
template <typename Scalar>
Var<Scalar> mse_loss(const Var<Scalar>& pred, const Var<Scalar>& truth) {
  const Var<Scalar> d = sub(pred, truth);
  return mean(multiply(d, d));
}

/// lambda · Σ b² over the given tensors.
template <typename Scalar>
Var<Scalar> l2_penalty(const std::vector<Var<Scalar>>& tensors, Scalar lambda) {
  if (tensors.empty()) throw ContractError("l2_penalty: no tensors");
  Var<Scalar> total = sum(multiply(tensors.front(), tensors.front()));
  for (std::size_t k = 1; k < tensors.size(); ++k) total = add(total, sum(multiply(tensors[k], tensors[k])));
  return scale(total, lambda);
}

/// Running mean of squared gradients per parameter.
template <typename Scalar>
class RMSProp {
 public:
  explicit RMSProp(const ParameterSet<Scalar>& params, Scalar rho = Scalar(0.9), Scalar eps = Scalar(1e-7))
      : rho_(rho), eps_(eps) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      accum_.push_back(Matrix<Scalar>::Zero(params.value(i).rows(), params.value(i).cols()));
    }
  }

  /// accum ← ρ·accum + (1−ρ)·g²;  p ← p − lr·g / (√accum + ε).
  void step(ParameterSet<Scalar>& params, Scalar lr) {
    if (params.size() != accum_.size()) throw ShapeError("rmsprop: parameter count changed");
    for (std::size_t i = 0; i < params.size(); ++i) {
      const Matrix<Scalar>& g = params.grad(i);
      if (g.rows() != accum_[i].rows() || g.cols() != accum_[i].cols()) {
        throw ShapeError("rmsprop: gradient of '" + params.name(i) + "' has shape " + shape_string(g));
      }
      if (!g.allFinite()) throw NumericError("rmsprop: non-finite gradient for '" + params.name(i) + "'");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      const Matrix<Scalar>& g = params.grad(i);
      accum_[i] = rho_ * accum_[i] + (Scalar(1) - rho_) * g.cwiseProduct(g);
      params.value(i).array() -= lr * g.array() / (accum_[i].array().sqrt() + eps_);
    }
  }

  const Matrix<Scalar>& accumulator(std::size_t i) const { return accum_.at(i); }
  const std::vector<Matrix<Scalar>>& accumulators() const { return accum_; }

 private:
  Scalar rho_;
  Scalar eps_;
  std::vector<Matrix<Scalar>> accum_;
};

/// Cosine annealing inside one cycle of length `period`; t_cur = 0 gives
/// lr_max and t_cur = period gives lr_min, both exactly.
inline double cosine_annealing(double t_cur, double period, double lr_max, double lr_min) {
  const double w = 0.5 * (1.0 + std::cos(std::numbers::pi * t_cur / period));
  return w * lr_max + (1.0 - w) * lr_min;
}

/// Warm-restart schedule: `cycles` cosine cycles over `epochs` epochs.
inline double calra_lr(int epoch, int epochs, int cycles, double lr_max, double lr_min) {
  if (epochs < 1 || cycles < 1) throw ContractError("calra_lr: epochs and cycles must be >= 1");
  if (epoch < 0 || epoch >= epochs) throw ContractError("calra_lr: epoch " + std::to_string(epoch) + " out of range");
  const double period = static_cast<double>(epochs) / cycles;
  const double t_cur = std::fmod(static_cast<double>(epoch), period);
  return cosine_annealing(t_cur, period, lr_max, lr_min);
}

}  // namespace locgc

#endif  // LOCGC_TRAINING_OPTIM_HPP
