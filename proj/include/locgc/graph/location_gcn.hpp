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

#ifndef LOCGC_GRAPH_LOCATION_GCN_HPP
#define LOCGC_GRAPH_LOCATION_GCN_HPP

#include <string>

#include "locgc/graph/road_graph.hpp"
#include "locgc/numerics/ops.hpp"
#include "locgc/numerics/random.hpp"

namespace locgc {

/// Source of the degree matrix D in D^-1 (|W_mask| ∘ (A + E)).
enum class Normalization {
  kDynamic,  // row sums of the masked matrix; rows stay stochastic
  kStatic,   // row degrees of the unmasked A + E
};

Normalization parse_normalization(const std::string& text);
std::string to_string(Normalization mode);

/// A masked row whose entries all fall below the degeneracy threshold.
class DegenerateRowError : public NumericError {
 public:
  explicit DegenerateRowError(Index node)
      : NumericError("location support: masked row of node " + std::to_string(node) +
                     " is degenerate (row sum below threshold)"),
        node_(node) {}
  Index node() const { return node_; }

 private:
  Index node_;
};

inline constexpr double kDegenerateRowThreshold = 1e-12;

/// Trainable N×N influence weights. Only entries on the (A + E) pattern
/// matter; the sign of an entry never does.
template <typename Scalar>
struct LocationMask {
  Matrix<Scalar> weights;

  static LocationMask ones(Index n) { return {Matrix<Scalar>::Ones(n, n)}; }

  /// Uniform in [0.5, 1.5]: random, away from zero.
  static LocationMask initial(Index n, Rng& rng) {
    Matrix<Scalar> w(n, n);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(rng.uniform(0.5, 1.5));
    return {std::move(w)};
  }
};

/// D^-1 (A + E).
template <typename Scalar>
Matrix<Scalar> normalized_support(const RoadGraph& graph) {
  Matrix<Scalar> m = graph.with_self_loops<Scalar>();
  const Vector<Scalar> degree = m.rowwise().sum();
  return degree.cwiseInverse().asDiagonal() * m;
}

/// D^-1 (|W_mask| ∘ (A + E)) with D chosen by `mode`.
template <typename Derived>
Matrix<typename Derived::Scalar> location_support(const RoadGraph& graph,
                                                  const Eigen::MatrixBase<Derived>& mask,
                                                  Normalization mode) {
  using Scalar = typename Derived::Scalar;
  const Index n = graph.node_count();
  if (mask.rows() != n || mask.cols() != n) {
    throw ShapeError("location_support: mask " + shape_string(mask) + " vs graph " + shape_string(n, n));
  }
  const Matrix<Scalar> pattern = graph.with_self_loops<Scalar>();
  Matrix<Scalar> masked = mask.cwiseAbs().cwiseProduct(pattern);
  if (mode == Normalization::kStatic) {
    const Vector<Scalar> degree = pattern.rowwise().sum();
    return degree.cwiseInverse().asDiagonal() * masked;
  }
  const Vector<Scalar> sums = masked.rowwise().sum();
  for (Index i = 0; i < n; ++i) {
    if (!(sums(i) >= Scalar(kDegenerateRowThreshold))) throw DegenerateRowError(i);
  }
  return sums.cwiseInverse().asDiagonal() * masked;
}

/// Recorded version; differentiable with respect to `mask`.
template <typename Scalar>
Var<Scalar> location_support(const RoadGraph& graph, const Var<Scalar>& mask, Normalization mode) {
  const Index n = graph.node_count();
  if (mask.rows() != n || mask.cols() != n) {
    throw ShapeError("location_support: mask " + shape_string(mask.value()) + " vs graph " +
                     shape_string(n, n));
  }
  Tape<Scalar>& tape = mask.tape();
  const Matrix<Scalar> pattern = graph.with_self_loops<Scalar>();
  if (mode == Normalization::kStatic) {
    return multiply(locgc::abs(mask), tape.constant(normalized_support<Scalar>(graph)));
  }
  Var<Scalar> masked = multiply(locgc::abs(mask), tape.constant(pattern));
  const Vector<Scalar> sums = masked.value().rowwise().sum();
  for (Index i = 0; i < n; ++i) {
    if (!(sums(i) >= Scalar(kDegenerateRowThreshold))) throw DegenerateRowError(i);
  }
  return row_normalize(masked);
}

template <typename Scalar>
struct GCNLayerParams {
  Matrix<Scalar> weight;  // F_in × F_out, shared across propagation steps
  int steps = 1;
};

namespace detail {

inline void check_gcn(Index support_rows, Index support_cols, Index x_rows, Index x_cols,
                      Index w_rows, Index w_cols, int steps) {
  if (steps < 1) throw ContractError("gcn_forward: steps must be >= 1, got " + std::to_string(steps));
  if (steps > 1 && w_rows != w_cols) {
    throw ShapeError("gcn_forward: steps > 1 needs a square weight, got " + shape_string(w_rows, w_cols));
  }
  if (support_rows != support_cols || support_rows == 0 || x_rows % support_rows != 0) {
    throw ShapeError("gcn_forward: support " + shape_string(support_rows, support_cols) + " vs input " +
                     shape_string(x_rows, x_cols));
  }
  if (x_cols != w_rows) {
    throw ShapeError("gcn_forward: input " + shape_string(x_rows, x_cols) + " vs weight " +
                     shape_string(w_rows, w_cols));
  }
}

}  // namespace detail

/// H_0 = X, H_l = S H_{l-1} W for l = 1..steps.
///
/// `x` may hold several graphs stacked vertically (batch·N rows); the support
/// then acts on each N-row block independently.
template <typename Scalar>
Matrix<Scalar> gcn_forward(const Matrix<Scalar>& x, const Matrix<Scalar>& support,
                           const GCNLayerParams<Scalar>& params) {
  detail::check_gcn(support.rows(), support.cols(), x.rows(), x.cols(), params.weight.rows(),
                    params.weight.cols(), params.steps);
  const Index n = support.rows();
  Matrix<Scalar> h = x;
  for (int step = 0; step < params.steps; ++step) {
    Matrix<Scalar> mixed(h.rows(), h.cols());
    for (Index b = 0; b < h.rows() / n; ++b) {
      mixed.middleRows(b * n, n).noalias() = support * h.middleRows(b * n, n);
    }
    h = mixed * params.weight;
  }
  return h;
}

template <typename Scalar>
Var<Scalar> gcn_forward(const Var<Scalar>& x, const Var<Scalar>& support, const Var<Scalar>& weight,
                        int steps) {
  detail::check_gcn(support.rows(), support.cols(), x.rows(), x.cols(), weight.rows(), weight.cols(),
                    steps);
  Var<Scalar> h = x;
  for (int step = 0; step < steps; ++step) h = matmul(block_left_multiply(support, h), weight);
  return h;
}

}  // namespace locgc

#endif  // LOCGC_GRAPH_LOCATION_GCN_HPP
