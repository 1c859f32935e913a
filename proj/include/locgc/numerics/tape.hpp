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

#ifndef LOCGC_NUMERICS_TAPE_HPP
#define LOCGC_NUMERICS_TAPE_HPP

#include <deque>
#include <functional>
#include <initializer_list>
#include <string>
#include <utility>

#include "locgc/core.hpp"

namespace locgc {

template <typename Scalar>
class Tape;

/// Handle to a matrix recorded on a Tape. Cheap to copy; only valid while the
/// owning tape is alive and not cleared.
template <typename Scalar>
class Var {
 public:
  Var() = default;

  const Matrix<Scalar>& value() const { return tape_->value(id_); }
  const Matrix<Scalar>& grad() const { return tape_->grad(id_); }
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }

  Tape<Scalar>& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape<Scalar>;
  Var(Tape<Scalar>* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape<Scalar>* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Linear record of executed primitives. backward() walks the record once in
/// reverse, calling each node's pullback; gradients of a node consumed more
/// than once accumulate additively.
template <typename Scalar>
class Tape {
 public:
  using Pullback = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<Scalar> constant(Matrix<Scalar> value) {
    return push(std::move(value), false, "constant", {});
  }

  Var<Scalar> variable(Matrix<Scalar> value) {
    return push(std::move(value), true, "variable", {});
  }

  /// Leaf tied to entry `index` of a parameter container identified by `owner`.
  Var<Scalar> parameter(Matrix<Scalar> value, const void* owner, std::size_t index) {
    Var<Scalar> v = push(std::move(value), true, "parameter", {});
    nodes_.back().owner = owner;
    nodes_.back().param_index = index;
    return v;
  }

  /// Appends the result of a primitive. The pullback is kept only when some
  /// input needs a gradient.
  Var<Scalar> record(Matrix<Scalar> value, std::initializer_list<Var<Scalar>> inputs,
                     const char* op, Pullback pullback) {
    bool needs = false;
    for (const auto& in : inputs) needs = needs || nodes_.at(in.id()).requires_grad;
    return push(std::move(value), needs, op, needs ? std::move(pullback) : Pullback{});
  }

  template <typename It>
  Var<Scalar> record_range(Matrix<Scalar> value, It first, It last, const char* op,
                           Pullback pullback) {
    bool needs = false;
    for (; first != last; ++first) needs = needs || nodes_.at(first->id()).requires_grad;
    return push(std::move(value), needs, op, needs ? std::move(pullback) : Pullback{});
  }

  const Matrix<Scalar>& value(std::size_t id) const { return nodes_.at(id).value; }

  /// Gradient of the last backward() target with respect to node `id`.
  /// Nodes the target does not depend on report an all-zero gradient.
  const Matrix<Scalar>& grad(std::size_t id) const {
    const Node& n = nodes_.at(id);
    if (n.grad.size() == 0) {
      n.grad = Matrix<Scalar>::Zero(n.value.rows(), n.value.cols());
    }
    return n.grad;
  }

  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  bool has_grad(std::size_t id) const { return nodes_.at(id).grad.size() != 0; }
  const char* op(std::size_t id) const { return nodes_.at(id).op; }

  template <typename Derived>
  void accumulate(std::size_t id, const Eigen::MatrixBase<Derived>& g) {
    Node& n = nodes_.at(id);
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  /// Reverse sweep from a scalar. Clears gradients from any previous sweep
  /// first, so repeated calls give identical results.
  void backward(const Var<Scalar>& loss) {
    if (loss.rows() != 1 || loss.cols() != 1) {
      throw ContractError("backward: loss must be scalar, got " + shape_string(loss.value()));
    }
    for (auto& n : nodes_) n.grad.resize(0, 0);
    nodes_.at(loss.id()).grad = Matrix<Scalar>::Ones(1, 1);
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.pullback && n.grad.size() != 0) n.pullback(*this, i);
    }
  }

  /// Calls fn(param_index, grad) for every parameter leaf owned by `owner`.
  template <typename Fn>
  void for_each_parameter(const void* owner, Fn&& fn) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      if (n.owner == owner) fn(n.param_index, grad(i));
    }
  }

  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    Matrix<Scalar> value;
    mutable Matrix<Scalar> grad;
    Pullback pullback;
    bool requires_grad = false;
    const char* op = "";
    const void* owner = nullptr;
    std::size_t param_index = 0;
  };

  Var<Scalar> push(Matrix<Scalar> value, bool requires_grad, const char* op, Pullback pullback) {
    Node n;
    n.value = std::move(value);
    n.pullback = std::move(pullback);
    n.requires_grad = requires_grad;
    n.op = op;
    nodes_.push_back(std::move(n));
    return Var<Scalar>(this, nodes_.size() - 1);
  }

  // deque keeps references returned by value() stable while recording.
  std::deque<Node> nodes_;
};

}  // namespace locgc

#endif  // LOCGC_NUMERICS_TAPE_HPP
