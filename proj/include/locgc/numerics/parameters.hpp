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

#ifndef LOCGC_NUMERICS_PARAMETERS_HPP
#define LOCGC_NUMERICS_PARAMETERS_HPP

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "locgc/numerics/random.hpp"
#include "locgc/numerics/tape.hpp"

namespace locgc {

/// Named trainable matrices with matching gradient slots, kept in insertion
/// order so that iteration (and therefore serialization and optimizer state)
/// is deterministic.
template <typename Scalar>
class ParameterSet {
 public:
  std::size_t add(const std::string& name, Matrix<Scalar> value) {
    if (index_.count(name)) throw ContractError("parameter '" + name + "' already defined");
    index_.emplace(name, names_.size());
    names_.push_back(name);
    grads_.push_back(Matrix<Scalar>::Zero(value.rows(), value.cols()));
    values_.push_back(std::move(value));
    return names_.size() - 1;
  }

  std::size_t size() const { return names_.size(); }
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ContractError("unknown parameter '" + name + "'");
    return it->second;
  }

  const std::string& name(std::size_t i) const { return names_.at(i); }

  Matrix<Scalar>& value(std::size_t i) { return values_.at(i); }
  const Matrix<Scalar>& value(std::size_t i) const { return values_.at(i); }
  Matrix<Scalar>& value(const std::string& name) { return values_[index(name)]; }
  const Matrix<Scalar>& value(const std::string& name) const { return values_[index(name)]; }

  const Matrix<Scalar>& grad(std::size_t i) const { return grads_.at(i); }
  Matrix<Scalar>& grad(std::size_t i) { return grads_.at(i); }
  const Matrix<Scalar>& grad(const std::string& name) const { return grads_[index(name)]; }

  /// Replaces a value; the shape must not change.
  void assign(const std::string& name, const Matrix<Scalar>& v) {
    Matrix<Scalar>& dst = value(name);
    if (dst.rows() != v.rows() || dst.cols() != v.cols()) {
      throw ShapeError("parameter '" + name + "': " + shape_string(dst) + " vs " + shape_string(v));
    }
    dst = v;
  }

  void zero_grad() {
    for (auto& g : grads_) g.setZero();
  }

  Index scalar_count() const {
    Index n = 0;
    for (const auto& v : values_) n += v.size();
    return n;
  }

  /// Records every parameter as a leaf on `tape`.
  std::vector<Var<Scalar>> bind(Tape<Scalar>& tape) const {
    std::vector<Var<Scalar>> vars;
    vars.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) vars.push_back(tape.parameter(values_[i], this, i));
    return vars;
  }

  bool operator==(const ParameterSet& other) const {
    return names_ == other.names_ && values_ == other.values_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Matrix<Scalar>> values_;
  std::vector<Matrix<Scalar>> grads_;
  std::map<std::string, std::size_t> index_;
};

/// Runs the reverse sweep from `loss` and writes the gradient of every
/// parameter of `params` bound on `tape`. Parameters the loss does not reach
/// end up with zero gradient.
template <typename Scalar>
void backward(const Var<Scalar>& loss, Tape<Scalar>& tape, ParameterSet<Scalar>& params) {
  tape.backward(loss);
  params.zero_grad();
  tape.for_each_parameter(&params, [&](std::size_t i, const Matrix<Scalar>& g) { params.grad(i) += g; });
}

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
template <typename Scalar>
Matrix<Scalar> fan_in_uniform(Index rows, Index cols, Index fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix<Scalar> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(rng.uniform(-bound, bound));
  return m;
}

template <typename Scalar>
Matrix<Scalar> uniform_matrix(Index rows, Index cols, double lo, double hi, Rng& rng) {
  Matrix<Scalar> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(rng.uniform(lo, hi));
  return m;
}

}  // namespace locgc

#endif  // LOCGC_NUMERICS_PARAMETERS_HPP
