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

#ifndef LOCGC_NUMERICS_TENSOR_HPP
#define LOCGC_NUMERICS_TENSOR_HPP

#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "locgc/core.hpp"

namespace locgc {

/// Dense row-major N-d array of scalars. Used for blocks that are not plain
/// matrices (sample cubes, checkpoint entries); rank-2 tensors convert to and
/// from Matrix without copying through as_matrix().
template <typename Scalar>
class Tensor {
 public:
  using Shape = std::vector<Index>;

  Tensor() = default;

  explicit Tensor(Shape shape, Scalar fill = Scalar(0)) : shape_(std::move(shape)) {
    check_shape(shape_);
    data_ = Vector<Scalar>::Constant(element_count(shape_), fill);
  }

  Tensor(Shape shape, Vector<Scalar> data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (data_.size() != element_count(shape_)) {
      throw ShapeError("tensor: data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_text(shape_));
    }
  }

  template <typename Derived>
  static Tensor from_matrix(const Eigen::MatrixBase<Derived>& m) {
    Tensor t({m.rows(), m.cols()});
    t.as_matrix() = m;
    return t;
  }

  const Shape& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index size() const { return data_.size(); }
  Index dim(Index axis) const { return shape_.at(static_cast<std::size_t>(axis)); }

  std::span<Scalar> values() { return {data_.data(), static_cast<std::size_t>(data_.size())}; }
  std::span<const Scalar> values() const {
    return {data_.data(), static_cast<std::size_t>(data_.size())};
  }
  const Vector<Scalar>& data() const { return data_; }

  template <typename... Idx>
  Scalar& operator()(Idx... idx) {
    return data_[offset({static_cast<Index>(idx)...})];
  }
  template <typename... Idx>
  const Scalar& operator()(Idx... idx) const {
    return data_[offset({static_cast<Index>(idx)...})];
  }

  /// Rank-2 view. Higher ranks are viewed as [dim0 x rest].
  Eigen::Map<Matrix<Scalar>> as_matrix() {
    return {data_.data(), leading(), data_.size() / std::max<Index>(leading(), 1)};
  }
  Eigen::Map<const Matrix<Scalar>> as_matrix() const {
    return {data_.data(), leading(), data_.size() / std::max<Index>(leading(), 1)};
  }

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

  static Index element_count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
  }

  static std::string shape_text(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }

 private:
  static void check_shape(const Shape& shape) {
    for (Index d : shape) {
      if (d <= 0) throw ShapeError("tensor: non-positive dimension in " + shape_text(shape));
    }
  }

  Index leading() const { return shape_.empty() ? 1 : shape_.front(); }

  Index offset(std::initializer_list<Index> idx) const {
    if (static_cast<std::size_t>(idx.size()) != shape_.size()) {
      throw ShapeError("tensor: index rank " + std::to_string(idx.size()) +
                       " does not match " + shape_text(shape_));
    }
    Index off = 0;
    std::size_t axis = 0;
    for (Index i : idx) {
      off = off * shape_[axis] + i;
      ++axis;
    }
    return off;
  }

  Shape shape_;
  Vector<Scalar> data_;
};

using TensorXd = Tensor<double>;

}  // namespace locgc

#endif  // LOCGC_NUMERICS_TENSOR_HPP
