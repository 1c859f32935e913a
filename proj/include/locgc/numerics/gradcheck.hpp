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

#ifndef LOCGC_NUMERICS_GRADCHECK_HPP
#define LOCGC_NUMERICS_GRADCHECK_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "locgc/numerics/parameters.hpp"

namespace locgc {

/// Central-difference estimate (f(p+h) - f(p-h)) / 2h for every scalar entry
/// of every parameter. `f` must be deterministic.
template <typename Scalar>
std::vector<Matrix<Scalar>> finite_difference_gradient(
    const std::function<Scalar(const ParameterSet<Scalar>&)>& f, const ParameterSet<Scalar>& params,
    Scalar h) {
  if (!(h > Scalar(0))) throw ContractError("finite_difference_gradient: step must be positive");
  ParameterSet<Scalar> probe = params;
  std::vector<Matrix<Scalar>> out;
  out.reserve(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    Matrix<Scalar>& v = probe.value(p);
    Matrix<Scalar> g(v.rows(), v.cols());
    for (Index k = 0; k < v.size(); ++k) {
      const Scalar saved = v.data()[k];
      v.data()[k] = saved + h;
      const Scalar up = f(probe);
      v.data()[k] = saved - h;
      const Scalar down = f(probe);
      v.data()[k] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericError("finite_difference_gradient: non-finite evaluation at '" +
                           params.name(p) + "'[" + std::to_string(k) + "]");
      }
      g.data()[k] = (up - down) / (Scalar(2) * h);
    }
    out.push_back(std::move(g));
  }
  return out;
}

/// |a - b| / max(|a|, |b|, floor). Central differences with h = 1e-6 carry
/// ~1e-10 of round-off, so entries whose true gradient is near zero are
/// compared against the floor instead of against themselves.
template <typename Scalar>
Scalar relative_error(Scalar a, Scalar b, Scalar floor = Scalar(1e-4)) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar max_relative_error(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b,
                                             typename DerivedA::Scalar floor = 1e-4) {
  using S = typename DerivedA::Scalar;
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("max_relative_error: " + shape_string(a) + " vs " + shape_string(b));
  }
  S worst = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) worst = std::max(worst, relative_error<S>(a(i, j), b(i, j), floor));
  }
  return worst;
}

}  // namespace locgc

#endif  // LOCGC_NUMERICS_GRADCHECK_HPP
