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

#ifndef LOCGC_NUMERICS_OPS_HPP
#define LOCGC_NUMERICS_OPS_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "locgc/numerics/tape.hpp"

namespace locgc {

enum class OpKind {
  kMatmul,
  kAdd,
  kSub,
  kMultiply,
  kSigmoid,
  kTanh,
  kAbs,
  kConcatCols,
  kSum,
  kMean,
  kAddBias,
};

const char* op_name(OpKind kind);

namespace detail {

template <typename Scalar>
void same_tape(const Var<Scalar>& a, const Var<Scalar>& b, const char* op) {
  if (&a.tape() != &b.tape()) throw ContractError(std::string(op) + ": operands on different tapes");
}

template <typename Scalar>
void same_shape(const Var<Scalar>& a, const Var<Scalar>& b, const char* op) {
  same_tape(a, b, op);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": " + shape_string(a.value()) + " vs " +
                     shape_string(b.value()));
  }
}

}  // namespace detail

template <typename Scalar>
Var<Scalar> matmul(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::same_tape(a, b, "matmul");
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_string(a.value()) + " vs " + shape_string(b.value()));
  }
  Matrix<Scalar> out = a.value() * b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, "matmul", [ia, ib](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    if (t.requires_grad(ia)) t.accumulate(ia, g * t.value(ib).transpose());
    if (t.requires_grad(ib)) t.accumulate(ib, t.value(ia).transpose() * g);
  });
}

template <typename Scalar>
Var<Scalar> add(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::same_shape(a, b, "add");
  Matrix<Scalar> out = a.value() + b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, "add", [ia, ib](Tape<Scalar>& t, std::size_t self) {
    t.accumulate(ia, t.grad(self));
    t.accumulate(ib, t.grad(self));
  });
}

template <typename Scalar>
Var<Scalar> sub(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::same_shape(a, b, "sub");
  Matrix<Scalar> out = a.value() - b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, "sub", [ia, ib](Tape<Scalar>& t, std::size_t self) {
    t.accumulate(ia, t.grad(self));
    t.accumulate(ib, -t.grad(self));
  });
}

/// Elementwise product.
template <typename Scalar>
Var<Scalar> multiply(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::same_shape(a, b, "multiply");
  Matrix<Scalar> out = a.value().cwiseProduct(b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, "multiply", [ia, ib](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    if (t.requires_grad(ia)) t.accumulate(ia, g.cwiseProduct(t.value(ib)));
    if (t.requires_grad(ib)) t.accumulate(ib, g.cwiseProduct(t.value(ia)));
  });
}

template <typename Scalar>
Var<Scalar> scale(const Var<Scalar>& a, Scalar s) {
  Matrix<Scalar> out = s * a.value();
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, "scale", [ia, s](Tape<Scalar>& t, std::size_t self) {
    t.accumulate(ia, s * t.grad(self));
  });
}

/// a + 1·bias, with `bias` a single row broadcast over the rows of `a`.
template <typename Scalar>
Var<Scalar> add_bias(const Var<Scalar>& a, const Var<Scalar>& bias) {
  detail::same_tape(a, bias, "add_bias");
  if (bias.rows() != 1 || bias.cols() != a.cols()) {
    throw ShapeError("add_bias: " + shape_string(a.value()) + " vs " + shape_string(bias.value()));
  }
  Matrix<Scalar> out = a.value().rowwise() + bias.value().row(0);
  const std::size_t ia = a.id(), ib = bias.id();
  return a.tape().record(std::move(out), {a, bias}, "add_bias", [ia, ib](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    t.accumulate(ia, g);
    if (t.requires_grad(ib)) t.accumulate(ib, g.colwise().sum());
  });
}

template <typename Scalar>
Var<Scalar> sigmoid(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().unaryExpr([](Scalar x) { return Scalar(1) / (Scalar(1) + std::exp(-x)); });
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, "sigmoid", [ia](Tape<Scalar>& t, std::size_t self) {
    const auto& y = t.value(self);
    t.accumulate(ia, t.grad(self).cwiseProduct(y.cwiseProduct((Scalar(1) - y.array()).matrix())));
  });
}

template <typename Scalar>
Var<Scalar> tanh(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().array().tanh().matrix();
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, "tanh", [ia](Tape<Scalar>& t, std::size_t self) {
    const auto& y = t.value(self);
    t.accumulate(ia, t.grad(self).cwiseProduct((Scalar(1) - y.array().square()).matrix()));
  });
}

/// Elementwise |a|; the derivative at exactly zero is taken as zero.
template <typename Scalar>
Var<Scalar> abs(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().cwiseAbs();
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, "abs", [ia](Tape<Scalar>& t, std::size_t self) {
    const Matrix<Scalar> sign = t.value(ia).unaryExpr(
        [](Scalar x) { return x > Scalar(0) ? Scalar(1) : (x < Scalar(0) ? Scalar(-1) : Scalar(0)); });
    t.accumulate(ia, t.grad(self).cwiseProduct(sign));
  });
}

/// Horizontal concatenation [a_0 | a_1 | ...].
template <typename Scalar>
Var<Scalar> concat_cols(std::span<const Var<Scalar>> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no operands");
  const Index rows = parts.front().rows();
  Index cols = 0;
  for (const auto& p : parts) {
    detail::same_tape(parts.front(), p, "concat_cols");
    if (p.rows() != rows) {
      throw ShapeError("concat_cols: " + shape_string(parts.front().value()) + " vs " +
                       shape_string(p.value()));
    }
    cols += p.cols();
  }
  Matrix<Scalar> out(rows, cols);
  std::vector<std::size_t> ids;
  std::vector<Index> offsets;
  Index c = 0;
  for (const auto& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    ids.push_back(p.id());
    offsets.push_back(c);
    c += p.cols();
  }
  return parts.front().tape().record_range(
      std::move(out), parts.begin(), parts.end(), "concat_cols",
      [ids, offsets](Tape<Scalar>& t, std::size_t self) {
        const auto& g = t.grad(self);
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (t.requires_grad(ids[k])) t.accumulate(ids[k], g.middleCols(offsets[k], t.value(ids[k]).cols()));
        }
      });
}

template <typename Scalar>
Var<Scalar> sum(const Var<Scalar>& a) {
  Matrix<Scalar> out(1, 1);
  out(0, 0) = a.value().sum();
  const std::size_t ia = a.id();
  const Index r = a.rows(), c = a.cols();
  return a.tape().record(std::move(out), {a}, "sum", [ia, r, c](Tape<Scalar>& t, std::size_t self) {
    t.accumulate(ia, Matrix<Scalar>::Constant(r, c, t.grad(self)(0, 0)));
  });
}

template <typename Scalar>
Var<Scalar> mean(const Var<Scalar>& a) {
  const Scalar n = static_cast<Scalar>(a.value().size());
  Matrix<Scalar> out(1, 1);
  out(0, 0) = a.value().sum() / n;
  const std::size_t ia = a.id();
  const Index r = a.rows(), c = a.cols();
  return a.tape().record(std::move(out), {a}, "mean", [ia, r, c, n](Tape<Scalar>& t, std::size_t self) {
    t.accumulate(ia, Matrix<Scalar>::Constant(r, c, t.grad(self)(0, 0) / n));
  });
}

/// Divides each row by its sum. Callers guarantee non-zero row sums.
template <typename Scalar>
Var<Scalar> row_normalize(const Var<Scalar>& a) {
  const Vector<Scalar> sums = a.value().rowwise().sum();
  Matrix<Scalar> out = sums.cwiseInverse().asDiagonal() * a.value();
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, "row_normalize", [ia, sums](Tape<Scalar>& t, std::size_t self) {
    // d out_ij / d a_ik = (delta_jk - out_ij) / s_i
    const auto& g = t.grad(self);
    const auto& y = t.value(self);
    const Vector<Scalar> dot = g.cwiseProduct(y).rowwise().sum();
    Matrix<Scalar> da = g.colwise() - dot;
    t.accumulate(ia, sums.cwiseInverse().asDiagonal() * da);
  });
}

/// Applies the square `left` operator to every consecutive block of
/// left.rows() rows of `x`: out_b = left · x_b. This is how one N×N graph
/// support acts on a batch stacked as (batch·N)×F.
template <typename Scalar>
Var<Scalar> block_left_multiply(const Var<Scalar>& left, const Var<Scalar>& x) {
  detail::same_tape(left, x, "block_left_multiply");
  const Index n = left.rows();
  if (left.cols() != n || n == 0 || x.rows() % n != 0) {
    throw ShapeError("block_left_multiply: " + shape_string(left.value()) + " vs " +
                     shape_string(x.value()));
  }
  const Index blocks = x.rows() / n;
  Matrix<Scalar> out(x.rows(), x.cols());
  for (Index b = 0; b < blocks; ++b) {
    out.middleRows(b * n, n).noalias() = left.value() * x.value().middleRows(b * n, n);
  }
  const std::size_t il = left.id(), ix = x.id();
  return left.tape().record(std::move(out), {left, x}, "block_left_multiply",
                            [il, ix, n, blocks](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    if (t.requires_grad(il)) {
      Matrix<Scalar> dl = Matrix<Scalar>::Zero(n, n);
      for (Index b = 0; b < blocks; ++b) {
        dl.noalias() += g.middleRows(b * n, n) * t.value(ix).middleRows(b * n, n).transpose();
      }
      t.accumulate(il, dl);
    }
    if (t.requires_grad(ix)) {
      Matrix<Scalar> dx(g.rows(), g.cols());
      const auto& l = t.value(il);
      for (Index b = 0; b < blocks; ++b) {
        dx.middleRows(b * n, n).noalias() = l.transpose() * g.middleRows(b * n, n);
      }
      t.accumulate(ix, dx);
    }
  });
}

template <typename Scalar>
Var<Scalar> operator+(const Var<Scalar>& a, const Var<Scalar>& b) {
  return add(a, b);
}

template <typename Scalar>
Var<Scalar> operator-(const Var<Scalar>& a, const Var<Scalar>& b) {
  return sub(a, b);
}

/// Runs a primitive selected at run time. Arity and shape violations raise
/// ShapeError naming the kind.
template <typename Scalar>
Var<Scalar> primitive_forward(OpKind kind, std::span<const Var<Scalar>> in) {
  auto need = [&](std::size_t n) {
    if (in.size() != n) {
      throw ShapeError(std::string(op_name(kind)) + ": expected " + std::to_string(n) +
                       " operands, got " + std::to_string(in.size()));
    }
  };
  switch (kind) {
    case OpKind::kMatmul: need(2); return matmul(in[0], in[1]);
    case OpKind::kAdd: need(2); return add(in[0], in[1]);
    case OpKind::kSub: need(2); return sub(in[0], in[1]);
    case OpKind::kMultiply: need(2); return multiply(in[0], in[1]);
    case OpKind::kSigmoid: need(1); return sigmoid(in[0]);
    case OpKind::kTanh: need(1); return locgc::tanh(in[0]);
    case OpKind::kAbs: need(1); return locgc::abs(in[0]);
    case OpKind::kConcatCols: return concat_cols(in);
    case OpKind::kSum: need(1); return sum(in[0]);
    case OpKind::kMean: need(1); return mean(in[0]);
    case OpKind::kAddBias: need(2); return add_bias(in[0], in[1]);
  }
  throw ContractError("primitive_forward: unknown op kind");
}

inline const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMultiply: return "multiply";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kTanh: return "tanh";
    case OpKind::kAbs: return "abs";
    case OpKind::kConcatCols: return "concat_cols";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kAddBias: return "add_bias";
  }
  return "?";
}

}  // namespace locgc

#endif  // LOCGC_NUMERICS_OPS_HPP
