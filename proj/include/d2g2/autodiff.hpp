/*
 * Copyright 2026 The d2g2 Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "d2g2/graph.hpp"

#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

// Minimal reverse-mode automatic differentiation over dense double matrices.
// A Tape records every operation; backward() walks it in reverse and
// accumulates adjoints. Row vectors are 1 x k matrices throughout.
namespace d2g2::ad {

class Tape;

struct Var {
  std::size_t id = 0;
  Tape* tape = nullptr;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& grad_out)>;

  // A non-recording tape evaluates values only (inference mode).
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }

  Var constant(Matrix v) { return push(std::move(v), nullptr, false); }
  Var constant_ref(const Matrix& v) { return push(Matrix(), &v, false); }
  Var constant_ref(Matrix&&) = delete;
  // Borrowed leaf whose adjoint is kept; v must outlive the tape.
  Var param(const Matrix& v) { return push(Matrix(), &v, record_); }
  Var param(Matrix&&) = delete;

  const Matrix& value(Var x) const { return value(x.id); }
  const Matrix& value(std::size_t id) const {
    const auto& n = nodes_[id];
    return n.borrowed ? *n.borrowed : n.own;
  }
  bool requires_grad(Var x) const { return nodes_[x.id].requires_grad; }

  // Adjoint of x after backward(); zero matrix of the right shape if x did not
  // influence the output.
  Matrix grad(Var x) const {
    const auto& n = nodes_[x.id];
    if (n.grad.size() == 0) return Matrix::Zero(value(x).rows(), value(x).cols());
    return n.grad;
  }

  void backward(Var out) {
    if (!record_) throw std::logic_error("backward() on a non-recording tape");
    const Matrix& v = value(out);
    if (v.rows() != 1 || v.cols() != 1) throw DimensionError("backward() needs a scalar output");
    for (auto& n : nodes_) n.grad.resize(0, 0);
    nodes_[out.id].grad = Matrix::Ones(1, 1);
    for (std::size_t k = nodes_.size(); k-- > 0;) {
      auto& n = nodes_[k];
      if (!n.backward || n.grad.size() == 0) continue;
      const Matrix g = n.grad;
      n.backward(*this, g);
    }
  }

  void accumulate(std::size_t id, const Matrix& g) {
    auto& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0)
      n.grad = g;
    else
      n.grad += g;
  }

  // Records the result of an operation on `inputs`.
  Var record(Matrix value, std::initializer_list<Var> inputs, Backward bw) {
    bool rg = false;
    if (record_)
      for (const Var& in : inputs) rg = rg || nodes_[in.id].requires_grad;
    Var out = push(std::move(value), nullptr, rg);
    if (rg) nodes_[out.id].backward = std::move(bw);
    return out;
  }
  Var record_many(Matrix value, const std::vector<Var>& inputs, Backward bw) {
    bool rg = false;
    if (record_)
      for (const Var& in : inputs) rg = rg || nodes_[in.id].requires_grad;
    Var out = push(std::move(value), nullptr, rg);
    if (rg) nodes_[out.id].backward = std::move(bw);
    return out;
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix own;
    const Matrix* borrowed = nullptr;
    Matrix grad;
    bool requires_grad = false;
    Backward backward;
  };

  Var push(Matrix v, const Matrix* borrowed, bool requires_grad) {
    Node n;
    n.own = std::move(v);
    n.borrowed = borrowed;
    n.requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1, this};
  }

  bool record_;
  std::vector<Node> nodes_;
};

inline const Matrix& val(Var x) { return x.tape->value(x); }

namespace detail {
inline void check_same(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
}
}  // namespace detail

inline Var matmul(Var a, Var b) {
  const Matrix& A = val(a);
  const Matrix& B = val(b);
  if (A.cols() != B.rows())
    throw DimensionError("matmul: inner dimensions " + std::to_string(A.cols()) + " and " +
                         std::to_string(B.rows()) + " differ");
  return a.tape->record(A * B, {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) t.accumulate(a.id, g * t.value(b).transpose());
    if (t.requires_grad(b)) t.accumulate(b.id, t.value(a).transpose() * g);
  });
}

// a + b; a 1 x k row vector b is broadcast over the rows of a.
inline Var add(Var a, Var b) {
  const Matrix& A = val(a);
  const Matrix& B = val(b);
  if (B.rows() == 1 && A.rows() != 1 && B.cols() == A.cols()) {
    return a.tape->record(A.rowwise() + B.row(0), {a, b}, [a, b](Tape& t, const Matrix& g) {
      t.accumulate(a.id, g);
      if (t.requires_grad(b)) t.accumulate(b.id, g.colwise().sum());
    });
  }
  detail::check_same(A, B, "add");
  return a.tape->record(A + B, {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a.id, g);
    t.accumulate(b.id, g);
  });
}

inline Var sub(Var a, Var b) {
  detail::check_same(val(a), val(b), "sub");
  return a.tape->record(val(a) - val(b), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a.id, g);
    t.accumulate(b.id, -g);
  });
}

inline Var mul(Var a, Var b) {
  detail::check_same(val(a), val(b), "mul");
  return a.tape->record(val(a).cwiseProduct(val(b)), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) t.accumulate(a.id, g.cwiseProduct(t.value(b)));
    if (t.requires_grad(b)) t.accumulate(b.id, g.cwiseProduct(t.value(a)));
  });
}

inline Var scale(Var a, double s) {
  return a.tape->record(val(a) * s, {a}, [a, s](Tape& t, const Matrix& g) { t.accumulate(a.id, g * s); });
}

inline Var tanh(Var a) {
  Matrix y = val(a).array().tanh().matrix();
  Matrix yc = y;
  return a.tape->record(std::move(y), {a}, [a, yc = std::move(yc)](Tape& t, const Matrix& g) {
    t.accumulate(a.id, g.cwiseProduct((1.0 - yc.array().square()).matrix()));
  });
}

inline Matrix sigmoid_of(const Matrix& x) {
  return x.unaryExpr([](double v) {
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

inline Var sigmoid(Var a) {
  Matrix y = sigmoid_of(val(a));
  Matrix yc = y;
  return a.tape->record(std::move(y), {a}, [a, yc = std::move(yc)](Tape& t, const Matrix& g) {
    t.accumulate(a.id, g.cwiseProduct(yc.cwiseProduct((1.0 - yc.array()).matrix())));
  });
}

inline Var exp(Var a) {
  Matrix y = val(a).array().exp().matrix();
  Matrix yc = y;
  return a.tape->record(std::move(y), {a}, [a, yc = std::move(yc)](Tape& t, const Matrix& g) {
    t.accumulate(a.id, g.cwiseProduct(yc));
  });
}

// Elementwise clamp; the adjoint is zero where the input was clipped.
inline Var clamp(Var a, double lo, double hi) {
  const Matrix& x = val(a);
  Matrix y = x.cwiseMax(lo).cwiseMin(hi);
  return a.tape->record(std::move(y), {a}, [a, lo, hi](Tape& t, const Matrix& g) {
    const Matrix& x = t.value(a);
    Matrix m = g;
    for (Eigen::Index k = 0; k < m.size(); ++k)
      if (x(k) < lo || x(k) > hi) m(k) = 0.0;
    t.accumulate(a.id, m);
  });
}

inline Var sum(Var a) {
  Matrix y(1, 1);
  y(0, 0) = val(a).sum();
  return a.tape->record(std::move(y), {a}, [a](Tape& t, const Matrix& g) {
    const Matrix& x = t.value(a);
    t.accumulate(a.id, Matrix::Constant(x.rows(), x.cols(), g(0, 0)));
  });
}

inline Var transpose(Var a) {
  return a.tape->record(val(a).transpose(), {a},
                        [a](Tape& t, const Matrix& g) { t.accumulate(a.id, g.transpose()); });
}

// Horizontal concatenation of blocks sharing a row count.
inline Var hcat(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("hcat: no inputs");
  Tape* tp = parts.front().tape;
  const Eigen::Index rows = val(parts.front()).rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (val(p).rows() != rows) throw DimensionError("hcat: row counts differ");
    cols += val(p).cols();
  }
  Matrix y(rows, cols);
  Eigen::Index off = 0;
  for (const Var& p : parts) {
    y.middleCols(off, val(p).cols()) = val(p);
    off += val(p).cols();
  }
  return tp->record_many(std::move(y), parts, [parts](Tape& t, const Matrix& g) {
    Eigen::Index off = 0;
    for (const Var& p : parts) {
      const Eigen::Index c = t.value(p).cols();
      if (t.requires_grad(p)) t.accumulate(p.id, g.middleCols(off, c));
      off += c;
    }
  });
}

inline Var cols(Var a, Eigen::Index start, Eigen::Index count) {
  const Matrix& x = val(a);
  if (start < 0 || count < 0 || start + count > x.cols()) throw DimensionError("cols: range out of bounds");
  return a.tape->record(x.middleCols(start, count), {a}, [a, start, count](Tape& t, const Matrix& g) {
    const Matrix& x = t.value(a);
    Matrix full = Matrix::Zero(x.rows(), x.cols());
    full.middleCols(start, count) = g;
    t.accumulate(a.id, full);
  });
}

inline Var row(Var a, Eigen::Index r) {
  const Matrix& x = val(a);
  if (r < 0 || r >= x.rows()) throw DimensionError("row: index out of bounds");
  return a.tape->record(x.row(r), {a}, [a, r](Tape& t, const Matrix& g) {
    const Matrix& x = t.value(a);
    Matrix full = Matrix::Zero(x.rows(), x.cols());
    full.row(r) = g;
    t.accumulate(a.id, full);
  });
}

// Row-major reinterpretation: element k of the flattened input lands at
// (k / cols, k % cols).
inline Var reshape(Var a, Eigen::Index rows, Eigen::Index cols_) {
  const Matrix& x = val(a);
  if (rows * cols_ != x.size()) throw DimensionError("reshape: element count differs");
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor xr = x;
  Matrix y = Eigen::Map<const RowMajor>(xr.data(), rows, cols_);
  return a.tape->record(std::move(y), {a}, [a](Tape& t, const Matrix& g) {
    const Matrix& x = t.value(a);
    RowMajor gr = g;
    Matrix back = Eigen::Map<const RowMajor>(gr.data(), x.rows(), x.cols());
    t.accumulate(a.id, back);
  });
}

// Mean over the rows selected by mask; zero row when nothing is selected.
inline Var masked_mean_rows(Var a, const std::vector<bool>& mask) {
  const Matrix& x = val(a);
  if (static_cast<Eigen::Index>(mask.size()) != x.rows()) throw DimensionError("masked_mean_rows: mask length");
  Eigen::Index k = 0;
  Matrix y = Matrix::Zero(1, x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (mask[i]) {
      y += x.row(i);
      ++k;
    }
  const double inv = k > 0 ? 1.0 / static_cast<double>(k) : 0.0;
  y *= inv;
  return a.tape->record(std::move(y), {a}, [a, mask, inv](Tape& t, const Matrix& g) {
    const Matrix& x = t.value(a);
    Matrix full = Matrix::Zero(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (mask[i]) full.row(i) = g * inv;
    t.accumulate(a.id, full);
  });
}

// M * h for a constant matrix M.
inline Var lmul_const(const Matrix& m, Var h) {
  if (m.cols() != val(h).rows()) throw DimensionError("lmul_const: inner dimensions differ");
  Matrix mc = m;
  return h.tape->record(m * val(h), {h}, [h, mc = std::move(mc)](Tape& t, const Matrix& g) {
    t.accumulate(h.id, mc.transpose() * g);
  });
}

// S * h with S the row-normalised complete graph without self loops,
// S = (J - I) / (n - 1). Evaluated in O(n k) instead of forming S.
inline Var complete_mix(Var h) {
  const Matrix& x = val(h);
  const Eigen::Index n = x.rows();
  if (n <= 1) return h.tape->record(Matrix::Zero(x.rows(), x.cols()), {h}, [](Tape&, const Matrix&) {});
  const double inv = 1.0 / static_cast<double>(n - 1);
  Matrix y = ((-x).rowwise() + x.colwise().sum()) * inv;
  return h.tape->record(std::move(y), {h}, [h, inv](Tape& t, const Matrix& g) {
    // S is symmetric, so the adjoint applies S again.
    t.accumulate(h.id, ((-g).rowwise() + g.colwise().sum()) * inv);
  });
}

// (a + a^T) / 2
inline Var symmetrize(Var a) {
  const Matrix& x = val(a);
  if (x.rows() != x.cols()) throw DimensionError("symmetrize: matrix not square");
  return a.tape->record(0.5 * (x + x.transpose()), {a}, [a](Tape& t, const Matrix& g) {
    t.accumulate(a.id, 0.5 * (g + g.transpose()));
  });
}

inline Var zero_diagonal(Var a) {
  Matrix y = val(a);
  y.diagonal().setZero();
  return a.tape->record(std::move(y), {a}, [a](Tape& t, const Matrix& g) {
    Matrix m = g;
    m.diagonal().setZero();
    t.accumulate(a.id, m);
  });
}

// Sum of w * (softplus(l) - y * l): Bernoulli negative log-likelihood on logits.
inline Var bce_with_logits(Var logits, const Matrix& targets, const Matrix& weights) {
  const Matrix& l = val(logits);
  detail::check_same(l, targets, "bce_with_logits");
  detail::check_same(l, weights, "bce_with_logits");
  double s = 0.0;
  for (Eigen::Index k = 0; k < l.size(); ++k) {
    if (weights(k) == 0.0) continue;
    const double v = l(k);
    const double softplus = v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
    s += weights(k) * (softplus - targets(k) * v);
  }
  Matrix y(1, 1);
  y(0, 0) = s;
  Matrix tc = targets, wc = weights;
  return logits.tape->record(std::move(y), {logits},
                             [logits, tc = std::move(tc), wc = std::move(wc)](Tape& t, const Matrix& g) {
                               const Matrix p = sigmoid_of(t.value(logits));
                               t.accumulate(logits.id, (g(0, 0) * wc.cwiseProduct(p - tc)));
                             });
}

// Sum of w * (0.5 (pred - target)^2 + 0.5 ln(2 pi)): unit-variance Gaussian NLL.
inline Var gaussian_nll(Var pred, const Matrix& targets, const Matrix& weights) {
  const Matrix& p = val(pred);
  detail::check_same(p, targets, "gaussian_nll");
  detail::check_same(p, weights, "gaussian_nll");
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const Matrix diff = p - targets;
  Matrix y(1, 1);
  y(0, 0) = (weights.array() * (0.5 * diff.array().square() + half_log_2pi)).sum();
  Matrix tc = targets, wc = weights;
  return pred.tape->record(std::move(y), {pred},
                           [pred, tc = std::move(tc), wc = std::move(wc)](Tape& t, const Matrix& g) {
                             t.accumulate(pred.id, g(0, 0) * wc.cwiseProduct(t.value(pred) - tc));
                           });
}

// KL( N(mean, exp(logvar)) || N(0, I) ) summed over all entries.
inline Var kl_standard_normal(Var mean, Var logvar) {
  const Matrix& m = val(mean);
  const Matrix& lv = val(logvar);
  detail::check_same(m, lv, "kl_standard_normal");
  Matrix y(1, 1);
  y(0, 0) = 0.5 * (lv.array().exp() + m.array().square() - 1.0 - lv.array()).sum();
  return mean.tape->record(std::move(y), {mean, logvar}, [mean, logvar](Tape& t, const Matrix& g) {
    const double s = g(0, 0);
    if (t.requires_grad(mean)) t.accumulate(mean.id, s * t.value(mean));
    if (t.requires_grad(logvar))
      t.accumulate(logvar.id, (0.5 * s) * (t.value(logvar).array().exp() - 1.0).matrix());
  });
}

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }

}  // namespace d2g2::ad
