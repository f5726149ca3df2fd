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

#include "d2g2/autodiff.hpp"
#include "d2g2/rng.hpp"

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

namespace d2g2 {

enum class Activation { tanh, identity };

inline const char* to_string(Activation a) { return a == Activation::tanh ? "tanh" : "identity"; }

// Maps parameter matrices to tape leaves, one leaf per matrix per tape.
class Binder {
 public:
  explicit Binder(ad::Tape& tape) : tape_(&tape) {}

  ad::Var operator()(const Matrix& m) {
    auto it = leaves_.find(&m);
    if (it != leaves_.end()) return it->second;
    ad::Var v = tape_->param(m);
    leaves_.emplace(&m, v);
    return v;
  }

  // Adjoint of a bound parameter; zeros if it never entered the computation.
  Matrix grad(const Matrix& m) const {
    auto it = leaves_.find(&m);
    if (it == leaves_.end()) return Matrix::Zero(m.rows(), m.cols());
    return tape_->grad(it->second);
  }

  ad::Tape& tape() { return *tape_; }

 private:
  ad::Tape* tape_;
  std::unordered_map<const Matrix*, ad::Var> leaves_;
};

inline ad::Var activate(ad::Var x, Activation a) { return a == Activation::tanh ? ad::tanh(x) : x; }

inline void glorot_uniform(Matrix& w, Rng& rng) {
  const double fan = static_cast<double>(w.rows() + w.cols());
  const double limit = fan > 0 ? std::sqrt(6.0 / fan) : 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = rng.uniform(-limit, limit);
}

// Affine map x W + b for row-vector (or row-stacked) inputs.
struct Dense {
  Matrix weight;  // in x out
  Matrix bias;    // 1 x out

  Dense() = default;
  Dense(Eigen::Index in, Eigen::Index out) : weight(Matrix::Zero(in, out)), bias(Matrix::Zero(1, out)) {}

  Eigen::Index in_dim() const { return weight.rows(); }
  Eigen::Index out_dim() const { return weight.cols(); }

  ad::Var operator()(Binder& b, ad::Var x) const {
    ad::Var y = ad::matmul(x, b(weight));
    return ad::add(y, b(bias));
  }

  void init(Rng& rng) {
    glorot_uniform(weight, rng);
    bias.setZero();
  }

  template <class F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".weight", weight);
    f(prefix + ".bias", bias);
  }
};

// One hidden layer then a linear head.
struct Mlp {
  Dense hidden;
  Dense out;

  Mlp() = default;
  Mlp(Eigen::Index in, Eigen::Index h, Eigen::Index o) : hidden(in, h), out(h, o) {}

  ad::Var operator()(Binder& b, ad::Var x, Activation act) const { return out(b, activate(hidden(b, x), act)); }

  void init(Rng& rng) {
    hidden.init(rng);
    out.init(rng);
  }

  template <class F>
  void visit(const std::string& prefix, F&& f) {
    hidden.visit(prefix + ".hidden", f);
    out.visit(prefix + ".out", f);
  }
};

// Single-direction LSTM cell; gate blocks ordered input, forget, cell, output.
struct Lstm {
  Matrix w_input;   // in x 4h
  Matrix w_hidden;  // h x 4h
  Matrix bias;      // 1 x 4h

  Lstm() = default;
  Lstm(Eigen::Index in, Eigen::Index h)
      : w_input(Matrix::Zero(in, 4 * h)), w_hidden(Matrix::Zero(h, 4 * h)), bias(Matrix::Zero(1, 4 * h)) {}

  Eigen::Index hidden_dim() const { return w_hidden.rows(); }

  // Returns the hidden output after each element of xs, in the order consumed.
  std::vector<ad::Var> run(Binder& b, const std::vector<ad::Var>& xs) const {
    const Eigen::Index h = hidden_dim();
    ad::Tape& tape = b.tape();
    ad::Var hid = tape.constant(Matrix::Zero(1, h));
    ad::Var cell = tape.constant(Matrix::Zero(1, h));
    ad::Var wi = b(w_input), wh = b(w_hidden), bb = b(bias);
    std::vector<ad::Var> out;
    out.reserve(xs.size());
    for (const ad::Var& x : xs) {
      ad::Var z = ad::add(ad::add(ad::matmul(x, wi), ad::matmul(hid, wh)), bb);
      ad::Var ig = ad::sigmoid(ad::cols(z, 0, h));
      ad::Var fg = ad::sigmoid(ad::cols(z, h, h));
      ad::Var gg = ad::tanh(ad::cols(z, 2 * h, h));
      ad::Var og = ad::sigmoid(ad::cols(z, 3 * h, h));
      cell = ad::add(ad::mul(fg, cell), ad::mul(ig, gg));
      hid = ad::mul(og, ad::tanh(cell));
      out.push_back(hid);
    }
    return out;
  }

  void init(Rng& rng) {
    glorot_uniform(w_input, rng);
    glorot_uniform(w_hidden, rng);
    bias.setZero();
  }

  template <class F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".w_input", w_input);
    f(prefix + ".w_hidden", w_hidden);
    f(prefix + ".bias", bias);
  }
};

struct BiLstmOutputs {
  std::vector<ad::Var> forward;   // forward[t] has consumed x_0..x_t
  std::vector<ad::Var> backward;  // backward[t] has consumed x_{T-1}..x_t
};

struct BiLstm {
  Lstm fwd;
  Lstm bwd;

  BiLstm() = default;
  BiLstm(Eigen::Index in, Eigen::Index h) : fwd(in, h), bwd(in, h) {}

  BiLstmOutputs operator()(Binder& b, const std::vector<ad::Var>& xs) const {
    BiLstmOutputs o;
    o.forward = fwd.run(b, xs);
    std::vector<ad::Var> rev(xs.rbegin(), xs.rend());
    auto back = bwd.run(b, rev);
    o.backward.assign(back.rbegin(), back.rend());
    return o;
  }

  void init(Rng& rng) {
    fwd.init(rng);
    bwd.init(rng);
  }

  template <class F>
  void visit(const std::string& prefix, F&& f) {
    fwd.visit(prefix + ".fwd", f);
    bwd.visit(prefix + ".bwd", f);
  }
};

}  // namespace d2g2
