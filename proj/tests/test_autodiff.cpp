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

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <functional>

namespace {

using namespace d2g2;
using d2g2::testing::max_abs_diff;

using OpFn = std::function<ad::Var(std::vector<ad::Var>&)>;

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m(k) = rng.uniform(-1.5, 1.5);
  return m;
}

// Contracts the op output with fixed random weights and compares the tape
// gradient of every input with central differences.
double op_gradient_error(const OpFn& op, std::vector<Matrix> inputs, std::uint64_t seed = 1) {
  Rng rng(seed);
  Matrix weights;
  auto run = [&](bool record, std::vector<ad::Var>* leaves, ad::Tape& tape) {
    std::vector<ad::Var> vars;
    for (const auto& m : inputs) vars.push_back(tape.param(m));
    if (leaves) *leaves = vars;
    ad::Var out = op(vars);
    if (weights.size() == 0) weights = random_matrix(rng, ad::val(out).rows(), ad::val(out).cols());
    (void)record;
    return ad::sum(ad::mul(out, tape.constant(weights)));
  };
  ad::Tape tape;
  std::vector<ad::Var> leaves;
  ad::Var loss = run(true, &leaves, tape);
  tape.backward(loss);
  double worst = 0.0;
  const double h = 1e-6;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Matrix analytic = tape.grad(leaves[k]);
    for (Eigen::Index e = 0; e < inputs[k].size(); ++e) {
      const double keep = inputs[k](e);
      inputs[k](e) = keep + h;
      ad::Tape t1(false);
      const double up = t1.value(run(false, nullptr, t1))(0, 0);
      inputs[k](e) = keep - h;
      ad::Tape t2(false);
      const double down = t2.value(run(false, nullptr, t2))(0, 0);
      inputs[k](e) = keep;
      const double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(numeric - analytic(e)) / std::max(1.0, std::abs(numeric)));
    }
  }
  return worst;
}

class OpGradients : public ::testing::Test {
 protected:
  Rng rng{42};
  Matrix m(Eigen::Index r, Eigen::Index c) { return random_matrix(rng, r, c); }
};

constexpr double kOpTol = 1e-7;

TEST_F(OpGradients, Elementwise) {
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::matmul(v[0], v[1]); }, {m(3, 4), m(4, 2)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::add(v[0], v[1]); }, {m(3, 4), m(3, 4)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::add(v[0], v[1]); }, {m(3, 4), m(1, 4)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return v[0] - v[1]; }, {m(2, 4), m(2, 4)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::mul(v[0], v[1]); }, {m(3, 3), m(3, 3)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::scale(v[0], -2.5); }, {m(2, 3)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::tanh(v[0]); }, {m(3, 2)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::sigmoid(v[0]); }, {m(3, 2)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::exp(v[0]); }, {m(3, 2)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::clamp(v[0], -0.9, 0.8); }, {m(4, 4)}), kOpTol);
}

TEST_F(OpGradients, Structural) {
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::sum(v[0]); }, {m(3, 2)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::transpose(v[0]); }, {m(3, 2)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::hcat({v[0], v[1], v[0]}); }, {m(2, 3), m(2, 1)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::cols(v[0], 1, 2); }, {m(3, 5)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::row(v[0], 2); }, {m(3, 5)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::reshape(v[0], 3, 4); }, {m(1, 12)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::masked_mean_rows(v[0], {true, false, true, true}); },
                              {m(4, 3)}),
            kOpTol);
  const Matrix c = m(3, 3);
  EXPECT_LT(op_gradient_error([c](auto& v) { return ad::lmul_const(c, v[0]); }, {m(3, 2)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::complete_mix(v[0]); }, {m(5, 3)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::symmetrize(v[0]); }, {m(4, 4)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::zero_diagonal(v[0]); }, {m(4, 4)}), kOpTol);
}

TEST_F(OpGradients, Losses) {
  Matrix targets = (m(4, 4).array() > 0).cast<double>();
  Matrix weights = (m(4, 4).array() > -0.5).cast<double>();
  EXPECT_LT(op_gradient_error([=](auto& v) { return ad::bce_with_logits(v[0], targets, weights); }, {m(4, 4)}),
            kOpTol);
  const Matrix obs = m(3, 2);
  const Matrix fw = (m(3, 2).array() > 0).cast<double>();
  EXPECT_LT(op_gradient_error([=](auto& v) { return ad::gaussian_nll(v[0], obs, fw); }, {m(3, 2)}), kOpTol);
  EXPECT_LT(op_gradient_error([](auto& v) { return ad::kl_standard_normal(v[0], v[1]); }, {m(1, 4), m(1, 4)}),
            kOpTol);
}

TEST_F(OpGradients, SharedSubexpressionsAccumulate) {
  EXPECT_LT(op_gradient_error(
                [](auto& v) {
                  ad::Var a = ad::tanh(v[0]);
                  return ad::mul(ad::matmul(a, ad::transpose(a)), ad::sigmoid(ad::matmul(v[0], v[1])));
                },
                {m(3, 2), m(2, 3)}),
            kOpTol);
}

TEST(AutodiffValues, ForwardValues) {
  ad::Tape t;
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  ad::Var x = t.constant(a);
  EXPECT_EQ(t.value(ad::transpose(x)), a.transpose());
  EXPECT_EQ(t.value(ad::sum(x))(0, 0), 10.0);
  Matrix r(1, 4);
  r << 1, 2, 3, 4;
  EXPECT_EQ(t.value(ad::reshape(t.constant(r), 2, 2)), a);  // row-major
  Matrix sym(2, 2);
  sym << 1, 2.5, 2.5, 4;
  EXPECT_EQ(t.value(ad::symmetrize(x)), sym);
  Matrix cm(2, 2);
  cm << 3, 4, 1, 2;  // each row is the mean of the other rows (n = 2)
  EXPECT_EQ(t.value(ad::complete_mix(x)), cm);
  EXPECT_EQ(t.value(ad::masked_mean_rows(x, {false, true})), a.row(1));
  EXPECT_TRUE(t.value(ad::masked_mean_rows(x, {false, false})).isZero(0.0));
}

TEST(AutodiffValues, BceMatchesDirectFormula) {
  ad::Tape t;
  Matrix logits(1, 3), y(1, 3), w(1, 3);
  logits << -30.0, 0.2, 40.0;
  y << 1.0, 0.0, 1.0;
  w << 1.0, 1.0, 0.0;
  const double v = t.value(ad::bce_with_logits(t.constant(logits), y, w))(0, 0);
  EXPECT_NEAR(v, 30.0 + std::log1p(std::exp(-30.0)) + std::log1p(std::exp(0.2)), 1e-12);
  EXPECT_TRUE(std::isfinite(v));
}

TEST(AutodiffValues, ShapeMismatchThrows) {
  ad::Tape t;
  EXPECT_THROW(ad::add(t.constant(Matrix::Zero(2, 2)), t.constant(Matrix::Zero(3, 2))), DimensionError);
  EXPECT_THROW(ad::matmul(t.constant(Matrix::Zero(2, 2)), t.constant(Matrix::Zero(3, 2))), DimensionError);
}

TEST(AutodiffValues, NonRecordingTapeHasNoGradients) {
  ad::Tape t(false);
  Matrix w = Matrix::Ones(2, 2);
  ad::Var x = t.param(w);
  EXPECT_EQ(t.value(ad::scale(x, 2.0)), 2.0 * w);
  EXPECT_FALSE(t.recording());
}

TEST(Binder, OneLeafPerMatrix) {
  ad::Tape t;
  Binder b(t);
  Matrix w = Matrix::Constant(1, 1, 3.0);
  ad::Var a = b(w), c = b(w);
  EXPECT_EQ(a.id, c.id);
  t.backward(ad::mul(a, c));
  EXPECT_NEAR(b.grad(w)(0, 0), 6.0, 1e-15);
  Matrix unused = Matrix::Ones(2, 2);
  EXPECT_TRUE(b.grad(unused).isZero(0.0));
}

}  // namespace
