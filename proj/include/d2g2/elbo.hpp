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
#include "d2g2/generative.hpp"
#include "d2g2/inference.hpp"
#include "d2g2/model.hpp"
#include "d2g2/rng.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>

namespace d2g2 {

// Sum over entries of 0.5 (exp(lv) + mu^2 - 1 - lv).
inline double kl_standard_normal(const GaussianParams& p) {
  if (p.mean.size() != p.log_variance.size()) throw DimensionError("kl_standard_normal: length mismatch");
  return 0.5 * (p.log_variance.array().exp() + p.mean.array().square() - 1.0 - p.log_variance.array()).sum();
}

struct ReconstructionTerms {
  double edge = 0.0;  // Bernoulli NLL over unordered active pairs
  double node = 0.0;  // unit-variance Gaussian NLL over active feature entries
};

// Masks come from the observed graph. Probabilities are clipped to
// [1e-15, 1 - 1e-15] before taking logs.
inline ReconstructionTerms reconstruction_loss(const DynamicGraph& observed, const DynamicGraph& decoded) {
  if (observed.num_snapshots() != decoded.num_snapshots() || observed.num_nodes() != decoded.num_nodes() ||
      observed.feature_dim() != decoded.feature_dim())
    throw DimensionError("reconstruction_loss: observed and decoded graphs differ in shape");
  constexpr double eps = 1e-15;
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  ReconstructionTerms r;
  for (std::size_t t = 0; t < observed.num_snapshots(); ++t) {
    const auto& o = observed[t];
    const auto& d = decoded[t];
    const auto n = o.adjacency.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!o.node_mask[i]) continue;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (!o.node_mask[j]) continue;
        const double p = std::clamp(d.adjacency(i, j), eps, 1.0 - eps);
        const double y = o.adjacency(i, j);
        r.edge -= y * std::log(p) + (1.0 - y) * std::log1p(-p);
      }
      for (Eigen::Index k = 0; k < o.features.cols(); ++k) {
        const double diff = d.features(i, k) - o.features(i, k);
        r.node += 0.5 * diff * diff + half_log_2pi;
      }
    }
  }
  return r;
}

// Standard-normal noise for one single-sample ELBO estimate.
struct ElboNoise {
  RowVector f;
  Matrix edge;   // T x d_edge
  Matrix node;   // T x d_node
  Matrix joint;  // T x d_joint
};

inline ElboNoise draw_noise(const LatentDims& dims, std::size_t T, std::uint64_t seed) {
  const LatentState z = sample_prior(T, dims, seed);
  return {z.f, z.z_edge, z.z_node, z.z_joint};
}

struct ElboOptions {
  double beta = 1.0;
  double lambda_edge = 1.0;
  double lambda_node = 1.0;
  // Count KL(q(f)||p(f)) once per snapshot instead of once per graph.
  bool kl_f_per_snapshot = false;
};

struct ElboTerms {
  double edge_nll = 0.0;
  double node_nll = 0.0;
  double kl_f = 0.0;  // after the per-snapshot multiplier, if enabled
  double kl_edge = 0.0;
  double kl_node = 0.0;
  double kl_joint = 0.0;

  double kl_total() const { return kl_f + kl_edge + kl_node + kl_joint; }
  // lambda-weighted reconstruction plus unweighted KL (beta = 1)
  double neg_elbo = 0.0;
  // The quantity being minimised, with the current beta.
  double objective = 0.0;
  double elbo() const { return -objective; }
};

namespace detail {

inline Matrix pair_weights(const std::vector<bool>& mask) {
  const auto n = static_cast<Eigen::Index>(mask.size());
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (mask[i] && mask[j]) w(i, j) = 1.0;
  return w;
}

inline Matrix feature_weights(const std::vector<bool>& mask, Eigen::Index c) {
  const auto n = static_cast<Eigen::Index>(mask.size());
  Matrix w = Matrix::Zero(n, c);
  for (Eigen::Index i = 0; i < n; ++i)
    if (mask[i]) w.row(i).setOnes();
  return w;
}

}  // namespace detail

// Builds the single-sample negative objective on the tape:
//   lambda_E * edge NLL + lambda_F * node NLL + beta * (KL_f + sum_t KL_edge + KL_node + KL_joint)
// and fills `terms`. The full encoder's f sample is the one fed to the decoder.
inline ad::Var build_loss(Binder& b, const Model& m, const DynamicGraph& g, const ElboNoise& noise,
                          const ElboOptions& opt, ElboTerms& terms) {
  ad::Tape& tape = b.tape();
  const std::size_t T = g.num_snapshots();
  PosteriorVars post = m.mode == InferenceMode::factorized
                           ? encode_factorized_vars(b, m.encoder, g)
                           : encode_full_vars(b, m.encoder, g, RowVector(noise.f));
  ad::Var f = post.f_sample ? *post.f_sample : reparameterize(post.f_mean, post.f_logvar, noise.f);

  const Matrix pw = detail::pair_weights(g.node_mask());
  const Matrix fw = detail::feature_weights(g.node_mask(), static_cast<Eigen::Index>(g.feature_dim()));

  std::vector<ad::Var> edge_terms, node_terms, kl_e, kl_n, kl_j;
  for (std::size_t t = 0; t < T; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    ad::Var ze = reparameterize(post.edge_mean[t], post.edge_logvar[t], noise.edge.row(ti));
    ad::Var zn = reparameterize(post.node_mean[t], post.node_logvar[t], noise.node.row(ti));
    ad::Var zj = reparameterize(post.joint_mean[t], post.joint_logvar[t], noise.joint.row(ti));
    ad::Var logits = edge_logits(b, m.generator, ze, zj, f);
    edge_terms.push_back(ad::bce_with_logits(logits, g[t].adjacency, pw));
    ad::Var feats = node_features(b, m.generator, zn, zj, f);
    node_terms.push_back(ad::gaussian_nll(feats, g[t].features, fw));
    kl_e.push_back(ad::kl_standard_normal(post.edge_mean[t], post.edge_logvar[t]));
    kl_n.push_back(ad::kl_standard_normal(post.node_mean[t], post.node_logvar[t]));
    kl_j.push_back(ad::kl_standard_normal(post.joint_mean[t], post.joint_logvar[t]));
  }
  auto total = [](const std::vector<ad::Var>& v) { return ad::sum(ad::hcat(v)); };
  ad::Var edge_nll = total(edge_terms), node_nll = total(node_terms);
  ad::Var kle = total(kl_e), kln = total(kl_n), klj = total(kl_j);
  const double f_mult = opt.kl_f_per_snapshot ? static_cast<double>(T) : 1.0;
  ad::Var klf = ad::scale(ad::kl_standard_normal(post.f_mean, post.f_logvar), f_mult);

  ad::Var kl = ad::sum(ad::hcat({klf, kle, kln, klj}));
  ad::Var recon = ad::add(ad::scale(edge_nll, opt.lambda_edge), ad::scale(node_nll, opt.lambda_node));
  ad::Var loss = ad::add(recon, ad::scale(kl, opt.beta));

  auto s = [&tape](ad::Var v) { return tape.value(v)(0, 0); };
  terms.edge_nll = s(edge_nll);
  terms.node_nll = s(node_nll);
  terms.kl_f = s(klf);
  terms.kl_edge = s(kle);
  terms.kl_node = s(kln);
  terms.kl_joint = s(klj);
  terms.neg_elbo = s(recon) + s(kl);
  terms.objective = s(loss);
  return loss;
}

// Single-sample ELBO estimate and its breakdown; deterministic given noise.
inline ElboTerms elbo(const DynamicGraph& g, const Model& m, const ElboNoise& noise, const ElboOptions& opt = {}) {
  ad::Tape tape(false);
  Binder b(tape);
  ElboTerms terms;
  build_loss(b, m, g, noise, opt, terms);
  return terms;
}

}  // namespace d2g2
