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
#include "d2g2/graph.hpp"
#include "d2g2/nn.hpp"
#include "d2g2/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace d2g2 {

// Latent widths. The default model uses edge = node = joint; ablations shrink
// some of them to zero.
struct LatentDims {
  std::size_t f = 32;
  std::size_t edge = 16;
  std::size_t node = 16;
  std::size_t joint = 16;

  std::size_t total_dynamic() const { return edge + node + joint; }
  bool operator==(const LatentDims&) const = default;
};

struct ModelDims {
  std::size_t n = 0;  // n_max
  std::size_t c = 0;
  LatentDims latent;
  std::size_t hidden = 64;
  std::size_t deconv_layers = 2;
  Activation activation = Activation::tanh;

  bool operator==(const ModelDims&) const = default;
};

// Time-invariant f plus one row per snapshot for each dynamic factor.
struct LatentState {
  RowVector f;
  Matrix z_edge;
  Matrix z_node;
  Matrix z_joint;

  std::size_t num_snapshots() const { return static_cast<std::size_t>(z_edge.rows()); }
};

struct GeneratorParams {
  ModelDims dims;
  Dense edge_embed;                   // (edge + joint + f) -> n * h
  std::vector<Matrix> deconv_neighbor;  // h x h, one per round
  std::vector<Matrix> deconv_self;      // h x h, one per round
  Matrix edge_out;                    // h x h bilinear form
  Dense node_embed;                   // (node + joint + f) -> n * h
  Dense node_out;                     // h -> c

  GeneratorParams() = default;
  explicit GeneratorParams(const ModelDims& d) : dims(d) {
    const auto n = static_cast<Eigen::Index>(d.n), h = static_cast<Eigen::Index>(d.hidden);
    const auto in_e = static_cast<Eigen::Index>(d.latent.edge + d.latent.joint + d.latent.f);
    const auto in_n = static_cast<Eigen::Index>(d.latent.node + d.latent.joint + d.latent.f);
    edge_embed = Dense(in_e, n * h);
    deconv_neighbor.assign(d.deconv_layers, Matrix::Zero(h, h));
    deconv_self.assign(d.deconv_layers, Matrix::Zero(h, h));
    edge_out = Matrix::Zero(h, h);
    node_embed = Dense(in_n, n * h);
    node_out = Dense(h, static_cast<Eigen::Index>(d.c));
  }

  void init(Rng& rng) {
    edge_embed.init(rng);
    for (auto& w : deconv_neighbor) glorot_uniform(w, rng);
    for (auto& w : deconv_self) glorot_uniform(w, rng);
    glorot_uniform(edge_out, rng);
    node_embed.init(rng);
    node_out.init(rng);
  }

  template <class F>
  void visit(F&& f) {
    edge_embed.visit("generator.edge_embed", f);
    for (std::size_t l = 0; l < deconv_neighbor.size(); ++l) {
      f("generator.deconv." + std::to_string(l) + ".neighbor", deconv_neighbor[l]);
      f("generator.deconv." + std::to_string(l) + ".self", deconv_self[l]);
    }
    f("generator.edge_out", edge_out);
    node_embed.visit("generator.node_embed", f);
    node_out.visit("generator.node_out", f);
  }

  // Every weight set to w and every bias to b (test fixtures).
  void fill(double w, double b) {
    visit([&](const std::string& name, Matrix& m) {
      const bool is_bias = name.size() >= 5 && name.compare(name.size() - 5, 5, ".bias") == 0;
      m.setConstant(is_bias ? b : w);
    });
  }
};

namespace detail {

inline void check_latent(const char* what, Eigen::Index got, std::size_t want) {
  if (static_cast<std::size_t>(got) != want)
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                         std::to_string(got));
}

}  // namespace detail

// Symmetric edge logits for one snapshot, diagonal left in place.
// latent -> n node embeddings -> rounds of H <- act(S H W + H V) with S the
// normalised complete graph -> H W_o H^T, symmetrised.
inline ad::Var edge_logits(Binder& b, const GeneratorParams& p, ad::Var z_edge, ad::Var z_joint, ad::Var f) {
  const auto& d = p.dims;
  detail::check_latent("decode_edges z_edge", ad::val(z_edge).cols(), d.latent.edge);
  detail::check_latent("decode_edges z_joint", ad::val(z_joint).cols(), d.latent.joint);
  detail::check_latent("decode_edges f", ad::val(f).cols(), d.latent.f);
  const auto n = static_cast<Eigen::Index>(d.n), h = static_cast<Eigen::Index>(d.hidden);
  ad::Var x = ad::hcat({z_edge, z_joint, f});
  ad::Var hcur = ad::reshape(activate(p.edge_embed(b, x), d.activation), n, h);
  for (std::size_t l = 0; l < p.deconv_neighbor.size(); ++l) {
    ad::Var mixed = ad::matmul(ad::complete_mix(hcur), b(p.deconv_neighbor[l]));
    ad::Var self = ad::matmul(hcur, b(p.deconv_self[l]));
    hcur = activate(ad::add(mixed, self), d.activation);
  }
  ad::Var logits = ad::matmul(ad::matmul(hcur, b(p.edge_out)), ad::transpose(hcur));
  return ad::symmetrize(logits);
}

inline ad::Var edge_probabilities(ad::Var logits) { return ad::zero_diagonal(ad::sigmoid(logits)); }

inline ad::Var node_features(Binder& b, const GeneratorParams& p, ad::Var z_node, ad::Var z_joint, ad::Var f) {
  const auto& d = p.dims;
  detail::check_latent("decode_nodes z_node", ad::val(z_node).cols(), d.latent.node);
  detail::check_latent("decode_nodes z_joint", ad::val(z_joint).cols(), d.latent.joint);
  detail::check_latent("decode_nodes f", ad::val(f).cols(), d.latent.f);
  const auto n = static_cast<Eigen::Index>(d.n), h = static_cast<Eigen::Index>(d.hidden);
  ad::Var x = ad::hcat({z_node, z_joint, f});
  ad::Var emb = ad::reshape(activate(p.node_embed(b, x), d.activation), n, h);
  return p.node_out(b, emb);
}

// n x n edge probabilities: symmetric, zero diagonal, off-diagonal in (0, 1).
inline Matrix decode_edges(const RowVector& z_edge, const RowVector& z_joint, const RowVector& f,
                           const GeneratorParams& p) {
  ad::Tape tape(false);
  Binder b(tape);
  auto v = edge_probabilities(edge_logits(b, p, tape.constant(z_edge), tape.constant(z_joint), tape.constant(f)));
  return tape.value(v);
}

// n x c node features.
inline Matrix decode_nodes(const RowVector& z_node, const RowVector& z_joint, const RowVector& f,
                           const GeneratorParams& p) {
  ad::Tape tape(false);
  Binder b(tape);
  auto v = node_features(b, p, tape.constant(z_node), tape.constant(z_joint), tape.constant(f));
  return tape.value(v);
}

// Decodes every snapshot independently given its latents.
inline DynamicGraph decode_sequence(const LatentState& z, const GeneratorParams& p) {
  const auto T = z.z_edge.rows();
  if (z.z_node.rows() != T || z.z_joint.rows() != T)
    throw DimensionError("decode_sequence: latent sequences have different lengths");
  DynamicGraph g;
  g.snapshots.reserve(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) {
    GraphSnapshot s;
    s.adjacency = decode_edges(z.z_edge.row(t), z.z_joint.row(t), z.f, p);
    s.features = decode_nodes(z.z_node.row(t), z.z_joint.row(t), z.f, p);
    s.node_mask.assign(p.dims.n, true);
    g.snapshots.push_back(std::move(s));
  }
  return g;
}

// i.i.d. standard normal draws in the order f, z_edge, z_node, z_joint (row-major).
inline LatentState sample_prior(std::size_t T, const LatentDims& dims, std::uint64_t seed) {
  Rng rng(seed);
  auto fill = [&rng](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
  };
  LatentState z;
  z.f = fill(1, static_cast<Eigen::Index>(dims.f));
  const auto t = static_cast<Eigen::Index>(T);
  z.z_edge = fill(t, static_cast<Eigen::Index>(dims.edge));
  z.z_node = fill(t, static_cast<Eigen::Index>(dims.node));
  z.z_joint = fill(t, static_cast<Eigen::Index>(dims.joint));
  return z;
}

// Edge iff p >= threshold (ties become edges).
inline DynamicGraph binarize(const DynamicGraph& g, double threshold = 0.5) {
  DynamicGraph out = g;
  for (auto& s : out.snapshots) {
    const auto n = s.adjacency.rows();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const bool active = s.node_mask[i] && s.node_mask[j] && i != j;
        s.adjacency(i, j) = (active && s.adjacency(i, j) >= threshold) ? 1.0 : 0.0;
      }
  }
  return out;
}

// One Bernoulli draw per unordered pair, mirrored to keep the graph symmetric.
inline DynamicGraph binarize_bernoulli(const DynamicGraph& g, std::uint64_t seed) {
  Rng rng(seed);
  DynamicGraph out = g;
  for (auto& s : out.snapshots) {
    const auto n = s.adjacency.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      s.adjacency(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const bool active = s.node_mask[i] && s.node_mask[j];
        const double p = s.adjacency(i, j);
        const double e = (rng.bernoulli(p) && active) ? 1.0 : 0.0;
        s.adjacency(i, j) = e;
        s.adjacency(j, i) = e;
      }
    }
  }
  return out;
}

}  // namespace d2g2
