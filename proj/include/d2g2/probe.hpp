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

#include "d2g2/generative.hpp"
#include "d2g2/model.hpp"
#include "d2g2/train.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2g2 {

enum class LatentFactor { none, f, z_edge, z_node, z_joint };

inline const char* to_string(LatentFactor f) {
  switch (f) {
    case LatentFactor::none: return "none";
    case LatentFactor::f: return "f";
    case LatentFactor::z_edge: return "z_edge";
    case LatentFactor::z_node: return "z_node";
    case LatentFactor::z_joint: return "z_joint";
  }
  return "none";
}

inline LatentFactor parse_latent_factor(const std::string& s) {
  if (s == "none") return LatentFactor::none;
  if (s == "f") return LatentFactor::f;
  if (s == "z_edge") return LatentFactor::z_edge;
  if (s == "z_node") return LatentFactor::z_node;
  if (s == "z_joint") return LatentFactor::z_joint;
  throw std::invalid_argument("unknown latent factor '" + s + "' (expected f, z_edge, z_node, z_joint or none)");
}

struct ProbeResult {
  LatentFactor varied_factor = LatentFactor::none;
  std::vector<DynamicGraph> graphs;  // decoded, probabilistic adjacency
  double edge_variation = 0.0;       // mean pairwise L1 between variants' edge tensors
  double node_variation = 0.0;       // mean pairwise L1 between variants' feature tensors
  double within_time_variation = 0.0;  // mean L1 between consecutive snapshots of one variant
  std::vector<double> per_snapshot_variation;  // mean pairwise L1 between variants at each t
  double per_snapshot_cv = 0.0;  // coefficient of variation of per_snapshot_variation
};

namespace detail {

inline double l1(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().sum(); }

}  // namespace detail

// Decodes k variants of `base` that differ only in `factor` (redrawn from the
// prior with generator seed + 1 + variant). LatentFactor::none is the control:
// every variant equals the base state.
inline ProbeResult traverse_from(const Model& model, const LatentState& base, LatentFactor factor, std::size_t k,
                                 std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("traverse: need at least 2 samples");
  ProbeResult res;
  res.varied_factor = factor;
  const std::size_t T = base.num_snapshots();
  for (std::size_t v = 0; v < k; ++v) {
    LatentState z = base;
    if (factor != LatentFactor::none) {
      const LatentState fresh = sample_prior(T, model.dims.latent, seed + 1 + v);
      switch (factor) {
        case LatentFactor::f: z.f = fresh.f; break;
        case LatentFactor::z_edge: z.z_edge = fresh.z_edge; break;
        case LatentFactor::z_node: z.z_node = fresh.z_node; break;
        case LatentFactor::z_joint: z.z_joint = fresh.z_joint; break;
        case LatentFactor::none: break;
      }
    }
    res.graphs.push_back(decode_sequence(z, model.generator));
  }

  res.per_snapshot_variation.assign(T, 0.0);
  double pairs = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      pairs += 1.0;
      for (std::size_t t = 0; t < T; ++t) {
        const double de = detail::l1(res.graphs[a][t].adjacency, res.graphs[b][t].adjacency);
        const double dn = detail::l1(res.graphs[a][t].features, res.graphs[b][t].features);
        res.edge_variation += de;
        res.node_variation += dn;
        res.per_snapshot_variation[t] += de + dn;
      }
    }
  res.edge_variation /= pairs;
  res.node_variation /= pairs;
  for (double& v : res.per_snapshot_variation) v /= pairs;

  if (T > 1) {
    for (const auto& g : res.graphs) {
      double w = 0.0;
      for (std::size_t t = 0; t + 1 < T; ++t)
        w += detail::l1(g[t].adjacency, g[t + 1].adjacency) + detail::l1(g[t].features, g[t + 1].features);
      res.within_time_variation += w / static_cast<double>(T - 1);
    }
    res.within_time_variation /= static_cast<double>(k);
  }

  double mean = 0.0;
  for (double v : res.per_snapshot_variation) mean += v;
  mean /= static_cast<double>(T);
  if (mean > 0.0) {
    double var = 0.0;
    for (double v : res.per_snapshot_variation) var += (v - mean) * (v - mean);
    res.per_snapshot_cv = std::sqrt(var / static_cast<double>(T)) / mean;
  }
  return res;
}

// Base state drawn from the prior with `seed`.
inline ProbeResult traverse(const Model& model, LatentFactor factor, std::size_t k, std::uint64_t seed) {
  return traverse_from(model, sample_prior(model.T, model.dims.latent, seed), factor, k, seed);
}

// Posterior means of an encoded graph, for traversals around real data.
inline LatentState encode_mean_state(const Model& model, const DynamicGraph& g) {
  const PosteriorSet p = model.mode == InferenceMode::factorized ? encode_factorized(g, model.encoder)
                                                                 : encode_full(g, model.encoder, std::nullopt);
  LatentState z;
  z.f = p.f.mean;
  const auto T = static_cast<Eigen::Index>(p.edge.size());
  const auto& l = model.dims.latent;
  z.z_edge.resize(T, static_cast<Eigen::Index>(l.edge));
  z.z_node.resize(T, static_cast<Eigen::Index>(l.node));
  z.z_joint.resize(T, static_cast<Eigen::Index>(l.joint));
  for (Eigen::Index t = 0; t < T; ++t) {
    z.z_edge.row(t) = p.edge[t].mean;
    z.z_node.row(t) = p.node[t].mean;
    z.z_joint.row(t) = p.joint[t].mean;
  }
  return z;
}

// Model without f; each dynamic latent widened by round(d_f / 3).
inline TrainResult ablation_no_f(const DynamicGraphDataset& ds, TrainConfig cfg) {
  cfg.variant = ModelVariant::no_f;
  return train(ds, cfg);
}

// One shared dynamic latent of width 3 d_z feeding both decoders.
inline TrainResult ablation_merged_z(const DynamicGraphDataset& ds, TrainConfig cfg) {
  cfg.variant = ModelVariant::merged_z;
  return train(ds, cfg);
}

inline nlohmann::ordered_json to_json(const ProbeResult& r) {
  nlohmann::ordered_json j;
  j["varied_factor"] = to_string(r.varied_factor);
  j["samples"] = r.graphs.size();
  j["edge_variation"] = r.edge_variation;
  j["node_variation"] = r.node_variation;
  j["within_time_variation"] = r.within_time_variation;
  j["per_snapshot_variation"] = r.per_snapshot_variation;
  j["per_snapshot_cv"] = r.per_snapshot_cv;
  return j;
}

}  // namespace d2g2
