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

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2g2 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Thrown on shape mismatches between matrices, latents and parameters.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One time slice: undirected adjacency (zero diagonal), node features, and the
// mask of active nodes. Observed adjacency is binary; decoded adjacency holds
// probabilities in [0, 1].
struct GraphSnapshot {
  Matrix adjacency;
  Matrix features;
  std::vector<bool> node_mask;

  GraphSnapshot() = default;
  GraphSnapshot(Matrix adj, Matrix feat, std::vector<bool> mask)
      : adjacency(std::move(adj)), features(std::move(feat)), node_mask(std::move(mask)) {}

  // All-active snapshot with no edges.
  static GraphSnapshot empty(std::size_t n, std::size_t c) {
    return GraphSnapshot(Matrix::Zero(n, n), Matrix::Zero(n, c), std::vector<bool>(n, true));
  }

  std::size_t num_nodes() const { return static_cast<std::size_t>(adjacency.rows()); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features.cols()); }
  std::size_t num_active() const {
    std::size_t k = 0;
    for (bool b : node_mask) k += b ? 1 : 0;
    return k;
  }

  void set_edge(std::size_t i, std::size_t j, double w = 1.0) {
    adjacency(i, j) = w;
    adjacency(j, i) = w;
  }

  // Number of undirected edges with weight >= threshold.
  std::size_t num_edges(double threshold = 0.5) const {
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i)
      for (Eigen::Index j = i + 1; j < adjacency.cols(); ++j)
        if (adjacency(i, j) >= threshold) ++k;
    return k;
  }

  bool operator==(const GraphSnapshot& o) const {
    return node_mask == o.node_mask && adjacency.rows() == o.adjacency.rows() &&
           adjacency.cols() == o.adjacency.cols() && features.rows() == o.features.rows() &&
           features.cols() == o.features.cols() && adjacency == o.adjacency &&
           features == o.features;
  }
};

// Ordered sequence of snapshots over one node set.
struct DynamicGraph {
  std::vector<GraphSnapshot> snapshots;

  std::size_t num_snapshots() const { return snapshots.size(); }
  std::size_t num_nodes() const { return snapshots.empty() ? 0 : snapshots.front().num_nodes(); }
  std::size_t feature_dim() const { return snapshots.empty() ? 0 : snapshots.front().feature_dim(); }
  const std::vector<bool>& node_mask() const { return snapshots.front().node_mask; }
  std::size_t num_active() const { return snapshots.empty() ? 0 : snapshots.front().num_active(); }

  const GraphSnapshot& operator[](std::size_t t) const { return snapshots[t]; }
  GraphSnapshot& operator[](std::size_t t) { return snapshots[t]; }

  bool operator==(const DynamicGraph& o) const { return snapshots == o.snapshots; }
};

struct DynamicGraphDataset {
  std::vector<DynamicGraph> graphs;
  std::size_t n_max = 0;
  std::size_t T = 0;
  std::size_t c = 0;

  std::size_t size() const { return graphs.size(); }
  bool empty() const { return graphs.empty(); }

  bool operator==(const DynamicGraphDataset& o) const {
    return n_max == o.n_max && T == o.T && c == o.c && graphs == o.graphs;
  }
};

// Returns one description per broken invariant; empty iff the graph is well formed.
inline std::vector<std::string> validate(const DynamicGraph& g, bool require_binary = true) {
  std::vector<std::string> out;
  if (g.snapshots.empty()) {
    out.emplace_back("graph has no snapshots");
    return out;
  }
  const auto& first = g.snapshots.front();
  const Eigen::Index n = first.adjacency.rows();
  const Eigen::Index c = first.features.cols();
  for (std::size_t t = 0; t < g.snapshots.size(); ++t) {
    const auto& s = g.snapshots[t];
    const std::string where = ", snapshot " + std::to_string(t);
    const auto& a = s.adjacency;
    if (a.rows() != a.cols()) {
      out.push_back("adjacency not square" + where);
      continue;
    }
    if (a.rows() != n || s.features.cols() != c) {
      out.push_back("shape mismatch with snapshot 0" + where);
      continue;
    }
    if (s.features.rows() != n || static_cast<Eigen::Index>(s.node_mask.size()) != n) {
      out.push_back("shape mismatch between adjacency, features and mask" + where);
      continue;
    }
    if (s.node_mask != first.node_mask) out.push_back("node mask differs from snapshot 0" + where);

    bool diag = false, asym = false, range = false, nonbinary = false, masked_adj = false,
         masked_feat = false, nonfinite = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a(i, i) != 0.0) diag = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = a(i, j);
        if (!std::isfinite(v)) nonfinite = true;
        if (v != a(j, i)) asym = true;
        if (v < 0.0 || v > 1.0) range = true;
        if (require_binary && v != 0.0 && v != 1.0) nonbinary = true;
        if ((!s.node_mask[i] || !s.node_mask[j]) && v != 0.0) masked_adj = true;
      }
      for (Eigen::Index k = 0; k < c; ++k) {
        if (!std::isfinite(s.features(i, k))) nonfinite = true;
        if (!s.node_mask[i] && s.features(i, k) != 0.0) masked_feat = true;
      }
    }
    if (diag) out.push_back("nonzero diagonal" + where);
    if (asym) out.push_back("asymmetric adjacency" + where);
    if (range) out.push_back("adjacency entry outside [0,1]" + where);
    if (nonbinary) out.push_back("non-binary observed adjacency" + where);
    if (masked_adj) out.push_back("edge incident to masked node" + where);
    if (masked_feat) out.push_back("nonzero features on masked node" + where);
    if (nonfinite) out.push_back("non-finite entry" + where);
  }
  return out;
}

// Embeds g into n_max nodes: original block leading, new nodes masked out.
inline DynamicGraph pad_to(const DynamicGraph& g, std::size_t n_max) {
  const std::size_t n = g.num_nodes();
  if (n_max < n)
    throw DimensionError("pad_to: n_max " + std::to_string(n_max) + " is smaller than graph size " +
                         std::to_string(n));
  DynamicGraph out;
  out.snapshots.reserve(g.num_snapshots());
  for (const auto& s : g.snapshots) {
    const auto c = s.features.cols();
    GraphSnapshot p(Matrix::Zero(n_max, n_max), Matrix::Zero(n_max, c), std::vector<bool>(n_max, false));
    p.adjacency.topLeftCorner(n, n) = s.adjacency;
    p.features.topRows(n) = s.features;
    for (std::size_t i = 0; i < n; ++i) p.node_mask[i] = s.node_mask[i];
    out.snapshots.push_back(std::move(p));
  }
  return out;
}

}  // namespace d2g2
