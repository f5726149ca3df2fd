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
#include "d2g2/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2g2 {

struct TimedEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  double t = 0.0;
  bool operator==(const TimedEdge&) const = default;
};

// Undirected edges (i < j) stamped with a construction time in (0, 1].
struct TimedEdgeStream {
  std::size_t n = 0;
  std::vector<TimedEdge> events;
};

// Preferential attachment: node k >= m joins with m distinct edges whose
// targets are drawn proportionally to current degree. The first arriving node
// links to the m seed nodes. The k-th edge (1-based) gets time k / total.
inline TimedEdgeStream generate_dynamic_ba(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || m >= n)
    throw std::invalid_argument("generate_dynamic_ba: need 1 <= m < n (got m=" + std::to_string(m) +
                                ", n=" + std::to_string(n) + ")");
  Rng rng(seed);
  TimedEdgeStream s;
  s.n = n;
  const std::size_t total = (n - m) * m;
  s.events.reserve(total);

  // Every endpoint appended once per incident edge: uniform choice from this
  // list is degree-proportional.
  std::vector<std::size_t> endpoints;
  endpoints.reserve(2 * total);
  std::vector<std::size_t> targets(m);
  for (std::size_t k = 0; k < m; ++k) targets[k] = k;

  std::size_t counter = 0;
  for (std::size_t node = m; node < n; ++node) {
    for (std::size_t target : targets) {
      ++counter;
      s.events.push_back({std::min(node, target), std::max(node, target),
                          static_cast<double>(counter) / static_cast<double>(total)});
      endpoints.push_back(target);
      endpoints.push_back(node);
    }
    if (node + 1 == n) break;
    targets.clear();
    while (targets.size() < m) {
      const std::size_t pick = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), pick) == targets.end()) targets.push_back(pick);
    }
  }
  return s;
}

// Bins a timed stream into T snapshots over (0, 1]. Cumulative snapshots hold
// every edge up to the bin's right end; otherwise only the bin's own edges.
inline DynamicGraph discretize(const TimedEdgeStream& stream, std::size_t T, bool cumulative = true) {
  if (T < 1) throw std::invalid_argument("discretize: T must be >= 1");
  DynamicGraph g;
  for (std::size_t t = 0; t < T; ++t) {
    const double lo = static_cast<double>(t) / static_cast<double>(T);
    const double hi = static_cast<double>(t + 1) / static_cast<double>(T);
    GraphSnapshot s = GraphSnapshot::empty(stream.n, 0);
    for (const auto& e : stream.events) {
      const bool in_bin = cumulative ? (e.t > 0.0 && e.t <= hi) : (e.t > lo && e.t <= hi);
      if (in_bin) s.set_edge(e.i, e.j);
    }
    g.snapshots.push_back(std::move(s));
  }
  return g;
}

enum class FeatureMode { degree, noise };

// Replaces features with the per-snapshot node degree (c = 1), optionally
// perturbed by unit-variance Gaussian noise.
inline DynamicGraph attach_synthetic_features(const DynamicGraph& g, FeatureMode mode, std::uint64_t seed) {
  Rng rng(seed);
  DynamicGraph out = g;
  for (auto& s : out.snapshots) {
    const auto n = s.adjacency.rows();
    s.features = Matrix::Zero(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!s.node_mask[i]) continue;
      double deg = s.adjacency.row(i).sum();
      if (mode == FeatureMode::noise) deg += rng.normal();
      s.features(i, 0) = deg;
    }
  }
  return out;
}

// Ground-truth generative factors of one toy graph.
struct ToyFactorLabels {
  std::size_t graph_index = 0;
  std::size_t u = 0;      // anchor node of the rotating contact
  std::size_t v = 0;      // rotation offset
  double amplitude = 0.0;
  double phase = 0.0;
  bool operator==(const ToyFactorLabels&) const = default;
};

struct ToyDataset {
  DynamicGraphDataset data;
  std::vector<ToyFactorLabels> labels;
};

namespace detail {

// Nodes that are neither u nor a chain neighbour of u.
inline std::vector<std::size_t> contact_candidates(std::size_t u, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t d = j > u ? j - u : u - j;
    if (d > 1) out.push_back(j);
  }
  return out;
}

}  // namespace detail

// Deterministically rebuilds one toy graph from its factor labels.
//  static: chain edges (i, i+1) in every snapshot
//  edge-dynamic: one contact (u, w_t) where w_t cycles through u's non-neighbours
//  node-dynamic: 3-D coordinates on a per-graph sinusoidal trajectory
inline DynamicGraph toy_graph_from_labels(const ToyFactorLabels& lab, std::size_t n, std::size_t T) {
  const auto cand = detail::contact_candidates(lab.u, n);
  if (cand.empty()) throw std::invalid_argument("toy_graph_from_labels: anchor has no candidate contact");
  const double omega = 2.0 * std::numbers::pi * 2.0 / static_cast<double>(T);
  const double spacing = 1.5;
  const double centre = 0.5 * static_cast<double>(n - 1);
  DynamicGraph g;
  for (std::size_t t = 0; t < T; ++t) {
    GraphSnapshot s = GraphSnapshot::empty(n, 3);
    for (std::size_t i = 0; i + 1 < n; ++i) s.set_edge(i, i + 1);
    s.set_edge(lab.u, cand[(lab.v + t) % cand.size()]);
    for (std::size_t i = 0; i < n; ++i) {
      const double angle = omega * static_cast<double>(t) + lab.phase + 0.7 * static_cast<double>(i);
      s.features(i, 0) = spacing * (static_cast<double>(i) - centre) + lab.amplitude * std::sin(angle);
      s.features(i, 1) = lab.amplitude * std::cos(angle);
      s.features(i, 2) = 0.5 * lab.amplitude * std::sin(2.0 * angle);
    }
    g.snapshots.push_back(std::move(s));
  }
  return g;
}

// Toy benchmark with known static, edge-dynamic and node-dynamic factors.
// Graph g draws its labels from a generator seeded with seed + g.
inline ToyDataset generate_toy_disentangled(std::size_t num_graphs, std::size_t n, std::size_t T,
                                            std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("generate_toy_disentangled: need n >= 3");
  if (T < 2) throw std::invalid_argument("generate_toy_disentangled: need T >= 2");
  std::vector<std::size_t> anchors;
  for (std::size_t u = 0; u < n; ++u)
    if (!detail::contact_candidates(u, n).empty()) anchors.push_back(u);

  ToyDataset out;
  out.data.n_max = n;
  out.data.T = T;
  out.data.c = 3;
  for (std::size_t gi = 0; gi < num_graphs; ++gi) {
    Rng rng(seed + gi);
    ToyFactorLabels lab;
    lab.graph_index = gi;
    lab.u = anchors[rng.below(anchors.size())];
    lab.v = rng.below(n);
    lab.amplitude = rng.uniform(0.5, 1.5);
    lab.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    out.data.graphs.push_back(toy_graph_from_labels(lab, n, T));
    out.labels.push_back(lab);
  }
  return out;
}

// Sidecar file: one {graph_index, u, v, amplitude, phase} record per line.
inline void write_toy_labels(const std::vector<ToyFactorLabels>& labels, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const auto& l : labels) {
    nlohmann::ordered_json j;
    j["graph_index"] = l.graph_index;
    j["u"] = l.u;
    j["v"] = l.v;
    j["amplitude"] = l.amplitude;
    j["phase"] = l.phase;
    out << j.dump() << '\n';
  }
}

inline std::vector<ToyFactorLabels> read_toy_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open labels file '" + path + "'");
  std::vector<ToyFactorLabels> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line);
    out.push_back({j.at("graph_index").get<std::size_t>(), j.at("u").get<std::size_t>(), j.at("v").get<std::size_t>(),
                   j.at("amplitude").get<double>(), j.at("phase").get<double>()});
  }
  return out;
}

}  // namespace d2g2
