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
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2g2 {

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One statistic for one graph. Per-node statistics list active nodes in index
// order; `degenerate` counts samples dropped because the statistic is undefined.
struct StatisticVector {
  std::string name;
  std::vector<double> values;
  std::size_t degenerate = 0;
};

namespace stat_names {
inline constexpr const char* betweenness = "betweenness";
inline constexpr const char* broadcast = "broadcast";
inline constexpr const char* burstiness = "burstiness";
inline constexpr const char* node_temporal_correlation = "node_temporal_correlation";
inline constexpr const char* receive = "receive";
inline constexpr const char* temporal_correlation = "temporal_correlation";
}  // namespace stat_names

namespace detail {

inline std::vector<std::size_t> active_nodes(const GraphSnapshot& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.node_mask.size(); ++i)
    if (s.node_mask[i]) out.push_back(i);
  return out;
}

// Binary adjacency restricted to the active nodes, relabelled 0..k-1.
inline Matrix active_adjacency(const GraphSnapshot& s, const std::vector<std::size_t>& act) {
  const auto k = static_cast<Eigen::Index>(act.size());
  Matrix a = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      if (i != j && s.adjacency(act[i], act[j]) >= 0.5) a(i, j) = 1.0;
  return a;
}

inline std::vector<std::vector<std::size_t>> neighbour_lists(const Matrix& a) {
  std::vector<std::vector<std::size_t>> adj(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) adj[i].push_back(static_cast<std::size_t>(j));
  return adj;
}

// Brandes' algorithm on an unweighted undirected graph; each unordered pair
// counted once.
inline std::vector<double> brandes_betweenness(const Matrix& a) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  const auto adj = neighbour_lists(a);
  std::vector<double> cb(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> pred(n);
    std::vector<double> sigma(n, 0.0);
    std::vector<long> dist(n, -1);
    sigma[s] = 1.0;
    dist[s] = 0;
    std::deque<std::size_t> q{s};
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop_front();
      stack.push_back(v);
      for (std::size_t w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          pred[w].push_back(v);
        }
      }
    }
    std::vector<double> delta(n, 0.0);
    while (!stack.empty()) {
      const std::size_t w = stack.back();
      stack.pop_back();
      for (std::size_t v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) cb[w] += delta[w];
    }
  }
  for (double& v : cb) v *= 0.5;
  return cb;
}

}  // namespace detail

// Per-snapshot shortest-path betweenness on the active subgraph, normalised
// by (k-1)(k-2)/2 and averaged over snapshots. Snapshots with fewer than three
// active nodes contribute zero.
inline StatisticVector betweenness_stat(const DynamicGraph& g) {
  StatisticVector out{stat_names::betweenness, {}, 0};
  if (g.num_snapshots() == 0) return out;
  const auto act = detail::active_nodes(g[0]);
  const std::size_t k = act.size();
  out.values.assign(k, 0.0);
  for (const auto& s : g.snapshots) {
    if (k < 3) continue;
    const auto cb = detail::brandes_betweenness(detail::active_adjacency(s, act));
    const double norm = static_cast<double>((k - 1) * (k - 2)) / 2.0;
    for (std::size_t i = 0; i < k; ++i) out.values[i] += cb[i] / norm;
  }
  for (double& v : out.values) v /= static_cast<double>(g.num_snapshots());
  return out;
}

struct CommunicabilityStats {
  StatisticVector broadcast;
  StatisticVector receive;
  double alpha = 0.0;
};

inline double spectral_radius(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  if (a.isApprox(a.transpose(), 0.0)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Dynamic communicability Q = prod_t (I - alpha A_t)^-1 in temporal order;
// broadcast = row sums / k, receive = column sums / k over the k active nodes.
// Default alpha = 0.9 / max_t rho(A_t), or 0.1 when every snapshot is empty.
inline CommunicabilityStats communicability_stats(const DynamicGraph& g, std::optional<double> alpha = std::nullopt) {
  CommunicabilityStats out;
  out.broadcast.name = stat_names::broadcast;
  out.receive.name = stat_names::receive;
  if (g.num_snapshots() == 0) return out;
  const auto act = detail::active_nodes(g[0]);
  const auto k = static_cast<Eigen::Index>(act.size());
  std::vector<Matrix> adj;
  double rho_max = 0.0;
  for (const auto& s : g.snapshots) {
    adj.push_back(detail::active_adjacency(s, act));
    rho_max = std::max(rho_max, spectral_radius(adj.back()));
  }
  const double a = alpha ? *alpha : (rho_max > 0.0 ? 0.9 / rho_max : 0.1);
  out.alpha = a;
  if (a * rho_max >= 1.0)
    throw PreconditionError("communicability_stats: alpha * spectral radius = " + std::to_string(a * rho_max) +
                            " must be below 1");
  Matrix q = Matrix::Identity(k, k);
  for (std::size_t t = 0; t < adj.size(); ++t) {
    Matrix m = Matrix::Identity(k, k) - a * adj[t];
    Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible())
      throw PreconditionError("communicability_stats: I - alpha A_t is singular at snapshot " + std::to_string(t));
    q = q * lu.inverse();
  }
  const double inv_k = k > 0 ? 1.0 / static_cast<double>(k) : 0.0;
  const Vector rows = q.rowwise().sum() * inv_k;
  const RowVector colsums = q.colwise().sum() * inv_k;
  out.broadcast.values.assign(rows.data(), rows.data() + rows.size());
  out.receive.values.assign(colsums.data(), colsums.data() + colsums.size());
  return out;
}

// (sigma - m) / (sigma + m) of the gaps between snapshots in which a node has
// at least one edge. Nodes with fewer than two active snapshots are dropped
// and counted as degenerate.
inline StatisticVector burstiness_stat(const DynamicGraph& g) {
  StatisticVector out{stat_names::burstiness, {}, 0};
  if (g.num_snapshots() == 0) return out;
  const auto act = detail::active_nodes(g[0]);
  std::vector<Matrix> adj;
  for (const auto& s : g.snapshots) adj.push_back(detail::active_adjacency(s, act));
  for (std::size_t i = 0; i < act.size(); ++i) {
    std::vector<double> times;
    for (std::size_t t = 0; t < adj.size(); ++t)
      if (adj[t].row(static_cast<Eigen::Index>(i)).sum() > 0.0) times.push_back(static_cast<double>(t));
    if (times.size() < 2) {
      ++out.degenerate;
      continue;
    }
    std::vector<double> gaps;
    for (std::size_t k = 1; k < times.size(); ++k) gaps.push_back(times[k] - times[k - 1]);
    double m = 0.0;
    for (double x : gaps) m += x;
    m /= static_cast<double>(gaps.size());
    double var = 0.0;
    for (double x : gaps) var += (x - m) * (x - m);
    const double sd = std::sqrt(var / static_cast<double>(gaps.size()));
    out.values.push_back((sd - m) / (sd + m));
  }
  return out;
}

struct TemporalCorrelation {
  StatisticVector per_node;  // node temporal correlation
  double graph = 0.0;        // mean over active nodes
};

// C_i = 1/(T-1) sum_t overlap(t, t+1) / sqrt(deg_t deg_{t+1}); zero-denominator
// terms contribute 0.
inline TemporalCorrelation temporal_correlation(const DynamicGraph& g) {
  if (g.num_snapshots() < 2) throw std::invalid_argument("temporal_correlation: need at least 2 snapshots");
  const auto act = detail::active_nodes(g[0]);
  std::vector<Matrix> adj;
  for (const auto& s : g.snapshots) adj.push_back(detail::active_adjacency(s, act));
  TemporalCorrelation out;
  out.per_node.name = stat_names::node_temporal_correlation;
  const double steps = static_cast<double>(adj.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < act.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    double c = 0.0;
    for (std::size_t t = 0; t + 1 < adj.size(); ++t) {
      const double overlap = adj[t].row(r).dot(adj[t + 1].row(r));
      const double denom = std::sqrt(adj[t].row(r).sum() * adj[t + 1].row(r).sum());
      if (denom > 0.0) c += overlap / denom;
    }
    c /= steps;
    out.per_node.values.push_back(c);
    total += c;
  }
  out.graph = act.empty() ? 0.0 : total / static_cast<double>(act.size());
  return out;
}

struct MmdResult {
  double value = 0.0;      // floored at 0
  double raw = 0.0;        // before flooring
  double bandwidth = 1.0;  // kernel sigma actually used
};

inline constexpr std::size_t kMmdMaxSamples = 2000;

namespace detail {

// Evenly spaced order statistics of a sorted sample, capped at kMmdMaxSamples.
inline std::vector<double> pooled_sorted(const std::vector<StatisticVector>& set) {
  std::vector<double> v;
  for (const auto& s : set) v.insert(v.end(), s.values.begin(), s.values.end());
  std::sort(v.begin(), v.end());
  if (v.size() <= kMmdMaxSamples) return v;
  std::vector<double> out(kMmdMaxSamples);
  for (std::size_t k = 0; k < kMmdMaxSamples; ++k) out[k] = v[(k * (v.size() - 1)) / (kMmdMaxSamples - 1)];
  return out;
}

inline double median_pairwise_distance(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> all(x);
  all.insert(all.end(), y.begin(), y.end());
  if (all.size() < 2) return 0.0;
  std::vector<double> d;
  d.reserve(all.size() * (all.size() - 1) / 2);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) d.push_back(std::abs(all[i] - all[j]));
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  if (d.size() % 2 == 1) return d[mid];
  const double upper = d[mid];
  const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

inline double mean_kernel(const std::vector<double>& a, const std::vector<double>& b, double inv_two_s2) {
  double s = 0.0;
  for (double x : a)
    for (double y : b) s += std::exp(-(x - y) * (x - y) * inv_two_s2);
  return s / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace detail

// Biased (V-statistic) squared MMD between pooled scalar samples with a
// Gaussian kernel; bandwidth defaults to the median pairwise distance of the
// pooled sample (1 when that median is 0).
inline MmdResult mmd(const std::vector<StatisticVector>& real, const std::vector<StatisticVector>& gen,
                     std::optional<double> bandwidth = std::nullopt) {
  std::vector<double> x = detail::pooled_sorted(real);
  std::vector<double> y = detail::pooled_sorted(gen);
  if (x.empty() || y.empty()) throw std::invalid_argument("mmd: both samples must be nonempty");
  // Canonical argument order makes the estimate exactly symmetric.
  if (std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end())) std::swap(x, y);
  MmdResult r;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw std::invalid_argument("mmd: bandwidth must be positive");
    r.bandwidth = *bandwidth;
  } else {
    const double med = detail::median_pairwise_distance(x, y);
    r.bandwidth = med > 0.0 ? med : 1.0;
  }
  const double inv = 1.0 / (2.0 * r.bandwidth * r.bandwidth);
  r.raw = detail::mean_kernel(x, x, inv) + detail::mean_kernel(y, y, inv) - 2.0 * detail::mean_kernel(x, y, inv);
  r.value = std::max(0.0, r.raw);
  return r;
}

inline MmdResult mmd(const std::vector<double>& real, const std::vector<double>& gen,
                     std::optional<double> bandwidth = std::nullopt) {
  return mmd(std::vector<StatisticVector>{{"", real, 0}}, std::vector<StatisticVector>{{"", gen, 0}}, bandwidth);
}

struct NodeAttributeMetrics {
  std::optional<double> mse;
  std::optional<double> r2;   // undefined for a zero-variance reference
  std::optional<double> pcc;  // undefined when either side has zero variance
  std::size_t pairs = 0;
  std::size_t entries = 0;
};

inline double mean_feature(const DynamicGraph& g) {
  double s = 0.0;
  std::size_t k = 0;
  for (const auto& snap : g.snapshots)
    for (Eigen::Index i = 0; i < snap.features.rows(); ++i)
      if (snap.node_mask[i])
        for (Eigen::Index c = 0; c < snap.features.cols(); ++c) {
          s += snap.features(i, c);
          ++k;
        }
  return k ? s / static_cast<double>(k) : 0.0;
}

namespace detail {

// Sort key: mean feature, then the raw feature values for ties.
inline std::vector<std::size_t> rank_order(const std::vector<DynamicGraph>& set) {
  std::vector<double> means;
  for (const auto& g : set) means.push_back(mean_feature(g));
  std::vector<std::size_t> idx(set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto flat = [&set](std::size_t i) {
    std::vector<double> v;
    for (const auto& s : set[i].snapshots) v.insert(v.end(), s.features.data(), s.features.data() + s.features.size());
    return v;
  };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (means[a] != means[b]) return means[a] < means[b];
    const auto fa = flat(a), fb = flat(b);
    return std::lexicographical_compare(fa.begin(), fa.end(), fb.begin(), fb.end());
  });
  return idx;
}

}  // namespace detail

// Rank pairing: both sets sorted by mean feature value; with m = min(|real|,
// |gen|) pairs, pair k takes the k-th evenly spaced element of each ordering.
// Entries are compared where both graphs have the node active.
inline NodeAttributeMetrics node_attribute_metrics(const std::vector<DynamicGraph>& real,
                                                   const std::vector<DynamicGraph>& gen) {
  if (real.empty() || gen.empty()) throw std::invalid_argument("node_attribute_metrics: empty set");
  const auto ro = detail::rank_order(real), go = detail::rank_order(gen);
  const std::size_t m = std::min(real.size(), gen.size());
  std::vector<double> ref, pred;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& r = real[ro[(k * real.size()) / m]];
    const auto& g = gen[go[(k * gen.size()) / m]];
    if (r.num_nodes() != g.num_nodes() || r.feature_dim() != g.feature_dim())
      throw DimensionError("node_attribute_metrics: paired graphs differ in node count or feature width");
    const std::size_t T = std::min(r.num_snapshots(), g.num_snapshots());
    for (std::size_t t = 0; t < T; ++t)
      for (Eigen::Index i = 0; i < r[t].features.rows(); ++i) {
        if (!r[t].node_mask[i] || !g[t].node_mask[i]) continue;
        for (Eigen::Index c = 0; c < r[t].features.cols(); ++c) {
          ref.push_back(r[t].features(i, c));
          pred.push_back(g[t].features(i, c));
        }
      }
  }
  NodeAttributeMetrics out;
  out.pairs = m;
  out.entries = ref.size();
  if (ref.empty()) return out;
  const double nn = static_cast<double>(ref.size());
  double mr = 0.0, mp = 0.0, sse = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    mr += ref[k];
    mp += pred[k];
    sse += (ref[k] - pred[k]) * (ref[k] - pred[k]);
  }
  mr /= nn;
  mp /= nn;
  double sst = 0.0, spp = 0.0, srp = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    sst += (ref[k] - mr) * (ref[k] - mr);
    spp += (pred[k] - mp) * (pred[k] - mp);
    srp += (ref[k] - mr) * (pred[k] - mp);
  }
  // Zero variance means all entries equal; rounding in the mean must not hide that.
  auto varies = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo != *hi;
  };
  const bool ref_varies = varies(ref), pred_varies = varies(pred);
  out.mse = sse / nn;
  if (ref_varies) out.r2 = 1.0 - sse / sst;
  if (ref_varies && pred_varies) out.pcc = std::clamp(srp / std::sqrt(sst * spp), -1.0, 1.0);
  return out;
}

// All six statistics of one graph.
struct GraphStatistics {
  StatisticVector betweenness;
  StatisticVector broadcast;
  StatisticVector receive;
  StatisticVector burstiness;
  StatisticVector node_temporal_correlation;
  StatisticVector temporal_correlation;  // one value per graph
};

inline GraphStatistics graph_statistics(const DynamicGraph& g) {
  GraphStatistics s;
  s.betweenness = betweenness_stat(g);
  auto comm = communicability_stats(g);
  s.broadcast = std::move(comm.broadcast);
  s.receive = std::move(comm.receive);
  s.burstiness = burstiness_stat(g);
  auto tc = temporal_correlation(g);
  s.node_temporal_correlation = std::move(tc.per_node);
  s.temporal_correlation = {stat_names::temporal_correlation, {tc.graph}, 0};
  return s;
}

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{stat_names::betweenness, stat_names::broadcast,
                                              stat_names::burstiness, stat_names::node_temporal_correlation,
                                              stat_names::receive, stat_names::temporal_correlation};
  return names;
}

struct MetricEntry {
  std::string name;
  std::optional<double> mmd;  // undefined when a pooled sample is empty
  double bandwidth = 0.0;
  std::size_t real_degenerate = 0;
  std::size_t gen_degenerate = 0;
  std::size_t real_samples = 0;
  std::size_t gen_samples = 0;
};

struct EvalReport {
  std::vector<MetricEntry> metrics;  // in metric_names() order
  NodeAttributeMetrics attributes;
  std::size_t real_size = 0;
  std::size_t gen_size = 0;
  std::string pairing = "rank_by_mean_feature";

  const MetricEntry& metric(const std::string& name) const {
    for (const auto& m : metrics)
      if (m.name == name) return m;
    throw std::out_of_range("no metric named '" + name + "'");
  }
};

namespace detail {

inline std::vector<GraphStatistics> statistics_for(const std::vector<DynamicGraph>& set, std::size_t jobs) {
  std::vector<GraphStatistics> out(set.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < set.size(); ++i) out[i] = graph_statistics(set[i]);
    return out;
  }
  for (std::size_t s0 = 0; s0 < set.size(); s0 += jobs) {
    std::vector<std::future<void>> fs;
    for (std::size_t i = s0; i < std::min(set.size(), s0 + jobs); ++i)
      fs.push_back(std::async(std::launch::async, [&out, &set, i] { out[i] = graph_statistics(set[i]); }));
    for (auto& f : fs) f.get();
  }
  return out;
}

inline std::vector<StatisticVector> select(const std::vector<GraphStatistics>& st, const std::string& name) {
  std::vector<StatisticVector> out;
  for (const auto& s : st) {
    if (name == stat_names::betweenness) out.push_back(s.betweenness);
    else if (name == stat_names::broadcast) out.push_back(s.broadcast);
    else if (name == stat_names::receive) out.push_back(s.receive);
    else if (name == stat_names::burstiness) out.push_back(s.burstiness);
    else if (name == stat_names::node_temporal_correlation) out.push_back(s.node_temporal_correlation);
    else out.push_back(s.temporal_correlation);
  }
  return out;
}

}  // namespace detail

// Compares a real and a generated set on all six statistics and the node
// attributes. Results do not depend on the order of graphs in either set.
inline EvalReport evaluate(const std::vector<DynamicGraph>& real, const std::vector<DynamicGraph>& gen,
                           std::size_t jobs = 1) {
  if (real.empty() || gen.empty()) throw std::invalid_argument("evaluate: both sets must be nonempty");
  const auto rs = detail::statistics_for(real, jobs);
  const auto gs = detail::statistics_for(gen, jobs);
  EvalReport rep;
  rep.real_size = real.size();
  rep.gen_size = gen.size();
  for (const auto& name : metric_names()) {
    const auto rv = detail::select(rs, name), gv = detail::select(gs, name);
    MetricEntry e;
    e.name = name;
    for (const auto& v : rv) {
      e.real_degenerate += v.degenerate;
      e.real_samples += v.values.size();
    }
    for (const auto& v : gv) {
      e.gen_degenerate += v.degenerate;
      e.gen_samples += v.values.size();
    }
    if (e.real_samples > 0 && e.gen_samples > 0) {
      const auto r = mmd(rv, gv);
      e.mmd = r.value;
      e.bandwidth = r.bandwidth;
    }
    rep.metrics.push_back(std::move(e));
  }
  rep.attributes = node_attribute_metrics(real, gen);
  return rep;
}

inline nlohmann::ordered_json to_json(const EvalReport& rep) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
  nlohmann::ordered_json j;
  j["real_graphs"] = rep.real_size;
  j["generated_graphs"] = rep.gen_size;
  nlohmann::ordered_json mm, bw, deg;
  for (const auto& m : rep.metrics) {
    mm[m.name] = opt(m.mmd);
    bw[m.name] = m.bandwidth;
    deg[m.name] = {{"real", m.real_degenerate}, {"generated", m.gen_degenerate}};
  }
  j["mmd"] = std::move(mm);
  j["bandwidth"] = std::move(bw);
  j["degenerate"] = std::move(deg);
  nlohmann::ordered_json attr;
  attr["mse"] = opt(rep.attributes.mse);
  attr["r2"] = opt(rep.attributes.r2);
  attr["pcc"] = opt(rep.attributes.pcc);
  attr["pairs"] = rep.attributes.pairs;
  attr["entries"] = rep.attributes.entries;
  attr["pairing"] = rep.pairing;
  j["node_attributes"] = std::move(attr);
  return j;
}

// Text table with one row per metric, as printed by the CLI.
inline std::string format_table(const EvalReport& rep) {
  auto num = [](const std::optional<double>& v) {
    if (!v) return std::string("undefined");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", *v);
    return std::string(buf);
  };
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-28s %12s %12s %12s\n", "metric", "MMD", "degen(real)", "degen(gen)");
  os << line;
  for (const auto& m : rep.metrics) {
    std::snprintf(line, sizeof line, "%-28s %12s %12zu %12zu\n", m.name.c_str(), num(m.mmd).c_str(),
                  m.real_degenerate, m.gen_degenerate);
    os << line;
  }
  std::snprintf(line, sizeof line, "%-28s %12s\n%-28s %12s\n%-28s %12s\n", "attribute MSE",
                num(rep.attributes.mse).c_str(), "attribute R2", num(rep.attributes.r2).c_str(), "attribute PCC",
                num(rep.attributes.pcc).c_str());
  os << line;
  return os.str();
}

}  // namespace d2g2
