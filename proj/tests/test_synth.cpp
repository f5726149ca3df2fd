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

#include <algorithm>
#include <cstdio>
#include <filesystem>

namespace {

using namespace d2g2;
using namespace d2g2::testing;

TEST(DynamicBa, SmallStreamTimes) {
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const TimedEdgeStream s = generate_dynamic_ba(3, 1, seed);
    ASSERT_EQ(s.events.size(), 2u);
    EXPECT_EQ(s.events[0].t, 0.5);
    EXPECT_EQ(s.events[1].t, 1.0);
  }
}

TEST(DynamicBa, StreamInvariants) {
  const TimedEdgeStream s = generate_dynamic_ba(100, 3, 4);
  EXPECT_EQ(s.n, 100u);
  EXPECT_EQ(s.events.size(), 97u * 3u);
  for (std::size_t k = 0; k < s.events.size(); ++k) {
    EXPECT_LT(s.events[k].i, s.events[k].j);
    EXPECT_LT(s.events[k].j, 100u);
    if (k) EXPECT_LE(s.events[k - 1].t, s.events[k].t);
  }
  EXPECT_EQ(s.events.back().t, 1.0);
}

TEST(DynamicBa, NoDuplicateEdges) {
  const TimedEdgeStream s = generate_dynamic_ba(200, 4, 2);
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (const auto& x : s.events) e.emplace_back(x.i, x.j);
  std::sort(e.begin(), e.end());
  EXPECT_EQ(std::adjacent_find(e.begin(), e.end()), e.end());
}

TEST(DynamicBa, Deterministic) {
  const auto a = generate_dynamic_ba(500, 2, 7), b = generate_dynamic_ba(500, 2, 7);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t k = 0; k < a.events.size(); ++k) {
    EXPECT_EQ(a.events[k].i, b.events[k].i);
    EXPECT_EQ(a.events[k].j, b.events[k].j);
    EXPECT_EQ(a.events[k].t, b.events[k].t);
  }
}

TEST(DynamicBa, InvalidParameters) {
  EXPECT_THROW(generate_dynamic_ba(3, 3, 1), std::invalid_argument);
  EXPECT_THROW(generate_dynamic_ba(3, 0, 1), std::invalid_argument);
}

TEST(DynamicBa, HeavyTailedDegrees) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TimedEdgeStream s = generate_dynamic_ba(500, 2, seed);
    std::vector<double> deg(500, 0.0);
    for (const auto& e : s.events) {
      deg[e.i] += 1;
      deg[e.j] += 1;
    }
    std::vector<double> sorted = deg;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[249] + sorted[250]);
    EXPECT_GE(sorted.back(), 5.0 * median) << "seed " << seed;
  }
}

TimedEdgeStream two_events() { return {3, {{0, 1, 0.5}, {1, 2, 1.0}}}; }

TEST(Discretize, Cumulative) {
  const DynamicGraph g = discretize(two_events(), 2, true);
  ASSERT_EQ(g.num_snapshots(), 2u);
  EXPECT_EQ(g[0].num_edges(), 1u);
  EXPECT_EQ(g[1].num_edges(), 2u);
  EXPECT_EQ(g.feature_dim(), 0u);
}

TEST(Discretize, PerBin) {
  const DynamicGraph g = discretize(two_events(), 2, false);
  EXPECT_EQ(g[0].num_edges(), 1u);
  EXPECT_EQ(g[1].num_edges(), 1u);
  EXPECT_EQ(g[1].adjacency(1, 2), 1.0);
}

TEST(Discretize, SingleSnapshotHoldsEverything) {
  for (bool c : {true, false}) EXPECT_EQ(discretize(two_events(), 1, c)[0].num_edges(), 2u);
}

TEST(Discretize, CumulativeSnapshotsAreMonotone) {
  const DynamicGraph g = discretize(generate_dynamic_ba(60, 2, 3), 7);
  for (std::size_t t = 0; t + 1 < g.num_snapshots(); ++t)
    EXPECT_TRUE(((g[t].adjacency - g[t + 1].adjacency).array() <= 0.0).all());
  EXPECT_TRUE(validate(g).empty());
}

TEST(SyntheticFeatures, DegreeOfPath) {
  const DynamicGraph g = attach_synthetic_features(graph_from_edges(3, {{{0, 1}, {1, 2}}}, 0), FeatureMode::degree, 1);
  ASSERT_EQ(g.feature_dim(), 1u);
  EXPECT_EQ(g[0].features(0, 0), 1.0);
  EXPECT_EQ(g[0].features(1, 0), 2.0);
  EXPECT_EQ(g[0].features(2, 0), 1.0);
}

TEST(SyntheticFeatures, EmptySnapshotIsZero) {
  const DynamicGraph g = attach_synthetic_features(graph_from_edges(4, {{}}, 0), FeatureMode::degree, 1);
  EXPECT_TRUE(g[0].features.isZero(0.0));
}

TEST(SyntheticFeatures, NoiseIsSeeded) {
  const DynamicGraph base = discretize(generate_dynamic_ba(30, 2, 1), 3);
  const DynamicGraph a = attach_synthetic_features(base, FeatureMode::noise, 5);
  EXPECT_EQ(a, attach_synthetic_features(base, FeatureMode::noise, 5));
  EXPECT_FALSE(a == attach_synthetic_features(base, FeatureMode::noise, 6));
  EXPECT_FALSE(a == attach_synthetic_features(base, FeatureMode::degree, 5));
}

TEST(ToyDataset, ProteinSizedShape) {
  const ToyDataset t = generate_toy_disentangled(300, 8, 100, 1);
  EXPECT_EQ(t.data.size(), 300u);
  EXPECT_EQ(t.data.n_max, 8u);
  EXPECT_EQ(t.data.T, 100u);
  EXPECT_EQ(t.data.c, 3u);
  EXPECT_EQ(t.labels.size(), 300u);
}

TEST(ToyDataset, ChainAndOneContactPerSnapshot) {
  for (std::size_t n : {3u, 5u, 8u}) {
    const ToyDataset t = generate_toy_disentangled(20, n, 6, 11);
    for (const auto& g : t.data.graphs) {
      EXPECT_TRUE(validate(g).empty());
      for (const auto& s : g.snapshots) {
        EXPECT_EQ(s.num_edges(), n);
        for (std::size_t i = 0; i + 1 < n; ++i)
          EXPECT_EQ(s.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)), 1.0);
      }
    }
  }
}

TEST(ToyDataset, ContactRotates) {
  const ToyDataset t = generate_toy_disentangled(10, 8, 6, 2);
  for (const auto& g : t.data.graphs) EXPECT_FALSE(g[0] == g[1]);
}

TEST(ToyDataset, LabelsRegenerateGraphs) {
  const ToyDataset t = generate_toy_disentangled(15, 8, 10, 4);
  for (std::size_t k = 0; k < t.labels.size(); ++k) {
    EXPECT_EQ(t.labels[k].graph_index, k);
    EXPECT_EQ(toy_graph_from_labels(t.labels[k], 8, 10), t.data.graphs[k]);
  }
}

TEST(ToyDataset, LabelSidecarRoundTrip) {
  const ToyDataset t = generate_toy_disentangled(5, 6, 4, 9);
  const auto path = (std::filesystem::temp_directory_path() / "d2g2_labels_test.jsonl").string();
  write_toy_labels(t.labels, path);
  const auto back = read_toy_labels(path);
  std::remove(path.c_str());
  ASSERT_EQ(back.size(), t.labels.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k], t.labels[k]);
    EXPECT_EQ(toy_graph_from_labels(back[k], 6, 4), t.data.graphs[k]);
  }
}

TEST(ToyDataset, DeterministicAndPreconditions) {
  EXPECT_EQ(generate_toy_disentangled(4, 5, 3, 8).data, generate_toy_disentangled(4, 5, 3, 8).data);
  EXPECT_THROW(generate_toy_disentangled(4, 2, 3, 8), std::invalid_argument);
  EXPECT_THROW(generate_toy_disentangled(4, 5, 1, 8), std::invalid_argument);
}

}  // namespace
