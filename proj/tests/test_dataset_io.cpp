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

#include <sstream>

namespace {

using namespace d2g2;
using namespace d2g2::testing;

std::string write(const DynamicGraphDataset& ds) {
  std::ostringstream os;
  write_dataset(ds, os);
  return os.str();
}

DynamicGraphDataset read(const std::string& s) {
  std::istringstream is(s);
  return read_dataset(is);
}

TEST(DatasetIo, SingleGraphRoundTrip) {
  DynamicGraphDataset ds;
  ds.n_max = 2;
  ds.T = 1;
  ds.c = 1;
  DynamicGraph g = graph_from_edges(2, {{{0, 1}}});
  g[0].features << 0.5, 1.0;
  ds.graphs = {g};
  const std::string text = write(ds);
  EXPECT_EQ(text, "{\"n_max\":2,\"T\":1,\"c\":1}\n"
                  "{\"n\":2,\"snapshots\":[{\"edges\":[[0,1]],\"features\":[[0.5],[1.0]]}]}\n");
  EXPECT_EQ(read(text), ds);
}

TEST(DatasetIo, EmptyInputs) {
  const DynamicGraphDataset zero = read("");
  EXPECT_TRUE(zero.empty());
  EXPECT_EQ(zero.n_max, 0u);
  const DynamicGraphDataset header_only = read("{\"n_max\": 5, \"T\": 3, \"c\": 2}\n");
  EXPECT_TRUE(header_only.empty());
  EXPECT_EQ(header_only.n_max, 5u);
  EXPECT_EQ(header_only.T, 3u);
  EXPECT_EQ(header_only.c, 2u);
}

TEST(DatasetIo, EndpointOutOfRange) {
  const std::string text =
      "{\"n_max\":2,\"T\":1,\"c\":1}\n{\"n\":2,\"snapshots\":[{\"edges\":[[0,5]],\"features\":[[0],[0]]}]}\n";
  try {
    read(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("edge endpoint out of range"), std::string::npos);
    EXPECT_EQ(e.field(), "snapshots[0].edges");
  }
}

TEST(DatasetIo, MalformedRecordsNameLineAndField) {
  const std::string hdr = "{\"n_max\":2,\"T\":1,\"c\":1}\n";
  auto field_of = [&](const std::string& rec) {
    try {
      read(hdr + rec + "\n");
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 2u);
      return e.field();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field_of("{\"snapshots\":[]}"), "n");
  EXPECT_EQ(field_of("{\"n\":2,\"snapshots\":[]}"), "snapshots");
  EXPECT_EQ(field_of("{\"n\":3,\"snapshots\":[]}"), "n");
  EXPECT_EQ(field_of("{\"n\":2,\"snapshots\":[{\"edges\":[[1,1]],\"features\":[[0],[0]]}]}"),
            "snapshots[0].edges");
  EXPECT_EQ(field_of("{\"n\":2,\"snapshots\":[{\"edges\":[],\"features\":[[0]]}]}"), "snapshots[0].features");
  EXPECT_EQ(field_of("{\"n\":2,\"snapshots\":[{\"edges\":[],\"features\":[[0],[\"x\"]]}]}"),
            "snapshots[0].features");
  EXPECT_EQ(field_of("not json"), "<record>");
  EXPECT_THROW(read("{\"T\":1,\"c\":1}\n"), ParseError);
}

TEST(DatasetIo, PadsSmallerGraphs) {
  const std::string text =
      "{\"n_max\":4,\"T\":1,\"c\":1}\n{\"n\":2,\"snapshots\":[{\"edges\":[[0,1]],\"features\":[[1.5],[2.0]]}]}\n";
  const DynamicGraphDataset ds = read(text);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.graphs[0].num_nodes(), 4u);
  EXPECT_EQ(ds.graphs[0].num_active(), 2u);
  EXPECT_EQ(write(ds), text);
}

TEST(DatasetIo, RandomRoundTripIsExact) {
  Rng rng(5);
  DynamicGraphDataset ds;
  ds.n_max = 7;
  ds.T = 3;
  ds.c = 2;
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 1 + rng.below(7);
    DynamicGraph g;
    for (std::size_t t = 0; t < 3; ++t) {
      GraphSnapshot s = GraphSnapshot::empty(n, 2);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j)
          if (rng.bernoulli(0.3)) s.set_edge(i, j);
        s.features(static_cast<Eigen::Index>(i), 0) = rng.normal() * 1e3;
        s.features(static_cast<Eigen::Index>(i), 1) = rng.uniform() * 1e-7;
      }
      g.snapshots.push_back(s);
    }
    ds.graphs.push_back(pad_to(g, 7));
  }
  const std::string text = write(ds);
  const DynamicGraphDataset back = read(text);
  EXPECT_EQ(back, ds);
  EXPECT_EQ(write(back), text);
}

TEST(DatasetIo, WriteRejectsNonBinaryEdges) {
  DynamicGraphDataset ds;
  ds.n_max = 2;
  ds.T = 1;
  ds.c = 1;
  DynamicGraph g = graph_from_edges(2, {{}});
  g[0].adjacency(0, 1) = g[0].adjacency(1, 0) = 0.7;
  ds.graphs = {g};
  std::ostringstream os;
  EXPECT_ANY_THROW(write_dataset(ds, os));
}

TEST(DatasetIo, MissingFileThrows) { EXPECT_ANY_THROW(read_dataset(std::string("/nonexistent/d.jsonl"))); }

}  // namespace
