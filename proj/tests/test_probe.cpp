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

namespace {

using namespace d2g2;
using namespace d2g2::testing;

Model probe_model(ModelVariant v = ModelVariant::standard) {
  const auto ds = generate_toy_disentangled(2, 5, 4, 9).data;
  TrainConfig cfg;
  cfg.variant = v;
  cfg.d_f = 3;
  cfg.d_z = 2;
  cfg.h = 6;
  cfg.L = 2;
  cfg.seed = 3;
  return make_model(ds, cfg);
}

TEST(Traverse, ControlHasNoVariation) {
  const Model m = probe_model();
  const ProbeResult r = traverse(m, LatentFactor::none, 4, 11);
  EXPECT_EQ(r.graphs.size(), 4u);
  EXPECT_EQ(r.edge_variation, 0.0);
  EXPECT_EQ(r.node_variation, 0.0);
  for (double v : r.per_snapshot_variation) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.per_snapshot_cv, 0.0);
}

TEST(Traverse, NodeFactorLeavesEdgesUntouched) {
  const Model m = probe_model();
  const ProbeResult r = traverse(m, LatentFactor::z_node, 5, 2);
  EXPECT_EQ(r.edge_variation, 0.0);
  EXPECT_GT(r.node_variation, 0.0);
}

TEST(Traverse, EdgeFactorLeavesFeaturesUntouched) {
  const Model m = probe_model();
  const ProbeResult r = traverse(m, LatentFactor::z_edge, 5, 2);
  EXPECT_EQ(r.node_variation, 0.0);
  EXPECT_GT(r.edge_variation, 0.0);
}

TEST(Traverse, SharedFactorsMoveBoth) {
  const Model m = probe_model();
  for (LatentFactor f : {LatentFactor::f, LatentFactor::z_joint}) {
    const ProbeResult r = traverse(m, f, 5, 2);
    EXPECT_GT(r.edge_variation, 0.0) << to_string(f);
    EXPECT_GT(r.node_variation, 0.0) << to_string(f);
  }
}

TEST(Traverse, StaticFactorSpreadsOverAllSnapshots) {
  const Model m = probe_model();
  const ProbeResult r = traverse(m, LatentFactor::f, 6, 8);
  ASSERT_EQ(r.per_snapshot_variation.size(), 4u);
  for (double v : r.per_snapshot_variation) EXPECT_GT(v, 0.0);
  EXPECT_GE(r.within_time_variation, 0.0);
}

TEST(Traverse, NeedsTwoSamplesAndIsDeterministic) {
  const Model m = probe_model();
  EXPECT_THROW(traverse(m, LatentFactor::f, 1, 0), std::invalid_argument);
  const auto a = to_json(traverse(m, LatentFactor::z_joint, 3, 21));
  const auto b = to_json(traverse(m, LatentFactor::z_joint, 3, 21));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["varied_factor"], "z_joint");
  EXPECT_EQ(a["samples"], 3);
  for (const char* k : {"edge_variation", "node_variation", "within_time_variation", "per_snapshot_variation",
                        "per_snapshot_cv"})
    EXPECT_TRUE(a.contains(k)) << k;
}

TEST(Traverse, AroundEncodedGraph) {
  const auto ds = generate_toy_disentangled(2, 5, 4, 9).data;
  const Model m = probe_model();
  const LatentState base = encode_mean_state(m, ds.graphs[0]);
  EXPECT_EQ(base.num_snapshots(), 4u);
  EXPECT_EQ(base.f.size(), 3);
  EXPECT_EQ(base.z_edge.cols(), 2);
  const ProbeResult r = traverse_from(m, base, LatentFactor::z_node, 3, 4);
  EXPECT_EQ(r.edge_variation, 0.0);
  EXPECT_GT(r.node_variation, 0.0);
}

TEST(Variants, MergedLatentMovesBothOutputs) {
  const Model m = probe_model(ModelVariant::merged_z);
  EXPECT_EQ(m.dims.latent, (LatentDims{3, 0, 0, 6}));
  const ProbeResult r = traverse(m, LatentFactor::z_joint, 4, 1);
  EXPECT_GT(r.edge_variation, 0.0);
  EXPECT_GT(r.node_variation, 0.0);
  const ProbeResult e = traverse(m, LatentFactor::z_edge, 4, 1);
  EXPECT_EQ(e.edge_variation, 0.0);
  EXPECT_EQ(e.node_variation, 0.0);
}

TEST(Variants, NoStaticFactorHasNoEffectFromF) {
  const Model m = probe_model(ModelVariant::no_f);
  EXPECT_EQ(m.dims.latent, (LatentDims{0, 3, 3, 3}));
  const ProbeResult r = traverse(m, LatentFactor::f, 3, 5);
  EXPECT_EQ(r.edge_variation, 0.0);
  EXPECT_EQ(r.node_variation, 0.0);
}

TEST(Ablations, TrainAndReportVariant) {
  const auto ds = generate_toy_disentangled(4, 5, 3, 2).data;
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 2;
  cfg.d_f = 3;
  cfg.d_z = 2;
  cfg.h = 4;
  cfg.L = 1;
  const TrainResult a = ablation_no_f(ds, cfg);
  EXPECT_EQ(model_metadata(a.model)["d_f"], 0);
  EXPECT_EQ(model_metadata(a.model)["variant"], "no_f");
  EXPECT_EQ(a.report.epochs.size(), 2u);
  for (const auto& e : a.report.epochs) EXPECT_EQ(e.kl_f, 0.0);
  const TrainResult b = ablation_merged_z(ds, cfg);
  EXPECT_EQ(model_metadata(b.model)["d_joint"], 6);
  EXPECT_EQ(model_metadata(b.model)["d_z"], 2);
  for (const auto& e : b.report.epochs) {
    EXPECT_EQ(e.kl_edge, 0.0);
    EXPECT_EQ(e.kl_node, 0.0);
  }
}

TEST(Factors, ParseNames) {
  EXPECT_EQ(parse_latent_factor("z_edge"), LatentFactor::z_edge);
  EXPECT_EQ(parse_latent_factor("none"), LatentFactor::none);
  EXPECT_THROW(parse_latent_factor("z"), std::invalid_argument);
}

}  // namespace
