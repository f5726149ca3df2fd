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
#include "d2g2/graph.hpp"
#include "d2g2/nn.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2g2 {

inline constexpr double kLogVarMin = -10.0;
inline constexpr double kLogVarMax = 10.0;

enum class InferenceMode { factorized, full };

inline const char* to_string(InferenceMode m) { return m == InferenceMode::factorized ? "factorized" : "full"; }

inline InferenceMode parse_inference_mode(const std::string& s) {
  if (s == "factorized") return InferenceMode::factorized;
  if (s == "full") return InferenceMode::full;
  throw std::invalid_argument("unknown inference mode '" + s + "' (expected factorized or full)");
}

struct GaussianParams {
  RowVector mean;
  RowVector log_variance;
};

// Posterior parameters for f and for each snapshot's three dynamic factors.
struct PosteriorSet {
  GaussianParams f;
  std::vector<GaussianParams> edge;
  std::vector<GaussianParams> node;
  std::vector<GaussianParams> joint;
};

// mean + exp(log_variance / 2) * noise
inline RowVector reparameterize(const GaussianParams& p, const RowVector& noise) {
  if (p.mean.size() != p.log_variance.size() || noise.size() != p.mean.size())
    throw DimensionError("reparameterize: mean, log_variance and noise lengths differ");
  return p.mean + ((0.5 * p.log_variance.array()).exp() * noise.array()).matrix();
}

inline ad::Var reparameterize(ad::Var mean, ad::Var log_variance, const Matrix& noise) {
  ad::Tape& t = *mean.tape;
  ad::Var std_dev = ad::exp(ad::scale(log_variance, 0.5));
  return ad::add(mean, ad::mul(std_dev, t.constant(noise)));
}

struct EncoderParams {
  ModelDims dims;
  InferenceMode mode = InferenceMode::factorized;

  Dense gcn1;       // 2 -> h, input signal [1, degree]
  Dense gcn2;       // h -> h
  Dense feat;       // n * c -> h
  BiLstm f_rnn;     // 2h -> h
  Dense f_head;     // 2h -> 2 d_f

  // factorized
  Mlp edge_mlp;     // h -> 2 d_edge
  Mlp node_mlp;     // h -> 2 d_node
  Mlp joint_mlp;    // 2h -> 2 d_joint

  // full
  BiLstm edge_rnn;  // h + d_f -> h
  BiLstm node_rnn;
  BiLstm joint_rnn; // 2h + d_f -> h
  Dense edge_head;  // 2h -> 2 d_edge
  Dense node_head;
  Dense joint_head;

  EncoderParams() = default;
  EncoderParams(const ModelDims& d, InferenceMode m) : dims(d), mode(m) {
    const auto h = static_cast<Eigen::Index>(d.hidden);
    const auto n = static_cast<Eigen::Index>(d.n), c = static_cast<Eigen::Index>(d.c);
    const auto df = static_cast<Eigen::Index>(d.latent.f);
    const auto de = static_cast<Eigen::Index>(d.latent.edge), dn = static_cast<Eigen::Index>(d.latent.node),
               dj = static_cast<Eigen::Index>(d.latent.joint);
    gcn1 = Dense(2, h);
    gcn2 = Dense(h, h);
    feat = Dense(n * c, h);
    f_rnn = BiLstm(2 * h, h);
    f_head = Dense(2 * h, 2 * df);
    if (m == InferenceMode::factorized) {
      edge_mlp = Mlp(h, h, 2 * de);
      node_mlp = Mlp(h, h, 2 * dn);
      joint_mlp = Mlp(2 * h, h, 2 * dj);
    } else {
      edge_rnn = BiLstm(h + df, h);
      node_rnn = BiLstm(h + df, h);
      joint_rnn = BiLstm(2 * h + df, h);
      edge_head = Dense(2 * h, 2 * de);
      node_head = Dense(2 * h, 2 * dn);
      joint_head = Dense(2 * h, 2 * dj);
    }
  }

  template <class F>
  void visit(F&& f) {
    gcn1.visit("encoder.gcn1", f);
    gcn2.visit("encoder.gcn2", f);
    feat.visit("encoder.feat", f);
    f_rnn.visit("encoder.f_rnn", f);
    f_head.visit("encoder.f_head", f);
    if (mode == InferenceMode::factorized) {
      edge_mlp.visit("encoder.edge_mlp", f);
      node_mlp.visit("encoder.node_mlp", f);
      joint_mlp.visit("encoder.joint_mlp", f);
    } else {
      edge_rnn.visit("encoder.edge_rnn", f);
      node_rnn.visit("encoder.node_rnn", f);
      joint_rnn.visit("encoder.joint_rnn", f);
      edge_head.visit("encoder.edge_head", f);
      node_head.visit("encoder.node_head", f);
      joint_head.visit("encoder.joint_head", f);
    }
  }

  void init(Rng& rng) {
    visit([&rng](const std::string& name, Matrix& m) {
      const bool is_bias = name.size() >= 5 && name.compare(name.size() - 5, 5, ".bias") == 0;
      if (is_bias)
        m.setZero();
      else
        glorot_uniform(m, rng);
    });
  }

  void fill(double w, double b) {
    visit([&](const std::string& name, Matrix& m) {
      const bool is_bias = name.size() >= 5 && name.compare(name.size() - 5, 5, ".bias") == 0;
      m.setConstant(is_bias ? b : w);
    });
  }
};

// Symmetric normalisation D^-1/2 (A + I) D^-1/2 restricted to active nodes.
inline Matrix normalized_propagation(const GraphSnapshot& s) {
  const auto n = s.adjacency.rows();
  Matrix a = s.adjacency;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (s.node_mask[i])
      a(i, i) = 1.0;
    else {
      a.row(i).setZero();
      a.col(i).setZero();
    }
  }
  Vector dinv = a.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) dinv(i) = dinv(i) > 0 ? 1.0 / std::sqrt(dinv(i)) : 0.0;
  return dinv.asDiagonal() * a * dinv.asDiagonal();
}

struct SnapshotCode {
  ad::Var a;  // topology representation, 1 x h
  ad::Var b;  // attribute representation, 1 x h
};

// a_t: two graph-convolution layers over the topology with node signal
// [1, degree], mean-pooled over active nodes. b_t: dense map of the masked,
// row-major flattened feature matrix.
inline SnapshotCode encode_snapshot(Binder& bind, const EncoderParams& p, const GraphSnapshot& s) {
  const auto& d = p.dims;
  const auto n = static_cast<Eigen::Index>(d.n);
  if (s.adjacency.rows() != n || s.features.cols() != static_cast<Eigen::Index>(d.c) ||
      s.features.rows() != n)
    throw DimensionError("encode_snapshot: snapshot is " + std::to_string(s.adjacency.rows()) + " nodes x " +
                         std::to_string(s.features.cols()) + " features, encoder expects " +
                         std::to_string(d.n) + " x " + std::to_string(d.c));
  ad::Tape& tape = bind.tape();
  const Matrix prop = normalized_propagation(s);
  Matrix signal = Matrix::Zero(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    if (s.node_mask[i]) {
      signal(i, 0) = 1.0;
      signal(i, 1) = s.adjacency.row(i).sum();
    }
  ad::Var x0 = tape.constant(prop * signal);
  ad::Var h1 = activate(p.gcn1(bind, x0), d.activation);
  ad::Var h2 = activate(p.gcn2(bind, ad::lmul_const(prop, h1)), d.activation);
  ad::Var a = ad::masked_mean_rows(h2, s.node_mask);

  Matrix flat(1, n * static_cast<Eigen::Index>(d.c));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(d.c); ++k)
      flat(0, i * static_cast<Eigen::Index>(d.c) + k) = s.node_mask[i] ? s.features(i, k) : 0.0;
  ad::Var b = activate(p.feat(bind, tape.constant(std::move(flat))), d.activation);
  return {a, b};
}

// Posterior parameters on the tape, one (mean, log_variance) pair per factor
// and snapshot. log_variance is already clamped.
struct PosteriorVars {
  ad::Var f_mean, f_logvar;
  std::vector<ad::Var> edge_mean, edge_logvar;
  std::vector<ad::Var> node_mean, node_logvar;
  std::vector<ad::Var> joint_mean, joint_logvar;
  std::optional<ad::Var> f_sample;  // set by the full encoder
};

namespace detail {

inline void split_gaussian(ad::Var out, Eigen::Index d, ad::Var& mean, ad::Var& logvar) {
  mean = ad::cols(out, 0, d);
  logvar = ad::clamp(ad::cols(out, d, d), kLogVarMin, kLogVarMax);
}

inline std::vector<SnapshotCode> encode_snapshots(Binder& b, const EncoderParams& p, const DynamicGraph& g) {
  if (g.num_snapshots() == 0) throw std::invalid_argument("encoder: graph has no snapshots");
  std::vector<SnapshotCode> codes;
  codes.reserve(g.num_snapshots());
  for (const auto& s : g.snapshots) codes.push_back(encode_snapshot(b, p, s));
  return codes;
}

inline void encode_f_vars(Binder& b, const EncoderParams& p, const std::vector<SnapshotCode>& codes,
                          PosteriorVars& out) {
  std::vector<ad::Var> xs;
  xs.reserve(codes.size());
  for (const auto& c : codes) xs.push_back(ad::hcat({c.a, c.b}));
  auto rnn = p.f_rnn(b, xs);
  ad::Var summary = ad::hcat({rnn.forward.back(), rnn.backward.front()});
  split_gaussian(p.f_head(b, summary), static_cast<Eigen::Index>(p.dims.latent.f), out.f_mean, out.f_logvar);
}

}  // namespace detail

// Factorized posterior: each snapshot's factors depend only on that snapshot.
inline PosteriorVars encode_factorized_vars(Binder& b, const EncoderParams& p, const DynamicGraph& g) {
  if (p.mode != InferenceMode::factorized) throw std::logic_error("encode_factorized: encoder built for full mode");
  const auto codes = detail::encode_snapshots(b, p, g);
  PosteriorVars out;
  detail::encode_f_vars(b, p, codes, out);
  const auto& l = p.dims.latent;
  for (const auto& c : codes) {
    ad::Var m, lv;
    detail::split_gaussian(p.edge_mlp(b, c.a, p.dims.activation), static_cast<Eigen::Index>(l.edge), m, lv);
    out.edge_mean.push_back(m);
    out.edge_logvar.push_back(lv);
    detail::split_gaussian(p.node_mlp(b, c.b, p.dims.activation), static_cast<Eigen::Index>(l.node), m, lv);
    out.node_mean.push_back(m);
    out.node_logvar.push_back(lv);
    detail::split_gaussian(p.joint_mlp(b, ad::hcat({c.a, c.b}), p.dims.activation),
                           static_cast<Eigen::Index>(l.joint), m, lv);
    out.joint_mean.push_back(m);
    out.joint_logvar.push_back(lv);
  }
  return out;
}

// Full posterior: f is encoded first and one sample (or the mean when
// f_noise is absent) conditions three bidirectional recurrent passes, so each
// snapshot's factors depend on the whole sequence.
inline PosteriorVars encode_full_vars(Binder& b, const EncoderParams& p, const DynamicGraph& g,
                                      const std::optional<RowVector>& f_noise) {
  if (p.mode != InferenceMode::full) throw std::logic_error("encode_full: encoder built for factorized mode");
  const auto codes = detail::encode_snapshots(b, p, g);
  PosteriorVars out;
  detail::encode_f_vars(b, p, codes, out);
  ad::Var f = f_noise ? reparameterize(out.f_mean, out.f_logvar, *f_noise) : out.f_mean;
  out.f_sample = f;

  std::vector<ad::Var> xe, xn, xj;
  for (const auto& c : codes) {
    xe.push_back(ad::hcat({c.a, f}));
    xn.push_back(ad::hcat({c.b, f}));
    xj.push_back(ad::hcat({c.a, c.b, f}));
  }
  const auto re = p.edge_rnn(b, xe), rn = p.node_rnn(b, xn), rj = p.joint_rnn(b, xj);
  const auto& l = p.dims.latent;
  for (std::size_t t = 0; t < codes.size(); ++t) {
    ad::Var m, lv;
    detail::split_gaussian(p.edge_head(b, ad::hcat({re.forward[t], re.backward[t]})),
                           static_cast<Eigen::Index>(l.edge), m, lv);
    out.edge_mean.push_back(m);
    out.edge_logvar.push_back(lv);
    detail::split_gaussian(p.node_head(b, ad::hcat({rn.forward[t], rn.backward[t]})),
                           static_cast<Eigen::Index>(l.node), m, lv);
    out.node_mean.push_back(m);
    out.node_logvar.push_back(lv);
    detail::split_gaussian(p.joint_head(b, ad::hcat({rj.forward[t], rj.backward[t]})),
                           static_cast<Eigen::Index>(l.joint), m, lv);
    out.joint_mean.push_back(m);
    out.joint_logvar.push_back(lv);
  }
  return out;
}

inline PosteriorSet to_posterior_set(const PosteriorVars& v) {
  auto gp = [](ad::Var m, ad::Var lv) { return GaussianParams{ad::val(m), ad::val(lv)}; };
  PosteriorSet s;
  s.f = gp(v.f_mean, v.f_logvar);
  for (std::size_t t = 0; t < v.edge_mean.size(); ++t) {
    s.edge.push_back(gp(v.edge_mean[t], v.edge_logvar[t]));
    s.node.push_back(gp(v.node_mean[t], v.node_logvar[t]));
    s.joint.push_back(gp(v.joint_mean[t], v.joint_logvar[t]));
  }
  return s;
}

inline std::pair<RowVector, RowVector> encode_snapshot(const GraphSnapshot& s, const EncoderParams& p) {
  ad::Tape tape(false);
  Binder b(tape);
  auto code = encode_snapshot(b, p, s);
  return {tape.value(code.a), tape.value(code.b)};
}

inline GaussianParams encode_f(const DynamicGraph& g, const EncoderParams& p) {
  ad::Tape tape(false);
  Binder b(tape);
  PosteriorVars v;
  detail::encode_f_vars(b, p, detail::encode_snapshots(b, p, g), v);
  return {tape.value(v.f_mean), tape.value(v.f_logvar)};
}

inline PosteriorSet encode_factorized(const DynamicGraph& g, const EncoderParams& p) {
  ad::Tape tape(false);
  Binder b(tape);
  return to_posterior_set(encode_factorized_vars(b, p, g));
}

inline PosteriorSet encode_full(const DynamicGraph& g, const EncoderParams& p,
                                const std::optional<RowVector>& f_noise) {
  ad::Tape tape(false);
  Binder b(tape);
  return to_posterior_set(encode_full_vars(b, p, g, f_noise));
}

}  // namespace d2g2
