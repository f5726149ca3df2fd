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

#include "d2g2/elbo.hpp"
#include "d2g2/graph.hpp"
#include "d2g2/model.hpp"
#include "d2g2/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2g2 {

struct TrainConfig {
  InferenceMode inference_mode = InferenceMode::factorized;
  ModelVariant variant = ModelVariant::standard;
  double learning_rate = 1e-3;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double warmup_fraction = 0.2;  // share of epochs over which beta rises 0 -> 1
  std::size_t d_f = 32;
  std::size_t d_z = 16;
  std::size_t h = 64;
  std::size_t L = 2;
  double lambda_edge = 1.0;
  double lambda_node = 1.0;
  bool kl_f_per_snapshot = false;
  std::size_t samples = 1;  // ELBO samples per graph per step
  std::size_t checkpoint_every = 0;
  std::string checkpoint_path;
  std::size_t jobs = 1;

  void check() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
      throw std::invalid_argument("learning_rate must be a finite non-negative number");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(lambda_edge > 0.0) || !(lambda_node > 0.0)) throw std::invalid_argument("lambda weights must be > 0");
    if (warmup_fraction < 0.0 || warmup_fraction > 1.0) throw std::invalid_argument("warmup_fraction must be in [0, 1]");
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (h < 1) throw std::invalid_argument("h must be >= 1");
  }
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Applies one `key = value` assignment.
inline void set_config_value(TrainConfig& cfg, const std::string& key, const std::string& value) {
  auto as_size = [&]() -> std::size_t {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(value, &pos);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
    if (pos != value.size() || v < 0) throw ConfigError("config key '" + key + "': expected a non-negative integer");
    return static_cast<std::size_t>(v);
  };
  auto as_double = [&]() -> double {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(value, &pos);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
    if (pos != value.size()) throw ConfigError("config key '" + key + "': trailing characters in '" + value + "'");
    return v;
  };
  auto as_bool = [&]() -> bool {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "': expected true or false");
  };
  try {
    if (key == "inference_mode") cfg.inference_mode = parse_inference_mode(value);
    else if (key == "variant") cfg.variant = parse_model_variant(value);
    else if (key == "learning_rate") cfg.learning_rate = as_double();
    else if (key == "epochs") cfg.epochs = as_size();
    else if (key == "batch_size") cfg.batch_size = as_size();
    else if (key == "seed") cfg.seed = as_size();
    else if (key == "warmup_fraction") cfg.warmup_fraction = as_double();
    else if (key == "d_f") cfg.d_f = as_size();
    else if (key == "d_z") cfg.d_z = as_size();
    else if (key == "h") cfg.h = as_size();
    else if (key == "L") cfg.L = as_size();
    else if (key == "lambda_edge") cfg.lambda_edge = as_double();
    else if (key == "lambda_node") cfg.lambda_node = as_double();
    else if (key == "kl_f_per_snapshot") cfg.kl_f_per_snapshot = as_bool();
    else if (key == "samples") cfg.samples = as_size();
    else if (key == "checkpoint_every") cfg.checkpoint_every = as_size();
    else if (key == "checkpoint_path") cfg.checkpoint_path = value;
    else if (key == "jobs") cfg.jobs = as_size();
    else throw ConfigError("unknown config key '" + key + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

// Flat `key = value` text; '#' starts a comment, blank lines are ignored.
inline TrainConfig parse_config(std::istream& in, TrainConfig cfg = {}) {
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline TrainConfig read_config(const std::string& path, TrainConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(cfg));
}

struct EpochRecord {
  std::size_t epoch = 0;
  double neg_elbo = 0.0;
  double edge_nll = 0.0;
  double node_nll = 0.0;
  double kl_f = 0.0;
  double kl_edge = 0.0;
  double kl_node = 0.0;
  double kl_joint = 0.0;
  double beta = 0.0;
  double seconds = 0.0;
};

// Per-epoch averages over the graphs seen in that epoch.
struct TrainReport {
  std::vector<EpochRecord> epochs;
};

inline nlohmann::ordered_json to_json(const EpochRecord& r) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  j["neg_elbo"] = r.neg_elbo;
  j["edge_nll"] = r.edge_nll;
  j["node_nll"] = r.node_nll;
  j["kl_f"] = r.kl_f;
  j["kl_edge"] = r.kl_edge;
  j["kl_node"] = r.kl_node;
  j["kl_joint"] = r.kl_joint;
  j["seconds"] = r.seconds;
  return j;
}

inline void write_report(const TrainReport& rep, std::ostream& out) {
  for (const auto& r : rep.epochs) out << to_json(r).dump() << '\n';
}

inline void write_report(const TrainReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_report(rep, out);
}

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive-moment optimiser over a fixed parameter list.
class Adam {
 public:
  Adam(const std::vector<std::pair<std::string, Matrix*>>& params, double lr, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& [name, m] : params) {
      m1_.push_back(Matrix::Zero(m->rows(), m->cols()));
      m2_.push_back(Matrix::Zero(m->rows(), m->cols()));
    }
  }

  void step(const std::vector<std::pair<std::string, Matrix*>>& params, const std::vector<Matrix>& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m1_[k] = beta1_ * m1_[k] + (1.0 - beta1_) * grads[k];
      m2_[k] = beta2_ * m2_[k] + (1.0 - beta2_) * grads[k].cwiseAbs2();
      Matrix& w = *params[k].second;
      w.array() -= lr_ * (m1_[k].array() / c1) / ((m2_[k].array() / c2).sqrt() + eps_);
    }
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<Matrix> m1_, m2_;
};

// Derives a per-(epoch, graph, sample) noise seed; independent of job count.
inline std::uint64_t noise_seed(std::uint64_t seed, std::size_t epoch, std::size_t graph, std::size_t sample) {
  std::uint64_t x = seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL;
  for (std::uint64_t v : {static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(graph),
                          static_cast<std::uint64_t>(sample)}) {
    x ^= v + 0x9E3779B97F4A7C15ULL + (x << 6) + (x >> 2);
    x ^= x >> 31;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
  }
  return x;
}

struct GraphGradient {
  ElboTerms terms;
  std::vector<Matrix> grads;
};

// Loss and parameter gradients for one graph, averaged over noise samples.
inline GraphGradient graph_gradient(Model& m, const DynamicGraph& g, const std::vector<ElboNoise>& noises,
                                    const ElboOptions& opt) {
  auto params = m.parameters();
  GraphGradient out;
  out.grads.reserve(params.size());
  for (auto& [name, mat] : params) out.grads.push_back(Matrix::Zero(mat->rows(), mat->cols()));
  const double inv = 1.0 / static_cast<double>(noises.size());
  for (const auto& noise : noises) {
    ad::Tape tape;
    Binder b(tape);
    ElboTerms terms;
    ad::Var loss = build_loss(b, m, g, noise, opt, terms);
    const std::pair<const char*, double> checks[] = {{"edge_nll", terms.edge_nll}, {"node_nll", terms.node_nll},
                                                     {"kl_f", terms.kl_f},         {"kl_edge", terms.kl_edge},
                                                     {"kl_node", terms.kl_node},   {"kl_joint", terms.kl_joint}};
    for (const auto& [name, v] : checks)
      if (!std::isfinite(v)) throw TrainingError("non-finite loss term '" + std::string(name) + "'");
    tape.backward(loss);
    for (std::size_t k = 0; k < params.size(); ++k) out.grads[k] += inv * b.grad(*params[k].second);
    out.terms.edge_nll += inv * terms.edge_nll;
    out.terms.node_nll += inv * terms.node_nll;
    out.terms.kl_f += inv * terms.kl_f;
    out.terms.kl_edge += inv * terms.kl_edge;
    out.terms.kl_node += inv * terms.kl_node;
    out.terms.kl_joint += inv * terms.kl_joint;
    out.terms.neg_elbo += inv * terms.neg_elbo;
    out.terms.objective += inv * terms.objective;
  }
  return out;
}

inline double beta_for_epoch(const TrainConfig& cfg, std::size_t epoch) {
  const double warm = std::floor(cfg.warmup_fraction * static_cast<double>(cfg.epochs));
  if (warm < 1.0) return 1.0;
  return std::min(1.0, static_cast<double>(epoch - 1) / warm);
}

inline Model make_model(const DynamicGraphDataset& ds, const TrainConfig& cfg) {
  ModelDims d;
  d.n = ds.n_max;
  d.c = ds.c;
  d.latent = latent_dims_for(cfg.variant, cfg.d_f, cfg.d_z);
  d.hidden = cfg.h;
  d.deconv_layers = cfg.L;
  Model m(d, cfg.inference_mode, ds.T, cfg.variant);
  Rng rng(cfg.seed);
  m.init(rng);
  return m;
}

struct TrainResult {
  Model model;
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Minimises the negative ELBO with Adam on shuffled minibatches. Per-graph
// gradients are summed in batch order, so results do not depend on cfg.jobs.
inline TrainResult train(const DynamicGraphDataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  cfg.check();
  if (ds.empty()) throw std::invalid_argument("train: dataset is empty");
  TrainResult res{make_model(ds, cfg), {}};
  Model& m = res.model;
  auto params = m.parameters();
  Adam adam(params, cfg.learning_rate);
  Rng shuffle_rng(cfg.seed ^ 0x5DEECE66DULL);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[shuffle_rng.below(k)]);
    ElboOptions opt;
    opt.beta = beta_for_epoch(cfg, epoch);
    opt.lambda_edge = cfg.lambda_edge;
    opt.lambda_node = cfg.lambda_node;
    opt.kl_f_per_snapshot = cfg.kl_f_per_snapshot;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.beta = opt.beta;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      std::vector<GraphGradient> results(end - begin);
      auto work = [&](std::size_t slot) {
        const std::size_t gi = order[begin + slot];
        std::vector<ElboNoise> noises;
        for (std::size_t s = 0; s < cfg.samples; ++s)
          noises.push_back(draw_noise(m.dims.latent, ds.T, noise_seed(cfg.seed, epoch, gi, s)));
        results[slot] = graph_gradient(m, ds.graphs[gi], noises, opt);
      };
      if (cfg.jobs <= 1) {
        for (std::size_t s = 0; s < results.size(); ++s) work(s);
      } else {
        for (std::size_t s0 = 0; s0 < results.size(); s0 += cfg.jobs) {
          std::vector<std::future<void>> fs;
          for (std::size_t s = s0; s < std::min(results.size(), s0 + cfg.jobs); ++s)
            fs.push_back(std::async(std::launch::async, work, s));
          for (auto& f : fs) f.get();
        }
      }
      std::vector<Matrix> grads;
      for (auto& [name, mat] : params) grads.push_back(Matrix::Zero(mat->rows(), mat->cols()));
      const double inv = 1.0 / static_cast<double>(results.size());
      for (const auto& r : results) {
        for (std::size_t k = 0; k < grads.size(); ++k) grads[k] += inv * r.grads[k];
        rec.neg_elbo += r.terms.neg_elbo;
        rec.edge_nll += r.terms.edge_nll;
        rec.node_nll += r.terms.node_nll;
        rec.kl_f += r.terms.kl_f;
        rec.kl_edge += r.terms.kl_edge;
        rec.kl_node += r.terms.kl_node;
        rec.kl_joint += r.terms.kl_joint;
      }
      adam.step(params, grads);
    }
    const double inv_n = 1.0 / static_cast<double>(ds.size());
    for (double* v : {&rec.neg_elbo, &rec.edge_nll, &rec.node_nll, &rec.kl_f, &rec.kl_edge, &rec.kl_node,
                      &rec.kl_joint})
      *v *= inv_n;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    const bool last = epoch == cfg.epochs;
    if (!cfg.checkpoint_path.empty() &&
        (last || (cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0)))
      save_checkpoint(m, cfg.checkpoint_path);
  }
  return res;
}

}  // namespace d2g2
