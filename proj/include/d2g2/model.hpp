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
#include "d2g2/inference.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace d2g2 {

// Architectural variant: the full model or one of the two ablations.
enum class ModelVariant { standard, no_f, merged_z };

inline const char* to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::standard: return "standard";
    case ModelVariant::no_f: return "no_f";
    case ModelVariant::merged_z: return "merged_z";
  }
  return "standard";
}

inline ModelVariant parse_model_variant(const std::string& s) {
  if (s == "standard") return ModelVariant::standard;
  if (s == "no_f") return ModelVariant::no_f;
  if (s == "merged_z") return ModelVariant::merged_z;
  throw std::invalid_argument("unknown model variant '" + s + "'");
}

// Latent widths for a variant built from base sizes d_f and d_z.
//  no_f: f removed, each z widened by round(d_f / 3)
//  merged_z: one shared z of width 3 d_z, carried in the joint slot
inline LatentDims latent_dims_for(ModelVariant v, std::size_t d_f, std::size_t d_z) {
  switch (v) {
    case ModelVariant::standard: return {d_f, d_z, d_z, d_z};
    case ModelVariant::no_f: {
      const std::size_t extra = (d_f + 1) / 3;
      return {0, d_z + extra, d_z + extra, d_z + extra};
    }
    case ModelVariant::merged_z: return {d_f, 0, 0, 3 * d_z};
  }
  return {d_f, d_z, d_z, d_z};
}

struct Model {
  ModelDims dims;
  InferenceMode mode = InferenceMode::factorized;
  ModelVariant variant = ModelVariant::standard;
  std::size_t T = 0;
  GeneratorParams generator;
  EncoderParams encoder;

  Model() = default;
  Model(const ModelDims& d, InferenceMode m, std::size_t t, ModelVariant v = ModelVariant::standard)
      : dims(d), mode(m), variant(v), T(t), generator(d), encoder(d, m) {}

  void init(Rng& rng) {
    generator.init(rng);
    encoder.init(rng);
  }

  // Canonical (name, matrix) list in a fixed order: generator then encoder.
  std::vector<std::pair<std::string, Matrix*>> parameters() {
    std::vector<std::pair<std::string, Matrix*>> out;
    auto collect = [&out](const std::string& name, Matrix& m) { out.emplace_back(name, &m); };
    generator.visit(collect);
    encoder.visit(collect);
    return out;
  }

  std::size_t parameter_count() {
    std::size_t k = 0;
    for (auto& [name, m] : parameters()) k += static_cast<std::size_t>(m->size());
    return k;
  }
};

inline nlohmann::ordered_json model_metadata(const Model& m) {
  nlohmann::ordered_json meta;
  meta["d_f"] = m.dims.latent.f;
  meta["d_z"] = m.variant == ModelVariant::merged_z ? m.dims.latent.joint / 3 : m.dims.latent.edge;
  meta["d_edge"] = m.dims.latent.edge;
  meta["d_node"] = m.dims.latent.node;
  meta["d_joint"] = m.dims.latent.joint;
  meta["h"] = m.dims.hidden;
  meta["L"] = m.dims.deconv_layers;
  meta["n_max"] = m.dims.n;
  meta["c"] = m.dims.c;
  meta["T"] = m.T;
  meta["inference_mode"] = to_string(m.mode);
  meta["variant"] = to_string(m.variant);
  meta["activation"] = to_string(m.dims.activation);
  return meta;
}

// Checkpoint archive: one JSON document holding the metadata record and every
// weight array under its canonical name (column-major data).
inline void save_checkpoint(Model& m, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["format"] = "d2g2-checkpoint-1";
  doc["metadata"] = model_metadata(m);
  nlohmann::ordered_json weights;
  for (auto& [name, mat] : m.parameters()) {
    nlohmann::ordered_json w;
    w["rows"] = mat->rows();
    w["cols"] = mat->cols();
    w["data"] = std::vector<double>(mat->data(), mat->data() + mat->size());
    weights[name] = std::move(w);
  }
  doc["weights"] = std::move(weights);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << doc.dump() << '\n';
}

inline Model load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    const auto& meta = doc.at("metadata");
    ModelDims d;
    d.n = meta.at("n_max").get<std::size_t>();
    d.c = meta.at("c").get<std::size_t>();
    d.latent = {meta.at("d_f").get<std::size_t>(), meta.at("d_edge").get<std::size_t>(),
                meta.at("d_node").get<std::size_t>(), meta.at("d_joint").get<std::size_t>()};
    d.hidden = meta.at("h").get<std::size_t>();
    d.deconv_layers = meta.at("L").get<std::size_t>();
    d.activation = meta.value("activation", std::string("tanh")) == "identity" ? Activation::identity : Activation::tanh;
    Model m(d, parse_inference_mode(meta.at("inference_mode").get<std::string>()), meta.at("T").get<std::size_t>(),
            parse_model_variant(meta.value("variant", std::string("standard"))));
    const auto& weights = doc.at("weights");
    for (auto& [name, mat] : m.parameters()) {
      if (!weights.contains(name)) throw std::runtime_error("checkpoint is missing weight '" + name + "'");
      const auto& w = weights.at(name);
      const auto rows = w.at("rows").get<Eigen::Index>(), cols = w.at("cols").get<Eigen::Index>();
      if (rows != mat->rows() || cols != mat->cols())
        throw std::runtime_error("checkpoint weight '" + name + "' has shape " + std::to_string(rows) + "x" +
                                 std::to_string(cols) + ", model expects " + std::to_string(mat->rows()) + "x" +
                                 std::to_string(mat->cols()));
      const auto data = w.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw std::runtime_error("checkpoint weight '" + name + "' has wrong element count");
      *mat = Eigen::Map<const Matrix>(data.data(), rows, cols);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint '" + path + "' is malformed: " + e.what());
  }
}

}  // namespace d2g2
