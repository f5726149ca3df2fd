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

#include <nlohmann/json.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace d2g2 {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& field, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(field) {}
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

namespace detail {

inline std::size_t require_uint(const nlohmann::json& obj, const char* key, std::size_t line) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(line, key, "missing");
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ParseError(line, key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

inline DynamicGraph parse_graph_record(const nlohmann::json& rec, const DynamicGraphDataset& hdr,
                                       std::size_t line) {
  const std::size_t n = require_uint(rec, "n", line);
  if (n > hdr.n_max) throw ParseError(line, "n", "exceeds header n_max");
  if (!rec.contains("snapshots") || !rec.at("snapshots").is_array())
    throw ParseError(line, "snapshots", "missing or not an array");
  const auto& snaps = rec.at("snapshots");
  if (snaps.size() != hdr.T)
    throw ParseError(line, "snapshots", "expected " + std::to_string(hdr.T) + " snapshots, got " +
                                            std::to_string(snaps.size()));
  DynamicGraph g;
  for (std::size_t t = 0; t < snaps.size(); ++t) {
    const auto& s = snaps[t];
    const std::string where = "snapshots[" + std::to_string(t) + "]";
    if (!s.is_object()) throw ParseError(line, where, "not an object");
    GraphSnapshot snap(Matrix::Zero(hdr.n_max, hdr.n_max), Matrix::Zero(hdr.n_max, hdr.c),
                       std::vector<bool>(hdr.n_max, false));
    for (std::size_t i = 0; i < n; ++i) snap.node_mask[i] = true;

    if (!s.contains("edges") || !s.at("edges").is_array())
      throw ParseError(line, where + ".edges", "missing or not an array");
    for (const auto& e : s.at("edges")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ParseError(line, where + ".edges", "edge must be a pair of integers");
      const long long i = e[0].get<long long>(), j = e[1].get<long long>();
      if (i < 0 || j < 0 || i >= static_cast<long long>(n) || j >= static_cast<long long>(n))
        throw ParseError(line, where + ".edges", "edge endpoint out of range");
      if (i == j) throw ParseError(line, where + ".edges", "self loop");
      snap.set_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }

    if (!s.contains("features") || !s.at("features").is_array())
      throw ParseError(line, where + ".features", "missing or not an array");
    const auto& feats = s.at("features");
    if (feats.size() != n)
      throw ParseError(line, where + ".features", "expected one row per active node");
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = feats[i];
      if (!row.is_array() || row.size() != hdr.c)
        throw ParseError(line, where + ".features", "row " + std::to_string(i) + " must have " +
                                                        std::to_string(hdr.c) + " values");
      for (std::size_t k = 0; k < hdr.c; ++k) {
        if (!row[k].is_number())
          throw ParseError(line, where + ".features", "non-numeric value");
        snap.features(i, k) = row[k].get<double>();
      }
    }
    g.snapshots.push_back(std::move(snap));
  }
  return g;
}

}  // namespace detail

// Reads the line-delimited dataset format. A zero-byte stream yields an empty
// dataset with zero metadata.
inline DynamicGraphDataset read_dataset(std::istream& in) {
  DynamicGraphDataset ds;
  std::string text;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line, "<record>", std::string("invalid JSON: ") + e.what());
    }
    if (!have_header) {
      ds.n_max = detail::require_uint(rec, "n_max", line);
      ds.T = detail::require_uint(rec, "T", line);
      ds.c = detail::require_uint(rec, "c", line);
      have_header = true;
      continue;
    }
    ds.graphs.push_back(detail::parse_graph_record(rec, ds, line));
  }
  return ds;
}

inline DynamicGraphDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");
  return read_dataset(in);
}

inline nlohmann::ordered_json graph_to_json(const DynamicGraph& g) {
  const std::size_t n = g.num_active();
  const auto& mask = g.node_mask();
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] != (i < n))
      throw std::invalid_argument("write_dataset: active nodes must form a leading block");
  nlohmann::ordered_json rec;
  rec["n"] = n;
  auto snaps = nlohmann::ordered_json::array();
  for (const auto& s : g.snapshots) {
    auto edges = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double w = s.adjacency(i, j);
        if (w == 0.0) continue;
        if (w != 1.0) throw std::invalid_argument("write_dataset: adjacency must be binary");
        edges.push_back({i, j});
      }
    auto feats = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
      auto row = nlohmann::ordered_json::array();
      for (Eigen::Index k = 0; k < s.features.cols(); ++k) row.push_back(s.features(i, k));
      feats.push_back(std::move(row));
    }
    nlohmann::ordered_json snap;
    snap["edges"] = std::move(edges);
    snap["features"] = std::move(feats);
    snaps.push_back(std::move(snap));
  }
  rec["snapshots"] = std::move(snaps);
  return rec;
}

inline void write_dataset(const DynamicGraphDataset& ds, std::ostream& out) {
  nlohmann::ordered_json hdr;
  hdr["n_max"] = ds.n_max;
  hdr["T"] = ds.T;
  hdr["c"] = ds.c;
  out << hdr.dump() << '\n';
  for (const auto& g : ds.graphs) {
    if (g.num_nodes() != ds.n_max || g.num_snapshots() != ds.T || g.feature_dim() != ds.c)
      throw DimensionError("write_dataset: graph does not match dataset header");
    out << graph_to_json(g).dump() << '\n';
  }
}

inline void write_dataset(const DynamicGraphDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_dataset(ds, out);
}

}  // namespace d2g2
