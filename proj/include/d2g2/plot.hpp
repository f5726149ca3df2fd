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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

// Static SVG rendering of dynamic graphs and report tables.
namespace d2g2::plot {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Blue (0) to red (1).
inline std::string colour(double x) {
  x = std::clamp(x, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(40 + 200 * x));
  const int g = static_cast<int>(std::lround(80 + 60 * (1.0 - std::abs(2.0 * x - 1.0))));
  const int b = static_cast<int>(std::lround(240 - 200 * x));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace detail

struct GridOptions {
  std::size_t max_rows = 8;
  std::size_t max_cols = 10;
  double cell = 120.0;
  double edge_threshold = 0.5;
};

// Grid with one row per graph and one column per snapshot. Nodes sit on a
// circle; fill colour encodes the first feature, scaled over the whole grid.
inline std::string render_graph_grid(const std::vector<DynamicGraph>& graphs, const GridOptions& opt = {}) {
  const std::size_t rows = std::min(opt.max_rows, graphs.size());
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) cols = std::max(cols, std::min(opt.max_cols, graphs[r].num_snapshots()));
  double lo = 0.0, hi = 0.0;
  bool seen = false;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t t = 0; t < std::min(cols, graphs[r].num_snapshots()); ++t) {
      const auto& s = graphs[r][t];
      if (s.features.cols() == 0) continue;
      for (Eigen::Index i = 0; i < s.features.rows(); ++i) {
        if (!s.node_mask[i]) continue;
        const double v = s.features(i, 0);
        lo = seen ? std::min(lo, v) : v;
        hi = seen ? std::max(hi, v) : v;
        seen = true;
      }
    }
  const double margin = 30.0;
  const double width = margin + static_cast<double>(cols) * opt.cell;
  const double height = margin + static_cast<double>(rows) * opt.cell;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt(width) << "\" height=\""
     << detail::fmt(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t t = 0; t < cols; ++t)
    os << "<text x=\"" << detail::fmt(margin + (static_cast<double>(t) + 0.5) * opt.cell) << "\" y=\"18\" text-anchor=\"middle\">t="
       << t << "</text>\n";
  for (std::size_t r = 0; r < rows; ++r) {
    const double y0 = margin + static_cast<double>(r) * opt.cell;
    os << "<text x=\"4\" y=\"" << detail::fmt(y0 + opt.cell / 2) << "\">" << r << "</text>\n";
    for (std::size_t t = 0; t < std::min(cols, graphs[r].num_snapshots()); ++t) {
      const auto& s = graphs[r][t];
      const double cx = margin + (static_cast<double>(t) + 0.5) * opt.cell;
      const double cy = y0 + opt.cell / 2;
      const double radius = opt.cell * 0.38;
      const auto n = s.adjacency.rows();
      std::vector<double> px(static_cast<std::size_t>(n)), py(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(std::max<Eigen::Index>(n, 1));
        px[i] = cx + radius * std::cos(ang);
        py[i] = cy + radius * std::sin(ang);
      }
      os << "<g>\n";
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          if (s.node_mask[i] && s.node_mask[j] && s.adjacency(i, j) >= opt.edge_threshold)
            os << "<line x1=\"" << detail::fmt(px[i]) << "\" y1=\"" << detail::fmt(py[i]) << "\" x2=\""
               << detail::fmt(px[j]) << "\" y2=\"" << detail::fmt(py[j]) << "\" stroke=\"#555\" stroke-width=\"1\"/>\n";
      const double node_r = std::max(1.5, std::min(5.0, 60.0 / static_cast<double>(std::max<Eigen::Index>(n, 1))));
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!s.node_mask[i]) continue;
        const double v = s.features.cols() > 0 && hi > lo ? (s.features(i, 0) - lo) / (hi - lo) : 0.5;
        os << "<circle cx=\"" << detail::fmt(px[i]) << "\" cy=\"" << detail::fmt(py[i]) << "\" r=\""
           << detail::fmt(node_r) << "\" fill=\"" << detail::colour(v) << "\"/>\n";
      }
      os << "</g>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

// Renders any flat-ish JSON record (eval report, probe scores) as a two-column
// key/value table; nested objects become dotted keys.
inline std::string render_table(const nlohmann::json& record, const std::string& title = "") {
  std::vector<std::pair<std::string, std::string>> rows;
  auto walk = [&rows](auto&& self, const nlohmann::json& j, const std::string& prefix) -> void {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) self(self, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
    } else if (j.is_number_float()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4g", j.get<double>());
      rows.emplace_back(prefix, buf);
    } else if (j.is_null()) {
      rows.emplace_back(prefix, "undefined");
    } else {
      rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
    }
  };
  walk(walk, record, "");
  const double row_h = 20.0, top = title.empty() ? 10.0 : 34.0;
  const double width = 620.0, height = top + row_h * static_cast<double>(rows.size()) + 10.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt(width) << "\" height=\"" << detail::fmt(height)
     << "\" font-family=\"monospace\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) os << "<text x=\"10\" y=\"22\" font-weight=\"bold\">" << detail::escape(title) << "</text>\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double y = top + row_h * static_cast<double>(k);
    if (k % 2 == 0)
      os << "<rect x=\"5\" y=\"" << detail::fmt(y) << "\" width=\"610\" height=\"" << detail::fmt(row_h)
         << "\" fill=\"#f0f0f0\"/>\n";
    os << "<text x=\"10\" y=\"" << detail::fmt(y + 14) << "\">" << detail::escape(rows[k].first) << "</text>";
    os << "<text x=\"610\" y=\"" << detail::fmt(y + 14) << "\" text-anchor=\"end\">" << detail::escape(rows[k].second)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace d2g2::plot
