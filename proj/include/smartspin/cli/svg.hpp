// Copyright 2026 The smartspin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace smartspin::cli {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric y error bars
  bool line = true;
  bool markers = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_scale = 1.0;  // axis values are multiplied by these before drawing
  double y_scale = 1.0;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

// Round tick spacing giving roughly n intervals over [lo, hi].
inline double tick_step(double lo, double hi, int n = 5) {
  const double raw = (hi - lo) / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace detail

/// Static line/scatter plot. Non-finite points are skipped.
inline void write_svg(std::ostream& os, const Plot& p) {
  constexpr double kW = 720.0, kH = 460.0, kL = 80.0, kR = 170.0, kT = 40.0, kB = 60.0;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : p.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double x = s.x[i] * p.x_scale;
      const double y = s.y[i] * p.y_scale;
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      const double e = i < s.err.size() && std::isfinite(s.err[i]) ? s.err[i] * p.y_scale : 0.0;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y - e);
      y1 = std::max(y1, y + e);
    }
  }
  if (!(x1 >= x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  const auto sx = [&](double x) { return kL + (x - x0) / (x1 - x0) * pw; };
  const auto sy = [&](double y) { return kT + (y1 - y) / (y1 - y0) * ph; };
  using detail::svg_num;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << svg_num(kL + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << detail::svg_escape(p.title) << "</text>\n";
  os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double dx = detail::tick_step(x0, x1);
  for (double t = std::ceil(x0 / dx) * dx; t <= x1 + 1e-9 * dx; t += dx) {
    os << "<line x1=\"" << svg_num(sx(t)) << "\" y1=\"" << svg_num(kT + ph) << "\" x2=\""
       << svg_num(sx(t)) << "\" y2=\"" << svg_num(kT + ph + 5) << "\" stroke=\"black\"/>"
       << "<text x=\"" << svg_num(sx(t)) << "\" y=\"" << svg_num(kT + ph + 18)
       << "\" text-anchor=\"middle\">" << detail::tick_label(t) << "</text>\n";
  }
  const double dy = detail::tick_step(y0, y1);
  for (double t = std::ceil(y0 / dy) * dy; t <= y1 + 1e-9 * dy; t += dy) {
    os << "<line x1=\"" << svg_num(kL - 5) << "\" y1=\"" << svg_num(sy(t)) << "\" x2=\"" << kL
       << "\" y2=\"" << svg_num(sy(t)) << "\" stroke=\"black\"/>"
       << "<text x=\"" << svg_num(kL - 8) << "\" y=\"" << svg_num(sy(t) + 4)
       << "\" text-anchor=\"end\">" << detail::tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << svg_num(kL + pw / 2) << "\" y=\"" << svg_num(kH - 15)
     << "\" text-anchor=\"middle\">" << detail::svg_escape(p.x_label) << "</text>\n";
  os << "<text transform=\"translate(20," << svg_num(kT + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << detail::svg_escape(p.y_label) << "</text>\n";

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* c = kColors[k % 6];
    std::string path;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double x = s.x[i] * p.x_scale;
      const double y = s.y[i] * p.y_scale;
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      path += (path.empty() ? "M" : " L") + svg_num(sx(x)) + "," + svg_num(sy(y));
      if (i < s.err.size() && std::isfinite(s.err[i]) && s.err[i] > 0.0) {
        const double e = s.err[i] * p.y_scale;
        os << "<line x1=\"" << svg_num(sx(x)) << "\" y1=\"" << svg_num(sy(y - e)) << "\" x2=\""
           << svg_num(sx(x)) << "\" y2=\"" << svg_num(sy(y + e)) << "\" stroke=\"" << c
           << "\" stroke-opacity=\"0.5\"/>\n";
      }
      if (s.markers) {
        os << "<circle cx=\"" << svg_num(sx(x)) << "\" cy=\"" << svg_num(sy(y))
           << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
      }
    }
    if (s.line && !path.empty()) {
      os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << c
         << "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = kT + 10 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << svg_num(kW - kR + 12) << "\" y1=\"" << svg_num(ly) << "\" x2=\""
       << svg_num(kW - kR + 32) << "\" y2=\"" << svg_num(ly) << "\" stroke=\"" << c
       << "\" stroke-width=\"2\"/><text x=\"" << svg_num(kW - kR + 38) << "\" y=\""
       << svg_num(ly + 4) << "\">" << detail::svg_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace smartspin::cli
