// Copyright 2026 The seabal Authors
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

#include "seabal/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace seabal {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round tick spacing to 1/2/5 x 10^k covering the span with ~target ticks.
std::vector<double> ticks(double lo, double hi, int target) {
  std::vector<double> out;
  const double span = hi - lo;
  if (!(span > 0.0)) {
    out.push_back(lo);
    return out;
  }
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  const double first = std::ceil(lo / step - 1e-9) * step;
  for (double v = first; v <= hi + 1e-9 * span; v += step)
    out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  return out;
}

}  // namespace

bool write_svg_plot(const std::string& path, const PlotSpec& spec) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  bool any = false;
  for (const Series& s : spec.series) {
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
      any = true;
    }
  }
  for (const Marker& m : spec.markers) {
    if (!std::isfinite(m.x) || !std::isfinite(m.y)) continue;
    xmin = std::min(xmin, m.x);
    xmax = std::max(xmax, m.x);
    ymin = std::min(ymin, m.y);
    ymax = std::max(ymax, m.y);
    any = true;
  }
  if (!any) return false;
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  // 5% headroom on y so curves do not hug the frame.
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const int w = spec.width, h = spec.height;
  const int ml = 70, mr = 20, mt = 36, mb = 48;  // margins
  const double pw = w - ml - mr, ph = h - mt - mb;
  auto px = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
  auto py = [&](double y) { return mt + ph * (ymax - y) / (ymax - ymin); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
    << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  o << "<rect width=\"" << w << "\" height=\"" << h
    << "\" fill=\"#ffffff\"/>\n";
  o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << fmt(pw)
    << "\" height=\"" << fmt(ph)
    << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  for (double t : ticks(xmin, xmax, 7)) {
    const double x = px(t);
    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << mt << "\" x2=\"" << fmt(x)
      << "\" y2=\"" << mt + ph
      << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    o << "<text x=\"" << fmt(x) << "\" y=\"" << mt + ph + 16
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\""
      << " fill=\"#333333\">" << fmt(t) << "</text>\n";
  }
  for (double t : ticks(ymin, ymax, 6)) {
    const double y = py(t);
    o << "<line x1=\"" << ml << "\" y1=\"" << fmt(y) << "\" x2=\"" << ml + pw
      << "\" y2=\"" << fmt(y)
      << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    o << "<text x=\"" << ml - 6 << "\" y=\"" << fmt(y + 4)
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\""
      << " fill=\"#333333\">" << fmt(t) << "</text>\n";
  }

  int color_idx = 0;
  for (const Series& s : spec.series) {
    const std::string color =
        s.color.empty() ? kPalette[color_idx++ % kPaletteSize] : s.color;
    o << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\"";
    if (s.dashed) o << " stroke-dasharray=\"6 4\"";
    o << " points=\"";
    bool first = true;
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!first) o << " ";
      o << fmt(px(s.x[i])) << "," << fmt(py(s.y[i]));
      first = false;
    }
    o << "\"/>\n";
  }

  for (const Marker& m : spec.markers) {
    if (!std::isfinite(m.x) || !std::isfinite(m.y)) continue;
    o << "<circle cx=\"" << fmt(px(m.x)) << "\" cy=\"" << fmt(py(m.y))
      << "\" r=\"4\" fill=\"" << m.color << "\"/>\n";
    if (!m.label.empty())
      o << "<text x=\"" << fmt(px(m.x) + 6) << "\" y=\"" << fmt(py(m.y) - 6)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << m.color
        << "\">" << escape(m.label) << "</text>\n";
  }

  if (!spec.title.empty())
    o << "<text x=\"" << w / 2 << "\" y=\"" << mt - 12
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\""
      << " fill=\"#111111\">" << escape(spec.title) << "</text>\n";
  if (!spec.x_label.empty())
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 10
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\""
      << " fill=\"#111111\">" << escape(spec.x_label) << "</text>\n";
  if (!spec.y_label.empty())
    o << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\""
      << " transform=\"rotate(-90 16 " << mt + ph / 2 << ")\""
      << " fill=\"#111111\">" << escape(spec.y_label) << "</text>\n";

  // Legend, top-right inside the frame.
  int ly = mt + 14;
  color_idx = 0;
  for (const Series& s : spec.series) {
    const std::string color =
        s.color.empty() ? kPalette[color_idx++ % kPaletteSize] : s.color;
    if (s.label.empty()) continue;
    const double lx = ml + pw - 150;
    o << "<line x1=\"" << fmt(lx) << "\" y1=\"" << ly - 4 << "\" x2=\""
      << fmt(lx + 22) << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"";
    if (s.dashed) o << " stroke-dasharray=\"6 4\"";
    o << "/>\n";
    o << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << ly
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#111111\">"
      << escape(s.label) << "</text>\n";
    ly += 16;
  }

  o << "</svg>\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << o.str();
  return static_cast<bool>(out);
}

}  // namespace seabal
