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

#ifndef SEABAL_PLOT_HPP_
#define SEABAL_PLOT_HPP_

#include <string>
#include <vector>

namespace seabal {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;       // empty -> palette
  bool dashed = false;
};

struct Marker {
  double x = 0.0, y = 0.0;
  std::string label;
  std::string color = "#000000";
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Marker> markers;
  int width = 720;
  int height = 420;
};

// Deterministic standalone SVG line plot (fixed layout, no external fonts
// beyond generic sans-serif).  Returns false when nothing could be drawn.
bool write_svg_plot(const std::string& path, const PlotSpec& spec);

}  // namespace seabal

#endif  // SEABAL_PLOT_HPP_
