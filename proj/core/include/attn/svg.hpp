#pragma once

#include <string>
#include <utility>
#include <vector>

namespace attn::svg {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  // Optional symmetric error bar per point.
  std::vector<double> errors;
  bool stepped = false;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

// Standalone SVG document. Non-positive values are skipped on log axes.
std::string render(const LinePlot& plot);

struct BarGroup {
  std::string name;
  std::vector<double> values;
};

std::string render_bars(const std::string& title, const std::vector<std::string>& categories,
                        const std::vector<BarGroup>& groups);

}  // namespace attn::svg
