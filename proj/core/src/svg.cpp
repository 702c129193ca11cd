#include "attn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace attn::svg {
namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double fraction(double v) const {
    const double a = log ? std::log10(v) : v;
    const double b = log ? std::log10(lo) : lo;
    const double c = log ? std::log10(hi) : hi;
    return c > b ? (a - b) / (c - b) : 0.5;
  }
};

void header(std::ostringstream& out, const std::string& title, double width = kWidth) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
}

}  // namespace

std::string render(const LinePlot& plot) {
  Axis x{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(), plot.log_x};
  Axis y{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(), plot.log_y};
  auto usable = [&](double vx, double vy) { return (!plot.log_x || vx > 0) && (!plot.log_y || vy > 0); };
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto [vx, vy] = s.points[i];
      if (!usable(vx, vy)) continue;
      const double err = i < s.errors.size() ? s.errors[i] : 0.0;
      x.lo = std::min(x.lo, vx);
      x.hi = std::max(x.hi, vx);
      y.lo = std::min(y.lo, plot.log_y ? vy : vy - err);
      y.hi = std::max(y.hi, vy + err);
    }
  }
  if (x.lo > x.hi) x = {plot.log_x ? 1.0 : 0.0, plot.log_x ? 10.0 : 1.0, plot.log_x};
  if (y.lo > y.hi) y = {plot.log_y ? 0.1 : 0.0, 1.0, plot.log_y};
  if (!plot.log_y) y.lo = std::min(y.lo, 0.0);
  if (x.lo == x.hi) x.hi = x.lo + (plot.log_x ? x.lo : 1.0);
  if (y.lo == y.hi) y.hi = y.lo + (plot.log_y ? y.lo : 1.0);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + x.fraction(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - y.fraction(v)) * ph; };

  std::ostringstream out;
  header(out, plot.title);
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double vx = plot.log_x ? std::pow(10, std::log10(x.lo) + f * (std::log10(x.hi) - std::log10(x.lo)))
                                 : x.lo + f * (x.hi - x.lo);
    const double vy = plot.log_y ? std::pow(10, std::log10(y.lo) + f * (std::log10(y.hi) - std::log10(y.lo)))
                                 : y.lo + f * (y.hi - y.lo);
    out << "<text x=\"" << num(kLeft + f * pw) << "\" y=\"" << num(kTop + ph + 15) << "\" text-anchor=\"middle\">"
        << tick(vx) << "</text>\n";
    out << "<text x=\"" << num(kLeft - 5) << "\" y=\"" << num(kTop + (1 - f) * ph + 4) << "\" text-anchor=\"end\">"
        << tick(vy) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << (plot.log_x ? " (log)" : "") << "</text>\n";
  out << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(plot.y_label) << (plot.log_y ? " (log)" : "") << "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& series = plot.series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    std::string path;
    bool first = true;
    double prev_y = 0;
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      const auto [vx, vy] = series.points[i];
      if (!usable(vx, vy)) continue;
      if (first) {
        path += "M" + num(px(vx)) + "," + num(py(vy));
      } else {
        if (series.stepped) path += " L" + num(px(vx)) + "," + num(prev_y);
        path += " L" + num(px(vx)) + "," + num(py(vy));
      }
      prev_y = py(vy);
      first = false;
      if (i < series.errors.size() && series.errors[i] > 0) {
        const double lo = plot.log_y ? std::max(vy - series.errors[i], y.lo) : vy - series.errors[i];
        out << "<line x1=\"" << num(px(vx)) << "\" x2=\"" << num(px(vx)) << "\" y1=\"" << num(py(lo)) << "\" y2=\""
            << num(py(vy + series.errors[i])) << "\" stroke=\"" << color << "\"/>\n";
      }
    }
    if (!path.empty()) out << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 14 + 16 * static_cast<double>(s);
    out << "<rect x=\"" << num(kWidth - kRight + 10) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
        << color << "\"/>\n";
    out << "<text x=\"" << num(kWidth - kRight + 25) << "\" y=\"" << num(ly) << "\">" << escape(series.name)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_bars(const std::string& title, const std::vector<std::string>& categories,
                        const std::vector<BarGroup>& groups) {
  std::ostringstream out;
  header(out, title);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  double hi = 0;
  for (const auto& g : groups) {
    for (double v : g.values) hi = std::max(hi, v);
  }
  if (hi <= 0) hi = 1;
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double slot = categories.empty() ? pw : pw / static_cast<double>(categories.size());
  const double bar = groups.empty() ? 0 : slot * 0.8 / static_cast<double>(groups.size());
  for (std::size_t c = 0; c < categories.size(); ++c) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double v = c < groups[g].values.size() ? groups[g].values[c] : 0.0;
      const double h = v / hi * ph;
      out << "<rect x=\"" << num(kLeft + c * slot + slot * 0.1 + g * bar) << "\" y=\"" << num(kTop + ph - h)
          << "\" width=\"" << num(bar) << "\" height=\"" << num(h) << "\" fill=\""
          << kPalette[g % std::size(kPalette)] << "\"/>\n";
    }
    out << "<text x=\"" << num(kLeft + (c + 0.5) * slot) << "\" y=\"" << num(kTop + ph + 15)
        << "\" text-anchor=\"middle\">" << escape(categories[c]) << "</text>\n";
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double ly = kTop + 14 + 16 * static_cast<double>(g);
    out << "<rect x=\"" << num(kWidth - kRight + 10) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
        << kPalette[g % std::size(kPalette)] << "\"/>\n";
    out << "<text x=\"" << num(kWidth - kRight + 25) << "\" y=\"" << num(ly) << "\">" << escape(groups[g].name)
        << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft - 5) << "\" y=\"" << num(kTop + 4) << "\" text-anchor=\"end\">" << tick(hi)
      << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace attn::svg
