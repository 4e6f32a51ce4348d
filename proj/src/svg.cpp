#include "beatscope/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "beatscope/error.hpp"
#include "text_io.hpp"

namespace beatscope {

namespace {

constexpr double kLeft = 80.0;
constexpr double kTop = 50.0;
constexpr double kPlot = 480.0;
constexpr double kBarGap = 30.0;
constexpr double kBarWidth = 20.0;
constexpr int kBarSteps = 64;

// Perceptually ordered stops from dark blue through teal to yellow.
constexpr std::array<std::array<double, 3>, 5> kStops = {{
    {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
}};

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

std::string num(double x) { return fmt("%.2f", x); }

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string header(double width, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         num(width) + "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + ' ' + num(height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& body, const char* anchor, const std::string& extra = {}) {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\"" + extra + '>' +
         escape(body) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2) {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
         "\" stroke=\"black\"/>\n";
}

// Indices of roughly `target` evenly spaced ticks, always including both ends.
std::vector<std::size_t> tick_indices(std::size_t n, std::size_t target) {
  std::vector<std::size_t> out;
  if (n == 0) return out;
  const std::size_t stride = std::max<std::size_t>(1, (n - 1 + target - 1) / target);
  for (std::size_t i = 0; i < n; i += stride) out.push_back(i);
  if (out.back() != n - 1) out.push_back(n - 1);
  return out;
}

std::string tick_label(double x) { return std::abs(x - std::round(x)) < 1e-9 ? fmt("%.0f", x) : fmt("%.1f", x); }

std::string quantity_label(const std::string& quantity) {
  if (quantity == "abs_ft") return "|FT|";
  if (quantity == "abs_cwt") return "|CWT|";
  return quantity;
}

}  // namespace

std::string heatmap_color(double fraction) {
  const double f = std::clamp(std::isfinite(fraction) ? fraction : 0.0, 0.0, 1.0);
  const double pos = f * static_cast<double>(kStops.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), kStops.size() - 2);
  const double w = pos - static_cast<double>(i);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround((1.0 - w) * kStops[i][c] + w * kStops[i + 1][c]));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string heatmap_svg(const FrequencyMap& map) {
  const std::size_t n_e = map.excitation_nm.size();
  const std::size_t n_d = map.detection_nm.size();
  if (n_e == 0 || n_d == 0 || map.amplitude.size() != n_e * n_d) {
    throw Error(ErrorKind::EmptyAxis, "cannot render an empty map");
  }
  const auto [lo_it, hi_it] = std::minmax_element(map.amplitude.begin(), map.amplitude.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double range = hi > lo ? hi - lo : 1.0;
  const double cw = kPlot / static_cast<double>(n_d);
  const double ch = kPlot / static_cast<double>(n_e);
  const double width = kLeft + kPlot + kBarGap + kBarWidth + 90.0;
  const double height = kTop + kPlot + 60.0;

  std::string svg = header(width, height);
  svg += text(kLeft + kPlot / 2, 25.0,
              quantity_label(map.quantity) + " at " + fmt("%.1f", map.wavenumber_cm) + " cm-1 (band +/- " +
                  fmt("%.1f", map.band_cm) + " cm-1)",
              "middle", " font-size=\"14\"");
  svg += "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t e = 0; e < n_e; ++e) {
    // Excitation increases upward.
    const double y = kTop + kPlot - static_cast<double>(e + 1) * ch;
    for (std::size_t d = 0; d < n_d; ++d) {
      svg += "<rect x=\"" + num(kLeft + static_cast<double>(d) * cw) + "\" y=\"" + num(y) + "\" width=\"" + num(cw) +
             "\" height=\"" + num(ch) + "\" fill=\"" + heatmap_color((map.at(e, d) - lo) / range) + "\"/>\n";
    }
  }
  svg += "</g>\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kPlot) + "\" height=\"" + num(kPlot) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  for (std::size_t d : tick_indices(n_d, 6)) {
    const double x = kLeft + (static_cast<double>(d) + 0.5) * cw;
    svg += line(x, kTop + kPlot, x, kTop + kPlot + 5);
    svg += text(x, kTop + kPlot + 18, tick_label(map.detection_nm[d]), "middle");
  }
  for (std::size_t e : tick_indices(n_e, 6)) {
    const double y = kTop + kPlot - (static_cast<double>(e) + 0.5) * ch;
    svg += line(kLeft - 5, y, kLeft, y);
    svg += text(kLeft - 8, y + 4, tick_label(map.excitation_nm[e]), "end");
  }
  svg += text(kLeft + kPlot / 2, kTop + kPlot + 40, "detection (nm)", "middle");
  svg += text(20, kTop + kPlot / 2, "excitation (nm)", "middle",
              " transform=\"rotate(-90 20 " + num(kTop + kPlot / 2) + ")\"");

  const double bx = kLeft + kPlot + kBarGap;
  const double step = kPlot / kBarSteps;
  for (int i = 0; i < kBarSteps; ++i) {
    const double f = (static_cast<double>(i) + 0.5) / kBarSteps;
    svg += "<rect x=\"" + num(bx) + "\" y=\"" + num(kTop + kPlot - (i + 1) * step) + "\" width=\"" + num(kBarWidth) +
           "\" height=\"" + num(step) + "\" fill=\"" + heatmap_color(f) + "\" stroke=\"none\"/>\n";
  }
  svg += "<rect x=\"" + num(bx) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kBarWidth) + "\" height=\"" +
         num(kPlot) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += text(bx + kBarWidth + 5, kTop + 4, fmt("%.3g", hi), "start");
  svg += text(bx + kBarWidth + 5, kTop + kPlot + 4, fmt("%.3g", lo), "start");
  svg += "</svg>\n";
  return svg;
}

void render_heatmap_svg(const FrequencyMap& map, const std::filesystem::path& path) {
  detail::write_text_file(path, heatmap_svg(map));
}

std::string trace_svg(const TimeTrace& trace, const std::string& title) {
  const double w = 640.0;
  const double h = 360.0;
  const double left = 80.0;
  const double top = 50.0;
  const double pw = w - left - 30.0;
  const double ph = h - top - 60.0;
  const auto values = trace.values();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double t0 = trace.t0();
  const double t1 = trace.size() > 1 ? trace.back_time() : t0 + trace.dt();
  const auto px = [&](double t) { return left + (t - t0) / (t1 - t0) * pw; };
  const auto py = [&](double v) { return top + ph - (v - lo) / (hi - lo) * ph; };

  std::string svg = header(w, h);
  svg += text(left + pw / 2, 25.0, title, "middle", " font-size=\"14\"");
  svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<polyline fill=\"none\" stroke=\"#3b528b\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i) svg += ' ';
    svg += num(px(trace.time(i))) + ',' + num(py(values[i]));
  }
  svg += "\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double t = t0 + (t1 - t0) * i / 5.0;
    svg += line(px(t), top + ph, px(t), top + ph + 5);
    svg += text(px(t), top + ph + 18, fmt("%.0f", t), "middle");
    const double v = lo + (hi - lo) * i / 5.0;
    svg += line(left - 5, py(v), left, py(v));
    svg += text(left - 8, py(v) + 4, fmt("%.3g", v), "end");
  }
  svg += text(left + pw / 2, h - 15, "population time (fs)", "middle");
  svg += "</svg>\n";
  return svg;
}

void render_trace_svg(const TimeTrace& trace, const std::string& title, const std::filesystem::path& path) {
  detail::write_text_file(path, trace_svg(trace, title));
}

}  // namespace beatscope
