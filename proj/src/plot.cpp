#include "pdeeg/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace pdeeg::plot {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v, const char* fmt = "%.4g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string xml(std::string_view s) {
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

std::string header(double w, double h, const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + " " + num(h) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         "<text x=\"" + num(w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         xml(title) + "</text>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle",
                 const std::string& extra = "") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\"" + extra +
         ">" + xml(s) + "</text>\n";
}

struct Range {
  double lo, hi;
  double span() const { return hi - lo; }
};

Range fit(double lo, double hi, const std::vector<Series>& series, bool use_x) {
  if (lo != hi) return {lo, hi};
  lo = INFINITY;
  hi = -INFINITY;
  for (const auto& s : series)
    for (double v : use_x ? s.x : s.y)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (lo == hi) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

}  // namespace

std::string line_svg(const LinePlot& p) {
  const Range xr = fit(p.x_min, p.x_max, p.series, true);
  const Range yr = fit(p.y_min, p.y_max, p.series, false);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / xr.span() * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / yr.span() * ph; };

  std::string svg = header(kWidth, kHeight, p.title);
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xr.lo + xr.span() * i / 5.0, fy = yr.lo + yr.span() * i / 5.0;
    svg += text(px(fx), kTop + ph + 16, num(fx, "%.3g"));
    svg += text(kLeft - 6, py(fy) + 4, num(fy, "%.3g"), "end");
  }
  svg += text(kLeft + pw / 2, kHeight - 18, p.x_label);
  svg += text(18, kTop + ph / 2, p.y_label, "middle",
              " transform=\"rotate(-90 18 " + num(kTop + ph / 2) + ")\"");
  if (p.diagonal)
    svg += "<line x1=\"" + num(px(xr.lo)) + "\" y1=\"" + num(py(yr.lo)) + "\" x2=\"" +
           num(px(xr.hi)) + "\" y2=\"" + num(py(yr.hi)) +
           "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  for (std::size_t s = 0; s < p.series.size(); ++s) {
    const auto& ser = p.series[s];
    const char* colour = kPalette[s % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      pts += num(px(ser.x[i]), "%.2f") + "," + num(py(ser.y[i]), "%.2f") + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = kTop + 16 + 16 * static_cast<double>(s);
    svg += "<line x1=\"" + num(kLeft + pw - 150) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(kLeft + pw - 130) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + colour +
           "\" stroke-width=\"2\"/>\n";
    svg += text(kLeft + pw - 125, ly, ser.name, "start");
  }
  svg += "</svg>\n";
  return svg;
}

std::string bar_svg(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<double>& values) {
  const double row = 18;
  const double h = kTop + 20 + row * static_cast<double>(values.size());
  const double label_w = 180, pw = kWidth - label_w - 80;
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, v);
  if (vmax <= 0.0) vmax = 1.0;

  std::string svg = header(kWidth, h, title);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = kTop + row * static_cast<double>(i);
    const double w = std::max(0.0, values[i]) / vmax * pw;
    svg += text(label_w - 6, y + 13, i < labels.size() ? labels[i] : "", "end");
    svg += "<rect x=\"" + num(label_w) + "\" y=\"" + num(y + 2) + "\" width=\"" + num(w, "%.2f") +
           "\" height=\"" + num(row - 4) + "\" fill=\"#1f77b4\"/>\n";
    svg += text(label_w + w + 4, y + 13, num(values[i], "%.3f"), "start");
  }
  svg += "</svg>\n";
  return svg;
}

std::string heatmap_svg(const std::string& title, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const Eigen::MatrixXd& values,
                        double lo, double hi, const HeatmapStyle& style) {
  const double cw = style.cell_width, ch = style.cell_height, label_w = 110;
  const int every = std::max(1, style.label_every);
  const double w = label_w + cw * static_cast<double>(values.cols()) + 20;
  const double h = kTop + 30 + ch * static_cast<double>(values.rows()) + 10;
  auto label = [](const std::vector<std::string>& v, Eigen::Index i) {
    return i < static_cast<Eigen::Index>(v.size()) ? v[static_cast<std::size_t>(i)] : std::string();
  };
  std::string svg = header(std::max(w, 320.0), h, title);
  for (Eigen::Index c = 0; c < values.cols(); c += every)
    svg += text(label_w + cw * (static_cast<double>(c) + 0.5), kTop + 20, label(col_labels, c));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    const double y = kTop + 30 + ch * static_cast<double>(r);
    if (r % every == 0) svg += text(label_w - 6, y + ch / 2 + 4, label(row_labels, r), "end");
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const double v = values(r, c);
      double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
      t = std::clamp(std::isfinite(t) ? t : 0.5, 0.0, 1.0);
      const int red = t < 0.5 ? static_cast<int>(255 * 2 * t) : 255;
      const int blue = t > 0.5 ? static_cast<int>(255 * 2 * (1 - t)) : 255;
      const int green = std::min(red, blue);
      char colour[8];
      std::snprintf(colour, sizeof colour, "#%02x%02x%02x", red, green, blue);
      const double x = label_w + cw * static_cast<double>(c);
      svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cw) +
             "\" height=\"" + num(ch) + "\" fill=\"" + colour + "\"" +
             (style.annotate ? " stroke=\"white\"" : "") + "/>\n";
      if (style.annotate) svg += text(x + cw / 2, y + ch / 2 + 4, num(v, "%.3g"));
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace pdeeg::plot
