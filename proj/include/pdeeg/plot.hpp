#pragma once

// Minimal static SVG charts: line plots, bar charts and annotated heat tables.

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace pdeeg::plot {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  // Axis limits; equal bounds mean "fit the data".
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  bool diagonal = false;  // dashed y = x reference
};

std::string line_svg(const LinePlot& plot);

std::string bar_svg(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<double>& values);

struct HeatmapStyle {
  double cell_width = 64;
  double cell_height = 64;
  bool annotate = true;  // print each value in its cell
  int label_every = 1;   // label every n-th row and column
};

/// Cells coloured on [lo, hi], blue to white to red.
std::string heatmap_svg(const std::string& title, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const Eigen::MatrixXd& values,
                        double lo, double hi, const HeatmapStyle& style = {});

}  // namespace pdeeg::plot
