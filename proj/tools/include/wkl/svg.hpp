#pragma once

#include <string>
#include <vector>

#include "wkl/stochastic.hpp"

namespace wkl {

struct SvgStyle {
  int width = 800;
  int height = 500;
  int margin = 50;
  double stroke = 1.2;
  std::string title;
  std::string x_label = "t";
  std::string y_label;
};

// Columns sharing one abscissa.
struct Table {
  std::vector<double> x;
  std::vector<std::vector<double>> series;
  std::vector<std::string> names;
};

// One polyline per curve, top curve first.
std::string render_svg(const PathEnsemble& paths, const SvgStyle& style = {});
std::string render_svg(const Table& table, const SvgStyle& style = {});

}  // namespace wkl
