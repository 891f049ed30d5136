#include "wkl/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "wkl/errors.hpp"

namespace wkl {
namespace {

const char* const kPalette[] = {"#1f4e79", "#b03a2e", "#1e8449", "#7d3c98",
                                "#b9770e", "#117a65", "#5d6d7e", "#a93226"};

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

// Round outward to a 1-2-5 step.
double nice_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

std::string draw(const std::vector<double>& x, const std::vector<std::vector<double>>& ys,
                 const std::vector<std::string>& names, const SvgStyle& st) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (double v : x) {
    x0 = std::min(x0, v);
    x1 = std::max(x1, v);
  }
  for (const auto& s : ys)
    for (double v : s) {
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  if (!(x1 >= x0) || !(y1 >= y0)) throw Error(ErrorCode::EmptyData, "nothing finite to plot");
  if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }
  const double pad = 0.04 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double W = st.width - 2.0 * st.margin, H = st.height - 2.0 * st.margin;
  auto px = [&](double v) { return st.margin + (v - x0) / (x1 - x0) * W; };
  auto py = [&](double v) { return st.margin + (y1 - v) / (y1 - y0) * H; };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      st.width, st.height, st.width, st.height);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!st.title.empty())
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                       st.width / 2, st.margin / 2, escape(st.title));

  // axes and ticks
  out += fmt::format("<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
                     "<rect x=\"{}\" y=\"{}\" width=\"{:.2f}\" height=\"{:.2f}\"/>\n</g>\n",
                     st.margin, st.margin, W, H);
  out += "<g font-size=\"10\" fill=\"black\">\n";
  const double sx = nice_step(x1 - x0), sy = nice_step(y1 - y0);
  for (double v = std::ceil(x0 / sx) * sx; v <= x1 + 1e-9 * sx; v += sx)
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", px(v),
                       st.margin + H + 14.0, std::abs(v) < 1e-12 * sx ? 0.0 : v);
  for (double v = std::ceil(y0 / sy) * sy; v <= y1 + 1e-9 * sy; v += sy)
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n",
                       st.margin - 4.0, py(v) + 3.0, std::abs(v) < 1e-12 * sy ? 0.0 : v);
  if (!st.x_label.empty())
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                       st.margin + W / 2.0, st.height - 12.0, escape(st.x_label));
  if (!st.y_label.empty())
    out += fmt::format("<text x=\"14\" y=\"{:.2f}\" text-anchor=\"middle\" "
                       "transform=\"rotate(-90 14 {:.2f})\">{}</text>\n",
                       st.margin + H / 2.0, st.margin + H / 2.0, escape(st.y_label));
  out += "</g>\n";

  for (std::size_t i = 0; i < ys.size(); ++i) {
    std::string pts;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!std::isfinite(ys[i][j])) continue;
      if (!pts.empty()) pts += ' ';
      pts += fmt::format("{:.3f},{:.3f}", px(x[j]), py(ys[i][j]));
    }
    const std::string id = i < names.size() ? escape(names[i]) : fmt::format("curve{}", i);
    out += fmt::format("<polyline id=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"{}\"/>\n",
                       id, kPalette[i % 8], st.stroke, pts);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace

std::string render_svg(const PathEnsemble& paths, const SvgStyle& style) {
  if (paths.curves.empty() || paths.times.empty()) throw Error(ErrorCode::EmptyData, "no curves");
  for (const auto& c : paths.curves)
    if (c.size() != paths.times.size()) throw Error(ErrorCode::InvalidArgument, "curve length mismatch");
  return draw(paths.times, paths.curves, {}, style);
}

std::string render_svg(const Table& table, const SvgStyle& style) {
  if (table.series.empty() || table.x.empty()) throw Error(ErrorCode::EmptyData, "empty table");
  for (const auto& c : table.series)
    if (c.size() != table.x.size()) throw Error(ErrorCode::InvalidArgument, "column length mismatch");
  return draw(table.x, table.series, table.names, style);
}

}  // namespace wkl
