#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace wkl {

using cplx = std::complex<double>;

enum class ContourKind { RayPairUp45, RayPairUp135, Wedge, VerticalSegment, Circle, VerticalLine };

struct ContourPath {
  ContourKind kind = ContourKind::Wedge;
  cplx apex{0.0, 0.0};  // apex, segment midpoint, circle center or line abscissa
  double angle = 0.0;   // ray angle for the ray-pair kinds
  double radius = 0.0;  // truncation radius, half-length, or circle radius
};

struct QuadratureRule {
  std::vector<cplx> nodes;
  std::vector<cplx> weights;  // orientation included
  double est_tail_bound = 0.0;
  int panel_count = 0;
  int order = 0;

  std::size_t size() const { return nodes.size(); }
};

struct DiscreteContour {
  ContourPath path;
  QuadratureRule rule;
};

struct PanelSettings {
  int order = 16;
  int panels = 8;
  double ratio = 1.5;
  // Singular points off the path; panels closer than ~their length get split.
  std::vector<cplx> singular;
  double min_panel = 1e-7;
};

DiscreteContour gamma_plus(double a, double R, int panels, int order = 16);
DiscreteContour gamma_minus(double a, double R, int panels, int order = 16);
DiscreteContour wedge(double a, double phi, double R, int panels, int order = 16);
DiscreteContour wedge(double a, double phi, double R, const PanelSettings& settings);
DiscreteContour vertical_segment(cplx lower, cplx upper, int panels, int order = 16);
DiscreteContour circle(cplx center, double radius, int points);
// c + iu, |u| <= half_length, panels graded away from u = 0.
DiscreteContour vertical_line(double c, double half_length, const PanelSettings& settings);

struct Segment {
  cplx lower;
  cplx upper;
};

// The segment joining the two intersection points of Gamma^+ at alpha_t1 and
// Gamma^- at beta_t2, when there are two.
std::optional<Segment> intersection_segment(double alpha_t1, double beta_t2);

// Log-magnitude of an integrand as a function of the point on the path.
using LogMagnitude = std::function<double(cplx)>;

struct RadiusChoice {
  double radius = 0.0;
  double peak_log = 0.0;     // max of the log-magnitude along the ray
  double peak_at = 0.0;      // radius where the max sits
  double tail_log = 0.0;     // log of the bound on the discarded tail
};

// Truncation radius for the ray apex + r e^{i angle}: smallest r past the
// peak where the integrand has dropped by `drop` nats. `scale` is the natural
// length of the integrand near the apex.
RadiusChoice choose_radius(cplx apex, double angle, const LogMagnitude& logmag, double scale,
                           double drop = 38.0);

// Bound on the integral of |f| beyond R along both rays of a wedge.
double tail_bound(cplx apex, double angle, double R, const LogMagnitude& logmag);

// Sum of f(node) * weight.
cplx integrate(const QuadratureRule& rule, const std::function<cplx(cplx)>& f);

}  // namespace wkl
