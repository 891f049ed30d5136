#include "wkl/contours.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wkl/errors.hpp"
#include "wkl/quadrature.hpp"

namespace wkl {

namespace {

constexpr double kPi = std::numbers::pi;

double distance_to_segment(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double s = ((p - a) * std::conj(d)).real() / len2;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(p - (a + s * d));
}

// Split panels that sit too close to a singular point for their length.
std::vector<double> refine_edges(std::vector<double> edges, cplx apex, cplx dir,
                                 const std::vector<cplx>& singular, double min_len) {
  if (singular.empty()) return edges;
  for (int round = 0; round < 64; ++round) {
    std::vector<double> next;
    next.push_back(edges.front());
    bool split = false;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double lo = edges[k];
      const double hi = edges[k + 1];
      const double len = hi - lo;
      double dist = std::numeric_limits<double>::infinity();
      for (cplx s : singular) {
        dist = std::min(dist, distance_to_segment(s, apex + lo * dir, apex + hi * dir));
        dist = std::min(dist, distance_to_segment(std::conj(s), apex + lo * dir, apex + hi * dir));
      }
      if (len > 1.2 * dist && len > min_len) {
        next.push_back(0.5 * (lo + hi));
        split = true;
      }
      next.push_back(hi);
    }
    edges.swap(next);
    if (!split) break;
  }
  return edges;
}

DiscreteContour build_wedge(ContourKind kind, double a, double phi, double R,
                            const PanelSettings& s) {
  if (!(phi > 0.0 && phi < kPi)) {
    throw Error(ErrorCode::AngleOutOfRange, "wedge angle must lie in (0, pi)");
  }
  if (s.panels < 1) throw Error(ErrorCode::BadResolution, "panel count must be at least 1");
  if (!(R > 0.0)) throw Error(ErrorCode::BadResolution, "truncation radius must be positive");
  const cplx apex(a, 0.0);
  const cplx up = std::polar(1.0, phi);
  const cplx down = std::polar(1.0, -phi);
  auto edges = graded_edges(R, s.panels, s.ratio);
  edges = refine_edges(std::move(edges), apex, up, s.singular, s.min_panel * R);

  std::vector<double> r, w;
  panel_nodes(edges, s.order, r, w);
  DiscreteContour out;
  out.path = {kind, apex, phi, R};
  auto& rule = out.rule;
  rule.order = s.order;
  rule.panel_count = 2 * static_cast<int>(edges.size() - 1);
  rule.nodes.reserve(2 * r.size());
  rule.weights.reserve(2 * r.size());
  // Lower ray first, walked from R back to the apex.
  for (std::size_t i = r.size(); i-- > 0;) {
    rule.nodes.push_back(apex + r[i] * down);
    rule.weights.push_back(-w[i] * down);
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    rule.nodes.push_back(apex + r[i] * up);
    rule.weights.push_back(w[i] * up);
  }
  return out;
}

}  // namespace

DiscreteContour wedge(double a, double phi, double R, const PanelSettings& settings) {
  return build_wedge(ContourKind::Wedge, a, phi, R, settings);
}

DiscreteContour wedge(double a, double phi, double R, int panels, int order) {
  PanelSettings s;
  s.panels = panels;
  s.order = order;
  return build_wedge(ContourKind::Wedge, a, phi, R, s);
}

DiscreteContour gamma_plus(double a, double R, int panels, int order) {
  PanelSettings s;
  s.panels = panels;
  s.order = order;
  return build_wedge(ContourKind::RayPairUp45, a, kPi / 4.0, R, s);
}

DiscreteContour gamma_minus(double a, double R, int panels, int order) {
  PanelSettings s;
  s.panels = panels;
  s.order = order;
  return build_wedge(ContourKind::RayPairUp135, a, 3.0 * kPi / 4.0, R, s);
}

DiscreteContour vertical_segment(cplx lower, cplx upper, int panels, int order) {
  if (panels < 1) throw Error(ErrorCode::BadResolution, "panel count must be at least 1");
  DiscreteContour out;
  out.path = {ContourKind::VerticalSegment, 0.5 * (lower + upper), kPi / 2.0,
              0.5 * std::abs(upper - lower)};
  std::vector<double> edges(panels + 1);
  for (int k = 0; k <= panels; ++k) edges[k] = static_cast<double>(k) / panels;
  std::vector<double> s, w;
  panel_nodes(edges, order, s, w);
  const cplx d = upper - lower;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.rule.nodes.push_back(lower + s[i] * d);
    out.rule.weights.push_back(w[i] * d);
  }
  out.rule.order = order;
  out.rule.panel_count = panels;
  return out;
}

DiscreteContour circle(cplx center, double radius, int points) {
  if (points < 1) throw Error(ErrorCode::BadResolution, "circle needs at least one point");
  DiscreteContour out;
  out.path = {ContourKind::Circle, center, 0.0, radius};
  const double h = 2.0 * kPi / points;
  for (int k = 0; k < points; ++k) {
    const cplx e = std::polar(1.0, h * k);
    out.rule.nodes.push_back(center + radius * e);
    out.rule.weights.push_back(cplx(0.0, 1.0) * radius * e * h);
  }
  out.rule.order = 1;
  out.rule.panel_count = points;
  return out;
}

DiscreteContour vertical_line(double c, double half_length, const PanelSettings& settings) {
  if (settings.panels < 1) throw Error(ErrorCode::BadResolution, "panel count must be at least 1");
  DiscreteContour out;
  out.path = {ContourKind::VerticalLine, cplx(c, 0.0), kPi / 2.0, half_length};
  auto edges = graded_edges(half_length, settings.panels, settings.ratio);
  edges = refine_edges(std::move(edges), cplx(c, 0.0), cplx(0.0, 1.0), settings.singular,
                       settings.min_panel * half_length);
  std::vector<double> u, w;
  panel_nodes(edges, settings.order, u, w);
  for (std::size_t i = u.size(); i-- > 0;) {
    out.rule.nodes.push_back(cplx(c, -u[i]));
    out.rule.weights.push_back(cplx(0.0, w[i]));
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.rule.nodes.push_back(cplx(c, u[i]));
    out.rule.weights.push_back(cplx(0.0, w[i]));
  }
  out.rule.order = settings.order;
  out.rule.panel_count = 2 * static_cast<int>(edges.size() - 1);
  return out;
}

std::optional<Segment> intersection_segment(double alpha_t1, double beta_t2) {
  if (!(alpha_t1 < beta_t2)) return std::nullopt;
  const double m = 0.5 * (alpha_t1 + beta_t2);
  const double h = 0.5 * (beta_t2 - alpha_t1);
  return Segment{cplx(m, -h), cplx(m, h)};
}

RadiusChoice choose_radius(cplx apex, double angle, const LogMagnitude& logmag, double scale,
                           double drop) {
  const cplx dir = std::polar(1.0, angle);
  auto f = [&](double r) {
    double v = logmag(apex + r * dir);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  double peak = f(0.0);
  double r = scale / 16.0;
  const double limit = 1e6 * std::max(scale, 1e-6);
  for (;;) {
    const double v = f(r);
    peak = std::max(peak, v);
    if (v < peak - drop - 6.0) break;
    r *= 2.0;
    if (r > limit) throw Error(ErrorCode::InvalidArgument, "integrand does not decay along the contour");
  }
  // Resample uniformly so a narrow peak between doublings is not missed.
  const int n = 256;
  std::vector<double> rs(n + 1), vs(n + 1);
  RadiusChoice out;
  out.peak_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    rs[i] = r * i / n;
    vs[i] = f(rs[i]);
    if (vs[i] > out.peak_log) {
      out.peak_log = vs[i];
      out.peak_at = rs[i];
    }
  }
  const double target = out.peak_log - drop;
  int i = 0;
  while (i <= n && (rs[i] <= out.peak_at || vs[i] >= target)) ++i;
  if (i > n) i = n;
  double lo = rs[i - 1], hi = rs[i];
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.radius = std::max(hi, scale / 16.0);
  out.tail_log = std::log(std::max(tail_bound(apex, angle, out.radius, logmag), 1e-300));
  return out;
}

double tail_bound(cplx apex, double angle, double R, const LogMagnitude& logmag) {
  double total = 0.0;
  for (double sgn : {1.0, -1.0}) {
    const cplx dir = std::polar(1.0, sgn * angle);
    const double h = 1e-3 * std::max(R, 1e-3);
    const double l0 = logmag(apex + R * dir);
    const double l1 = logmag(apex + (R + h) * dir);
    double slope = (l0 - l1) / h;
    if (!(slope > 0.0)) slope = 1e-3;
    total += std::exp(l0) / slope;
  }
  return total;
}

cplx integrate(const QuadratureRule& rule, const std::function<cplx(cplx)>& f) {
  cplx sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += f(rule.nodes[i]) * rule.weights[i];
  return sum;
}

}  // namespace wkl
