#include "wkl/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wkl/errors.hpp"
#include "wkl/parallel.hpp"
#include "wkl/quadrature.hpp"

namespace wkl {

namespace {

void check_domain(const GapDomain& D) {
  if (D.times.size() != D.thresholds.size()) {
    throw Error(ErrorCode::InvalidArgument, "gap domain needs one threshold per time");
  }
  for (std::size_t j = 1; j < D.times.size(); ++j) {
    if (!(D.times[j] > D.times[j - 1])) {
      throw Error(ErrorCode::InvalidArgument, "gap domain times must be strictly increasing");
    }
  }
}

// Exponential row growth of the kernel at time t (residues at poles left of
// the saddle), and how far to the right of the threshold mass can sit.
double growth_rate(const ExtendedKernel& K, double t) {
  double g = 0.0;
  if (K.family() == Family::abc || K.family() == Family::airy || K.family() == Family::flat) {
    const double tau = t + (K.family() == Family::flat ? K.T() : 0.0);
    for (double a : K.params().a_nonzero()) g = std::max(g, tau - 1.0 / a);
  } else if (K.family() == Family::sloped) {
    for (double a : K.params().a_nonzero()) {
      g = std::max(g, std::sqrt(2.0 * K.T()) * (1.0 / K.rho() - 1.0 / a));
    }
  }
  return g > 0.0 ? g + 0.5 : 0.0;
}

double reach(const ExtendedKernel& K, double t, double A) {
  double unit = 1.0;
  if (K.family() == Family::dbm) unit = std::sqrt(t) * (1.0 + std::sqrt(static_cast<double>(K.n())));
  if (K.family() == Family::sloped) unit = std::sqrt(t);
  double top = std::max(A, 0.0) + 40.0 * unit;
  for (const auto& [c, w] : K.mass_hints(t)) top = std::max(top, c + 14.0 * w);
  return top;
}

}  // namespace

NystromSystem discretize(const ExtendedKernel& K, const GapDomain& D, int n_nodes) {
  check_domain(D);
  if (n_nodes < 1) throw Error(ErrorCode::BadResolution, "n_nodes must be positive");
  const GaussRule& g = gauss_legendre(n_nodes);
  constexpr double inf = std::numeric_limits<double>::infinity();
  NystromSystem sys;
  std::vector<double> rates;
  for (std::size_t j = 0; j < D.times.size(); ++j) {
    const double A = D.thresholds[j];
    if (A == inf) continue;
    const double top = reach(K, D.times[j], A);
    const double bottom = A == -inf ? -top : A;
    std::vector<double> xs, ws;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      double x, w;
      if (A == -inf) {
        // x = u / (1 - u^2) on (-1, 1)
        const double u = g.x[i];
        const double d = 1.0 - u * u;
        x = u / d;
        w = g.w[i] * (1.0 + u * u) / (d * d);
      } else {
        // x = A + s / (1 - s) on (0, 1)
        const double s = 0.5 * (g.x[i] + 1.0);
        const double d = 1.0 - s;
        x = A + s / d;
        w = 0.5 * g.w[i] / (d * d);
      }
      // Nodes past the reach carry no mass; dropping them avoids overflow.
      if (x > top || x < bottom) continue;
      xs.push_back(x);
      ws.push_back(w);
    }
    sys.times.push_back(D.times[j]);
    sys.nodes.push_back(std::move(xs));
    sys.weights.push_back(std::move(ws));
    rates.push_back(growth_rate(K, D.times[j]));
  }
  const std::size_t m = sys.times.size();
  std::vector<Eigen::Index> offset(m + 1, 0);
  for (std::size_t j = 0; j < m; ++j) {
    offset[j + 1] = offset[j] + static_cast<Eigen::Index>(sys.nodes[j].size());
  }
  sys.M = Eigen::MatrixXd::Zero(offset[m], offset[m]);
  std::vector<Eigen::MatrixXd> blocks(m * m);
  parallel_for(m * m, [&](std::size_t idx) {
    const std::size_t j = idx / m, k = idx % m;
    if (sys.nodes[j].empty() || sys.nodes[k].empty()) return;
    blocks[idx] = K.block(sys.times[j], sys.nodes[j], sys.times[k], sys.nodes[k]);
  });
  // Conjugation by e^{-r x}: leaves the determinant unchanged and tames the
  // rank-one pieces that grow in x.
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto& B = blocks[j * m + k];
      for (Eigen::Index p = 0; p < B.rows(); ++p) {
        for (Eigen::Index q = 0; q < B.cols(); ++q) {
          const double v = B(p, q);
          if (v == 0.0) continue;
          const double lg = std::log(std::abs(v)) - rates[j] * sys.nodes[j][p] +
                            rates[k] * sys.nodes[k][q] +
                            0.5 * std::log(sys.weights[j][p] * sys.weights[k][q]);
          sys.M(offset[j] + p, offset[k] + q) = std::copysign(std::exp(lg), v);
        }
      }
    }
  }
  return sys;
}

double fredholm_det(const NystromSystem& sys) {
  if (sys.M.size() == 0) return 1.0;
  if (!sys.M.allFinite()) throw Error(ErrorCode::Overflow, "Nystrom matrix has non-finite entries");
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(sys.M.rows(), sys.M.cols()) - sys.M;
  const double det = A.partialPivLu().determinant();
  if (!std::isfinite(det)) throw Error(ErrorCode::Overflow, "Fredholm determinant overflows");
  return det;
}

Estimate gap_probability_estimate(const ExtendedKernel& K, const GapDomain& D, int n_nodes) {
  Estimate e;
  const double coarse = fredholm_det(discretize(K, D, n_nodes));
  const double fine = fredholm_det(discretize(K, D, 2 * n_nodes));
  e.value = fine;
  e.error = std::abs(fine - coarse);
  return e;
}

double gap_probability(const ExtendedKernel& K, const GapDomain& D, int n_nodes) {
  double v = fredholm_det(discretize(K, D, n_nodes));
  if (v < 0.0 || v > 1.0) {
    if (v < -1e-9 || v > 1.0 + 1e-9) {
      std::ostringstream os;
      os << "gap probability " << v << " outside [0, 1]; clamped";
      warn(os.str());
    }
    v = std::clamp(v, 0.0, 1.0);
  }
  return v;
}

double intensity(const ExtendedKernel& K, double t, double x) { return K(t, x, t, x); }

double tw2_cdf(double A, int n_nodes) {
  return gap_probability(ExtendedKernel::airy(), {{0.0}, {A}}, n_nodes);
}

double bbp_cdf(const WandererParams& p, double t, double A, int n_nodes) {
  return gap_probability(ExtendedKernel::abc(p), {{t}, {A}}, n_nodes);
}

Estimate expected_count_above(const ExtendedKernel& K, double t, double A) {
  if (!std::isfinite(A)) throw Error(ErrorCode::InvalidArgument, "count threshold must be finite");
  double unit = 1.0;
  std::vector<std::pair<double, double>> hints = K.mass_hints(t);
  switch (K.family()) {
    case Family::dbm:
      unit = std::sqrt(t);
      hints.emplace_back(0.0, std::sqrt(t) * (2.0 * std::sqrt(static_cast<double>(K.n())) + 1.0));
      break;
    case Family::sloped:
      unit = std::sqrt(t);
      hints.emplace_back(0.0, 3.0 * std::sqrt(t));
      break;
    default:
      hints.emplace_back(0.0, 1.0);
      break;
  }
  // Regions with the panel length each one needs.
  struct Region {
    double lo, hi, h;
  };
  std::vector<Region> regions = {{A, A + 30.0 * unit, 0.5 * unit}};
  for (const auto& [c, w] : hints) {
    const double lo = std::max(A, c - 12.0 * w), hi = c + 12.0 * w;
    if (hi > lo) regions.push_back({lo, hi, 0.5 * w});
  }
  std::vector<double> cuts;
  for (const auto& r : regions) {
    cuts.push_back(r.lo);
    cuts.push_back(r.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::pair<double, double>> panels;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double mid = 0.5 * (lo + hi);
    double h = std::numeric_limits<double>::infinity();
    for (const auto& r : regions) {
      if (r.lo <= mid && mid <= r.hi) h = std::min(h, r.h);
    }
    if (std::isfinite(h)) {
      const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / h)));
      for (int k = 0; k < n; ++k) panels.emplace_back(lo + (hi - lo) * k / n, lo + (hi - lo) * (k + 1) / n);
    } else {
      // Uncovered stretch between regions: panels grow geometrically from both ends.
      std::vector<double> e = {lo, hi};
      double a = lo, b = hi, len = unit;
      while (b - a > 4.0 * len) {
        a += len;
        b -= len;
        e.push_back(a);
        e.push_back(b);
        len *= 2.0;
      }
      std::sort(e.begin(), e.end());
      for (std::size_t k = 0; k + 1 < e.size(); ++k) panels.emplace_back(e[k], e[k + 1]);
    }
  }

  const GaussRule& g = gauss_legendre(16);
  const std::size_t m = g.x.size();
  const double top = cuts.back();
  // Node layout per panel: m coarse nodes, then 2m nodes on the halves.
  std::vector<double> xs, ws;
  auto add = [&](double lo, double hi) {
    for (std::size_t i = 0; i < m; ++i) {
      xs.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * g.x[i]);
      ws.push_back(0.5 * (hi - lo) * g.w[i]);
    }
  };
  for (const auto& [lo, hi] : panels) {
    add(lo, hi);
    add(lo, 0.5 * (lo + hi));
    add(0.5 * (lo + hi), hi);
  }
  // Tail [top, top + 40 unit] on panels that double in length; past it the
  // intensity is checked to be negligible instead of integrated, since the
  // kernel cannot be evaluated far out without overflow.
  const std::size_t tail_start = xs.size();
  double end = top;
  for (double len = 0.5 * unit; end < top + 40.0 * unit; len *= 2.0) {
    add(end, end + len);
    add(end, end + 0.5 * len);
    add(end + 0.5 * len, end + len);
    end += len;
  }
  std::vector<double> fx(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { fx[i] = K(t, xs[i], t, xs[i]); });
  Estimate e;
  double tail = 0.0;
  for (std::size_t p = 0; p * 3 * m < xs.size(); ++p) {
    double coarse = 0.0, fine = 0.0;
    for (std::size_t i = 0; i < m; ++i) coarse += ws[3 * m * p + i] * fx[3 * m * p + i];
    for (std::size_t i = m; i < 3 * m; ++i) fine += ws[3 * m * p + i] * fx[3 * m * p + i];
    e.value += fine;
    e.error += std::abs(fine - coarse);
    if (p * 3 * m >= tail_start) tail += std::abs(fine);
  }
  const double edge = std::abs(K(t, end, t, end));
  e.error += edge * unit;
  if (edge > 1e-8 || tail > 1e-6) {
    std::ostringstream os;
    os << "intensity past the last region is not negligible (" << tail << " beyond x = " << top << ")";
    warn(os.str());
  }
  return e;
}

}  // namespace wkl
