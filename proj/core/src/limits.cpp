#include "wkl/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wkl/errors.hpp"
#include "wkl/fredholm.hpp"
#include "wkl/parallel.hpp"

namespace wkl {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kTwoPiI(0.0, 2.0 * kPi);

struct Discretized {
  std::vector<cplx> nodes;
  std::vector<cplx> weights;
  std::vector<cplx> logs;  // log of the integrand factor at each node
  double peak = 0.0;
};

struct WedgeSpec {
  double apex = 0.0;
  double angle = 0.0;
  double scale = 1.0;
  std::vector<cplx> singular;
};

// Wedge truncated where exp(Re logf) has dropped `drop` nats below its peak.
Discretized discretize_wedge(const WedgeSpec& ws, const std::function<cplx(cplx)>& logf,
                             int panels, double drop) {
  const auto rc = choose_radius(cplx(ws.apex, 0.0), ws.angle,
                                [&](cplx z) { return logf(z).real(); }, ws.scale, drop);
  PanelSettings set;
  set.panels = panels;
  set.singular = ws.singular;
  const auto dc = wedge(ws.apex, ws.angle, rc.radius, set);
  Discretized d;
  d.nodes = dc.rule.nodes;
  d.weights = dc.rule.weights;
  d.logs.reserve(d.nodes.size());
  d.peak = -std::numeric_limits<double>::infinity();
  for (cplx z : d.nodes) {
    d.logs.push_back(logf(z));
    d.peak = std::max(d.peak, d.logs.back().real());
  }
  return d;
}

// (1/(2 pi i)^2) sum F(z) G(w) / (z - w)^2, with F = exp(logF) etc.
// Returns the value divided by exp(peakF + peakG) and the log scale.
std::pair<cplx, double> double_sum(const Discretized& z, const Discretized& w) {
  std::vector<cplx> f(z.nodes.size()), g(w.nodes.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(z.logs[i] - z.peak) * z.weights[i];
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = std::exp(w.logs[j] - w.peak) * w.weights[j];
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    cplx row = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const cplx d = z.nodes[i] - w.nodes[j];
      row += g[j] / (d * d);
    }
    s += f[i] * row;
  }
  return {s / (kTwoPiI * kTwoPiI), z.peak + w.peak};
}

double scaled_real(std::pair<cplx, double> v) {
  return v.first.real() * std::exp(v.second);
}

std::pair<cplx, double> single_sum(const Discretized& w) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < w.nodes.size(); ++j) s += std::exp(w.logs[j] - w.peak) * w.weights[j];
  return {s / kTwoPiI, w.peak};
}

// Simple-pole regime of the sloped statements.
void check_simple_poles(const WandererParams& p, int k, const Multiplicities& m) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (static_cast<int>(m.v_a.size()) < k) {
    std::ostringstream os;
    os << "|V_a| = " << m.v_a.size() << " < k = " << k;
    throw Error(ErrorCode::AssumptionViolated, os.str());
  }
  for (int i = 0; i + 1 < k; ++i) {
    if (m.m_a[i] != 1) {
      std::ostringstream os;
      os << "multiplicity m_" << i + 1 << " = " << m.m_a[i] << " is not 1";
      throw Error(ErrorCode::AssumptionViolated, os.str());
    }
  }
  (void)p;
}

void check_distinct(const WandererParams& p) {
  const auto m = multiplicities(p);
  for (int mult : m.m_a) {
    if (mult != 1) throw Error(ErrorCode::AssumptionViolated, "a-values must be distinct");
  }
}

bool strictly_decreasing(const std::vector<double>& e) {
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!(e[i] < e[i - 1]) && e[i] > 1e-14) return false;
  }
  return true;
}

void check_T_list(const std::vector<double>& T) {
  if (T.empty()) throw Error(ErrorCode::EmptyData, "empty T list");
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (!(T[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "T values must be positive");
    if (i > 0 && !(T[i] > T[i - 1])) throw Error(ErrorCode::InvalidArgument, "T values must increase");
  }
}

SweepReport run_sweep(std::string kind, const std::vector<double>& T_list,
                      const std::vector<KernelQuery>& points,
                      const std::function<ExtendedKernel(double, const KernelNumerics&)>& approx,
                      const std::function<ExtendedKernel(const KernelNumerics&)>& limit, bool probe) {
  check_T_list(T_list);
  if (points.empty()) throw Error(ErrorCode::EmptyData, "empty point set");
  SweepReport r;
  r.kind = std::move(kind);
  r.T = T_list;
  r.probe = probe;
  const std::size_t nT = T_list.size(), nP = points.size();
  std::vector<double> err(nT * nP), quad(nT * nP), ref(nT * nP);
  const KernelNumerics base{};
  const KernelNumerics fine = base.refined();
  const ExtendedKernel L = limit(base), Lf = limit(fine);
  parallel_for(nT * nP, [&](std::size_t idx) {
    const std::size_t i = idx / nP, q = idx % nP;
    const auto& pt = points[q];
    const ExtendedKernel K = approx(T_list[i], base);
    const ExtendedKernel Kf = approx(T_list[i], fine);
    const double lim = L(pt);
    err[idx] = std::abs(K(pt) - lim);
    ref[idx] = std::abs(Kf(pt) - Lf(pt));
    quad[idx] = std::max(K.quadrature_error(pt.t1, pt.x1, pt.t2, pt.x2),
                         L.quadrature_error(pt.t1, pt.x1, pt.t2, pt.x2));
  });
  for (std::size_t i = 0; i < nT; ++i) {
    double e = 0.0, q = 0.0, f = 0.0;
    for (std::size_t j = 0; j < nP; ++j) {
      e = std::max(e, err[i * nP + j]);
      q = std::max(q, quad[i * nP + j]);
      f = std::max(f, ref[i * nP + j]);
    }
    r.errors.push_back(e);
    r.quad_errors.push_back(q);
    r.refined_errors.push_back(f);
  }
  r.decreasing = strictly_decreasing(r.errors);
  r.tolerance = sweep_tolerance(r.quad_errors.back());
  r.terminal_ok = r.errors.back() < r.tolerance;
  r.resolution_stable = true;
  for (std::size_t i = 0; i < nT; ++i) {
    if (std::abs(r.refined_errors[i] - r.errors[i]) > 0.1 * r.errors[i] + 1e-14) r.resolution_stable = false;
  }
  r.pass = !probe && r.decreasing && r.terminal_ok;
  if (probe) r.note = "probe mode: hypotheses fail, nothing asserted";
  return r;
}

}  // namespace

double sweep_tolerance(double quadrature_error) { return std::max(1e-3, 10.0 * quadrature_error); }

SweepReport sweep_kernel_dbm(const WandererParams& p, int k, const std::vector<KernelQuery>& points,
                             const std::vector<double>& T_list, bool probe) {
  const auto m = multiplicities(p);
  if (k < 1 || static_cast<int>(m.v_a.size()) < k) {
    throw Error(ErrorCode::AssumptionViolated, "need |V_a| >= k");
  }
  bool violated = false;
  try {
    check_simple_poles(p, k, m);
  } catch (const Error& e) {
    if (!probe) throw;
    warn(std::string("sweep_kernel_dbm probe: ") + e.what());
    violated = true;
  }
  const double rho = m.v_a[k - 1];
  const int n = m.m_a[k - 1];
  return run_sweep(
      "sweep-dbm", T_list, points,
      [&](double T, const KernelNumerics& num) { return ExtendedKernel::sloped(p, rho, T, num); },
      [&](const KernelNumerics& num) { return ExtendedKernel::dbm(n, num); }, violated);
}

SweepReport sweep_kernel_flat(const WandererParams& p, const std::vector<KernelQuery>& points,
                              const std::vector<double>& T_list, bool probe) {
  bool violated = false;
  try {
    if (!p.is_pos()) throw Error(ErrorCode::AssumptionViolated, "parameters must be in the positive class");
    check_distinct(p);
  } catch (const Error& e) {
    if (!probe) throw;
    warn(std::string("sweep_kernel_flat probe: ") + e.what());
    violated = true;
  }
  return run_sweep(
      "sweep-flat", T_list, points,
      [&](double T, const KernelNumerics& num) { return ExtendedKernel::flat(p, T, num); },
      [&](const KernelNumerics& num) { return ExtendedKernel::airy(num); }, violated);
}

double residue_prefactor(const WandererParams& p, int j) {
  const auto a = p.a_nonzero();
  if (j < 1 || j > static_cast<int>(a.size())) throw Error(ErrorCode::InvalidArgument, "residue index out of range");
  const double aj = a[j - 1];
  double num = 1.0, den = aj;
  for (double b : p.b_nonzero()) num *= 1.0 + b / aj;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (static_cast<int>(i) != j - 1) den *= 1.0 - a[i] / aj;
  }
  return num / den;
}

namespace {

struct SlopedSetup {
  double rho, T, r2T, vT, uT;
  SlopedPhase H;
};

SlopedSetup sloped_setup(const WandererParams& p, int k, double T) {
  const auto m = multiplicities(p);
  check_simple_poles(p, k, m);
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "T must be positive");
  SlopedSetup s;
  s.rho = m.v_a[k - 1];
  s.T = T;
  s.r2T = std::sqrt(2.0 * T);
  s.vT = 1.0 / s.rho - 1.0 / s.r2T;
  s.uT = 1.0 / s.rho - 2.0 / s.r2T;
  s.H = SlopedPhase{s.rho, T};
  // Deformed contours must sit right of the crossed poles.
  for (int i = 0; i + 1 < k; ++i) {
    if (!(s.uT > 1.0 / m.v_a[i])) {
      throw Error(ErrorCode::ContourOrderViolation, "T too small: u_T is left of a crossed pole");
    }
  }
  for (double b : p.b_nonzero()) {
    if (!(s.uT > -1.0 / b)) throw Error(ErrorCode::ContourOrderViolation, "u_T left of a zero of Phi");
  }
  return s;
}

// U_j with the given power of (1/a_j - w) in the denominator.
double sloped_U(const WandererParams& p, const SlopedSetup& st, int j, double s, double x, double t,
                double y, int power, int panels, double drop) {
  const double pj = 1.0 / p.a_nonzero()[j - 1];
  const double hz = st.H(cplx(pj, 0.0), s, x).real();
  auto logf = [&](cplx w) {
    return -st.H(w, t, y) - log_phi(w, p) - static_cast<double>(power) * std::log(cplx(pj, 0.0) - w);
  };
  WedgeSpec ws{st.uT, 2.0 * kPi / 3.0, 1.0 / st.r2T, {cplx(pj, 0.0)}};
  const auto d = discretize_wedge(ws, logf, panels, drop);
  auto v = single_sum(d);
  v.second += hz + std::log(st.r2T);
  return scaled_real(v) * residue_prefactor(p, j);
}

double sloped_V(const WandererParams& p, const SlopedSetup& st, double t, double A, int panels,
                double drop) {
  auto lz = [&](cplx z) { return st.H(z, t, A) + log_phi(z, p); };
  auto lw = [&](cplx w) { return -st.H(w, t, A) - log_phi(w, p); };
  const double sc = 1.0 / st.r2T;
  const auto dz = discretize_wedge({st.vT, 3.0 * kPi / 16.0, sc, {cplx(st.uT, 0.0)}}, lz, panels, drop);
  const auto dw = discretize_wedge({st.uT, 2.0 * kPi / 3.0, sc, {cplx(st.vT, 0.0)}}, lw, panels, drop);
  return scaled_real(double_sum(dz, dw));
}

struct FlatSetup {
  double tau, alpha, beta;
};

FlatSetup flat_setup(const WandererParams& p, double t, double A, double T) {
  if (!p.is_pos()) throw Error(ErrorCode::AssumptionViolated, "parameters must be in the positive class");
  check_distinct(p);
  FlatSetup f;
  f.tau = T + t;
  const double s = std::max(std::sqrt(std::max(A, 0.0)), 0.5);
  f.alpha = s;
  f.beta = -s;
  for (double a : p.a_nonzero()) {
    if (!(1.0 / a - f.tau < f.beta - 0.25)) {
      throw Error(ErrorCode::ContourOrderViolation, "T too small: a pole is not left of the contours");
    }
  }
  for (double b : p.b_nonzero()) {
    if (!(-1.0 / b - f.tau < f.beta - 0.25)) {
      throw Error(ErrorCode::ContourOrderViolation, "T too small: a zero is not left of the contours");
    }
  }
  return f;
}

double flat_V(const WandererParams& p, const FlatSetup& f, double A, int panels, double drop) {
  auto lz = [&](cplx z) { return z * z * z / 3.0 - z * A + log_phi(z + f.tau, p); };
  auto lw = [&](cplx w) { return -w * w * w / 3.0 + w * A - log_phi(w + f.tau, p); };
  const auto dz = discretize_wedge({f.alpha, kPi / 3.0, 1.0, {cplx(f.beta, 0.0)}}, lz, panels, drop);
  const auto dw = discretize_wedge({f.beta, 2.0 * kPi / 3.0, 1.0, {cplx(f.alpha, 0.0)}}, lw, panels, drop);
  return scaled_real(double_sum(dz, dw));
}

double flat_U(const WandererParams& p, const FlatSetup& f, int j, double A, int panels, double drop) {
  const double q = 1.0 / p.a_nonzero()[j - 1] - f.tau;
  const double hz = q * q * q / 3.0 - A * q;
  auto lw = [&](cplx w) {
    return -w * w * w / 3.0 + A * w - 2.0 * std::log(cplx(q, 0.0) - w) - log_phi(w + f.tau, p);
  };
  const auto d = discretize_wedge({f.beta, 2.0 * kPi / 3.0, 1.0, {cplx(q, 0.0)}}, lw, panels, drop);
  auto v = single_sum(d);
  v.second += hz;
  return scaled_real(v) * residue_prefactor(p, j);
}

constexpr int kPanels = 8;
constexpr double kDrop = 38.0;

}  // namespace

ResidueTable residue_decay(const WandererParams& p, int k, int j, double s, double x,
                           const std::vector<double>& T_list) {
  if (j < 1) throw Error(ErrorCode::InvalidArgument, "j must be at least 1");
  if (j >= k) throw Error(ErrorCode::InvalidArgument, "j must be < k: no residue is crossed");
  if (!(s > 0.0)) throw Error(ErrorCode::NonpositiveTime, "s must be positive");
  check_T_list(T_list);
  ResidueTable tab;
  tab.k = k;
  tab.j = j;
  tab.prefactor = residue_prefactor(p, j);
  for (double T : T_list) {
    const auto st = sloped_setup(p, k, T);
    ResidueRow row;
    row.T = T;
    row.value = sloped_U(p, st, j, s, x, s, x, 1, kPanels, kDrop);
    row.log_abs = std::log(std::abs(row.value));
    tab.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < tab.rows.size(); ++i) {
    tab.ratios.push_back(std::exp(tab.rows[i].log_abs - tab.rows[i + 1].log_abs));
  }
  if (tab.rows.size() >= 2) {
    double mt = 0.0, ml = 0.0;
    for (const auto& r : tab.rows) {
      mt += r.T;
      ml += r.log_abs;
    }
    mt /= tab.rows.size();
    ml /= tab.rows.size();
    double num = 0.0, den = 0.0;
    for (const auto& r : tab.rows) {
      num += (r.T - mt) * (r.log_abs - ml);
      den += (r.T - mt) * (r.T - mt);
    }
    tab.slope = num / den;
    tab.decaying = tab.slope < 0.0;
  }
  return tab;
}

TailIdentity tail_count_identity(const WandererParams& p, int k, double t, double A, double T) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonpositiveTime, "t must be positive");
  const auto st = sloped_setup(p, k, T);
  TailIdentity r;
  r.base = k - 1;
  auto rhs_at = [&](int panels, double drop, std::vector<double>* U, double* V) {
    double v = sloped_V(p, st, t, A, panels, drop);
    double total = r.base + v;
    if (U) U->clear();
    for (int j = 1; j < k; ++j) {
      const double u = sloped_U(p, st, j, t, A, t, A, 2, panels, drop);
      if (U) U->push_back(u);
      total += u;
    }
    if (V) *V = v;
    return total;
  };
  r.rhs = rhs_at(kPanels, kDrop, &r.U, &r.V);
  r.quad_error = std::abs(rhs_at(2 * kPanels, kDrop + 6.0, nullptr, nullptr) - r.rhs);
  const auto lhs = expected_count_above(ExtendedKernel::sloped(p, st.rho, T), t, A);
  r.lhs = lhs.value;
  r.lhs_error = lhs.error;
  r.gap = std::abs(r.lhs - r.rhs);
  r.rel_gap = r.gap / std::max(std::abs(r.lhs), std::numeric_limits<double>::min());
  return r;
}

TailIdentity flat_tail_count_identity(const WandererParams& p, double t, double A, double T) {
  const auto f = flat_setup(p, t, A, T);
  TailIdentity r;
  r.base = p.J_a();
  auto rhs_at = [&](int panels, double drop, std::vector<double>* U, double* V) {
    const double v = flat_V(p, f, A, panels, drop);
    double total = r.base + v;
    if (U) U->clear();
    for (int j = 1; j <= p.J_a(); ++j) {
      const double u = flat_U(p, f, j, A, panels, drop);
      if (U) U->push_back(u);
      total += u;
    }
    if (V) *V = v;
    return total;
  };
  r.rhs = rhs_at(kPanels, kDrop, &r.U, &r.V);
  r.quad_error = std::abs(rhs_at(2 * kPanels, kDrop + 6.0, nullptr, nullptr) - r.rhs);
  const auto lhs = expected_count_above(ExtendedKernel::flat(p, T), t, A);
  r.lhs = lhs.value;
  r.lhs_error = lhs.error;
  r.gap = std::abs(r.lhs - r.rhs);
  r.rel_gap = r.gap / std::max(std::abs(r.lhs), std::numeric_limits<double>::min());
  return r;
}

namespace {

double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// Literal contours that stay apart for every pair of times, if any exist.
bool literal_abscissas(const WandererParams& p, double tmin, double tmax, double& alpha, double& beta) {
  const auto a = p.a_nonzero();
  const auto b = p.b_nonzero();
  const double pole = a.empty() ? std::numeric_limits<double>::infinity() : 1.0 / a.front();
  const double zero = b.empty() ? -std::numeric_limits<double>::infinity() : -1.0 / b.front();
  alpha = std::min(pole - tmax - 0.25, 1.0 - tmin);
  beta = alpha + tmin - tmax - 0.6;
  if (!(beta + tmin > zero + 0.25)) return false;
  return alpha + tmax < pole;
}

}  // namespace

SymmetryReport symmetry_suite(const WandererParams& p,
                              const std::vector<std::vector<SpacePoint>>& point_sets, double shift) {
  if (point_sets.empty()) throw Error(ErrorCode::EmptyData, "no point sets");
  const ExtendedKernel K = ExtendedKernel::abc(p);
  const ExtendedKernel Kr = ExtendedKernel::abc(p.swapped());
  const ExtendedKernel Kc = ExtendedKernel::abc(p.with_c_plus(p.c_plus() + shift));
  const GaugeFunction f = [](double t, double x) { return std::exp(0.4 * x - 0.3 * t + 0.1 * t * x); };
  const GaugeFunction g = [](double t, double x) { return std::exp(0.7 * x + 0.2 * t); };
  SymmetryReport rep;
  rep.cases.resize(point_sets.size());
  parallel_for(point_sets.size(), [&](std::size_t c) {
    const auto& pts = point_sets[c];
    SymmetryCase sc;
    sc.points = pts;
    const double base = minor_determinant(K, pts);
    std::vector<SpacePoint> neg = pts;
    for (auto& q : neg) q.t = -q.t;
    sc.reflection = rel_diff(minor_determinant(K, neg), minor_determinant(Kr, pts));

    for (const auto& q : pts) {
      sc.translation = std::max(sc.translation, rel_diff(intensity(Kc, q.t, q.x + shift), intensity(K, q.t, q.x)));
    }

    double prod = 1.0;
    for (const auto& q : pts) prod *= f(q.t, q.x);
    for (double ag : {0.0, 0.5, 1.0}) {
      sc.gauge = std::max(sc.gauge, rel_diff(minor_determinant(K.gauged(f, ag), pts), prod * base));
    }
    // g(x)/g(y) as two stacked gauges with exponents 1 and 0 of g and 1/g.
    const ExtendedKernel conj =
        K.gauged(g, 1.0).gauged([&](double t, double x) { return 1.0 / g(t, x); }, 0.0);
    sc.conjugation = rel_diff(minor_determinant(conj, pts), base);

    double tmin = pts.front().t, tmax = pts.front().t;
    for (const auto& q : pts) {
      tmin = std::min(tmin, q.t);
      tmax = std::max(tmax, q.t);
    }
    double alpha = 0.0, beta = 0.0;
    if (literal_abscissas(p, tmin, tmax, alpha, beta)) {
      KernelNumerics num;
      num.fixed_contours = true;
      num.alpha = alpha;
      num.beta = beta;
      sc.contour = rel_diff(minor_determinant(K.with_numerics(num), pts), base);
    }
    rep.cases[c] = sc;
  });
  for (const auto& sc : rep.cases) {
    rep.max_reflection = std::max(rep.max_reflection, sc.reflection);
    rep.max_translation = std::max(rep.max_translation, sc.translation);
    rep.max_gauge = std::max({rep.max_gauge, sc.gauge, sc.conjugation});
    rep.max_contour = std::max(rep.max_contour, sc.contour);
  }
  rep.pass = rep.max_reflection < kReflectionTol && rep.max_translation < kReflectionTol &&
             rep.max_gauge < kGaugeTol && rep.max_contour < kContourTol;
  return rep;
}

}  // namespace wkl
