#include "wkl/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wkl/errors.hpp"
#include "wkl/quadrature.hpp"
#include "wkl/series.hpp"

namespace wkl {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);
constexpr double kInf = std::numeric_limits<double>::infinity();

// Phi(z) = exp(c z) prod (1 + b z) / prod (1 - a z), with grouped values.
struct Symbol {
  std::vector<double> a, b;
  std::vector<double> va, vb;
  std::vector<int> ma, mb;
  double c = 0.0;

  explicit Symbol(const WandererParams& p) : a(p.a_nonzero()), b(p.b_nonzero()), c(p.c_plus()) {
    auto mult = multiplicities(p);
    va = mult.v_a;
    ma = mult.m_a;
    vb = mult.v_b;
    mb = mult.m_b;
  }

  double upper() const { return a.empty() ? kInf : 1.0 / a.front(); }
  double lower() const { return b.empty() ? -kInf : -1.0 / b.front(); }

  // log Phi with every a equal to skip_a and every b equal to skip_b removed.
  cplx log_value(cplx z, double skip_a = -1.0, double skip_b = -1.0) const {
    cplx v = c * z;
    for (double bi : b)
      if (bi != skip_b) v += std::log(1.0 + bi * z);
    for (double ai : a)
      if (ai != skip_a) v -= std::log(1.0 - ai * z);
    return v;
  }

  Series log_series(cplx z0, int terms, double skip_a, double skip_b) const {
    Series s(terms, 0.0);
    s[0] = c * z0;
    if (terms > 1) s[1] = c;
    for (double bi : b)
      if (bi != skip_b) series_add(s, series_log_linear(1.0 + bi * z0, bi, terms));
    for (double ai : a)
      if (ai != skip_a) series_add(s, series_log_linear(1.0 - ai * z0, -ai, terms), -1.0);
    return s;
  }
};

// One side of the double integral: phase P(zeta) = A(zeta) - x ell (zeta - center).
struct Side {
  std::array<double, 4> A{};
  double ell = 1.0;
  double center = 0.0;
  double angle = kPi / 3.0;

  cplx cubic(cplx z) const { return ((A[3] * z + A[2]) * z + A[1]) * z + A[0]; }
  cplx linear(cplx z) const { return ell * (z - center); }
  cplx phase(cplx z, double x) const { return cubic(z) - x * linear(z); }

  Series series(cplx z0, double x, int terms) const {
    std::vector<cplx> coef = {A[0] + x * ell * center, A[1] - x * ell, A[2], A[3]};
    return series_poly_shift(coef, z0, terms);
  }
};

Side abc_side(double tau, double angle) {
  Side s;
  // (zeta - tau)^3 / 3
  s.A = {-tau * tau * tau / 3.0, tau * tau, -tau, 1.0 / 3.0};
  s.ell = 1.0;
  s.center = tau;
  s.angle = angle;
  return s;
}

Side sloped_side(double rho, double T, double time, double angle) {
  Side s;
  const double sT = time * T;
  s.A = {-sT / (rho * rho), 2.0 * sT / rho, -sT, 1.0 / 3.0};
  s.ell = std::sqrt(2.0 * T);
  s.center = 1.0 / rho;
  s.angle = angle;
  return s;
}

struct Placement {
  double zc = 0.0;
  double wc = 0.0;
  double scale = 1.0;
  bool residues = true;
  std::vector<cplx> z_singular;
  std::vector<cplx> w_singular;
};

struct Nodes {
  DiscreteContour contour;
  double peak_log = 0.0;
  double tail_log = -kInf;
};

Nodes make_contour(double apex, double angle, const LogMagnitude& logmag, double scale,
                   const KernelNumerics& num, std::vector<cplx> singular) {
  Nodes out;
  double R;
  if (num.radius > 0.0) {
    R = num.radius * scale;
    out.peak_log = logmag(cplx(apex, 0.0));
    out.tail_log = std::log(std::max(tail_bound(cplx(apex, 0.0), angle, R, logmag), 1e-300));
  } else {
    auto choice = choose_radius(cplx(apex, 0.0), angle, logmag, scale, num.drop);
    R = choice.radius;
    out.peak_log = choice.peak_log;
    out.tail_log = choice.tail_log;
  }
  PanelSettings ps;
  ps.order = num.order;
  ps.panels = num.panels;
  ps.ratio = num.ratio;
  ps.singular = std::move(singular);
  out.contour = wedge(apex, angle, R, ps);
  return out;
}

// Rows scaled by their own maxima: value(i, p) = weight_i exp(E(i, p) - L_p).
struct Scaled {
  Eigen::MatrixXcd M;  // nodes x points
  Eigen::VectorXd L;   // per point log scale
};

template <class Fn>
Scaled scaled_values(const QuadratureRule& rule, const std::vector<double>& xs, Fn exponent) {
  const Eigen::Index n = static_cast<Eigen::Index>(rule.size());
  Scaled s;
  s.M.resize(n, static_cast<Eigen::Index>(xs.size()));
  s.L.resize(static_cast<Eigen::Index>(xs.size()));
  std::vector<cplx> e(n);
  for (std::size_t p = 0; p < xs.size(); ++p) {
    double L = -kInf;
    for (Eigen::Index i = 0; i < n; ++i) {
      e[i] = exponent(rule.nodes[i], xs[p]);
      if (std::isfinite(e[i].real())) L = std::max(L, e[i].real());
    }
    if (!std::isfinite(L)) L = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      s.M(i, p) = std::isfinite(e[i].real()) ? rule.weights[i] * std::exp(e[i] - L) : cplx(0.0);
    }
    s.L(p) = L;
  }
  return s;
}

void accumulate(Eigen::MatrixXcd& out, const Eigen::MatrixXcd& core, const Eigen::VectorXd& Lx,
                const Eigen::VectorXd& Ly, cplx factor) {
  for (Eigen::Index p = 0; p < out.rows(); ++p) {
    for (Eigen::Index q = 0; q < out.cols(); ++q) {
      const double L = Lx(p) + Ly(q);
      if (core(p, q) == cplx(0.0)) continue;
      if (L > 700.0) {
        const double mag = std::log(std::abs(core(p, q) * factor)) + L;
        if (mag > 700.0) throw Error(ErrorCode::Overflow, "kernel value overflows double range");
      }
      out(p, q) += factor * core(p, q) * std::exp(L);
    }
  }
}

struct EngineOutput {
  Eigen::MatrixXcd value;
  double tail = 0.0;
};

// pref / (2 pi i)^2 iint exp(P1(z) - P2(w)) / (z - w) Phi(z) / Phi(w), contours
// at the placement, plus the residues collected when moving there from
// contours lying between the b-zeros and the a-poles.
EngineOutput run_engine(const Side& zs, const Side& ws, double pref, const Symbol& phi,
                        const std::vector<double>& xs, const std::vector<double>& ys,
                        Placement pl, const KernelNumerics& num) {
  const double x_ref = *std::min_element(xs.begin(), xs.end());
  const double y_ref = *std::min_element(ys.begin(), ys.end());
  const double margin = num.margin * pl.scale;

  if (pl.residues) {
    if (pl.zc - pl.wc < pl.scale) {
      const double mid = 0.5 * (pl.zc + pl.wc);
      pl.zc = mid + 0.5 * pl.scale;
      pl.wc = mid - 0.5 * pl.scale;
    }
    for (bool moved = true; moved;) {
      moved = false;
      for (double v : phi.va) {
        if (std::abs(pl.zc - 1.0 / v) < 0.999 * margin) {
          pl.zc = 1.0 / v + margin;
          moved = true;
        }
      }
    }
    for (bool moved = true; moved;) {
      moved = false;
      for (double u : phi.vb) {
        if (std::abs(pl.wc + 1.0 / u) < 0.999 * margin) {
          pl.wc = -1.0 / u - margin;
          moved = true;
        }
      }
    }
  }

  std::vector<cplx> zsing = pl.z_singular, wsing = pl.w_singular;
  zsing.push_back(pl.wc);
  wsing.push_back(pl.zc);
  for (double v : phi.va) zsing.push_back(1.0 / v);
  for (double u : phi.vb) wsing.push_back(-1.0 / u);

  auto z_log = [&](cplx z, double x) { return zs.phase(z, x) + phi.log_value(z); };
  auto w_log = [&](cplx w, double y) { return -ws.phase(w, y) - phi.log_value(w); };
  Nodes zn = make_contour(pl.zc, zs.angle, [&](cplx z) { return z_log(z, x_ref).real(); }, pl.scale,
                          num, zsing);
  Nodes wn = make_contour(pl.wc, ws.angle, [&](cplx w) { return w_log(w, y_ref).real(); }, pl.scale,
                          num, wsing);
  const auto& zr = zn.contour.rule;
  const auto& wr = wn.contour.rule;

  Scaled F = scaled_values(zr, xs, z_log);
  Scaled G = scaled_values(wr, ys, w_log);
  Eigen::MatrixXcd C(static_cast<Eigen::Index>(zr.size()), static_cast<Eigen::Index>(wr.size()));
  for (Eigen::Index i = 0; i < C.rows(); ++i)
    for (Eigen::Index j = 0; j < C.cols(); ++j) C(i, j) = 1.0 / (zr.nodes[i] - wr.nodes[j]);
  Eigen::MatrixXcd core = F.M.transpose() * (C * G.M);

  EngineOutput out;
  out.value = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(xs.size()),
                                     static_cast<Eigen::Index>(ys.size()));
  const cplx two_pi_i = 2.0 * kPi * kI;
  accumulate(out.value, core, F.L, G.L, pref / (two_pi_i * two_pi_i));

  {
    // Crude truncation bound for the reference point.
    double min_dist = kInf;
    for (std::size_t i = 0; i < zr.size(); i += 4)
      for (std::size_t j = 0; j < wr.size(); j += 4)
        min_dist = std::min(min_dist, std::abs(zr.nodes[i] - wr.nodes[j]));
    const double fz = F.M.col(0).cwiseAbs().sum();
    const double gw = G.M.col(0).cwiseAbs().sum();
    const double rel = std::exp(zn.tail_log - zn.peak_log) + std::exp(wn.tail_log - wn.peak_log);
    const double L = F.L(0) + G.L(0);
    out.tail = pref / (4.0 * kPi * kPi) * fz * gw / std::max(min_dist, 1e-3) * rel *
               std::exp(std::min(L, 700.0));
    if (std::isnan(out.tail)) out.tail = 0.0;
  }

  if (!pl.residues) return out;

  // a-poles left of the z apex.
  for (std::size_t g = 0; g < phi.va.size(); ++g) {
    const double v = phi.va[g];
    const double p = 1.0 / v;
    if (!(p < pl.zc)) continue;
    const int m = phi.ma[g];
    Eigen::MatrixXcd H(m, static_cast<Eigen::Index>(xs.size()));
    Eigen::VectorXd LH(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t k = 0; k < xs.size(); ++k) {
      Series lh = zs.series(p, xs[k], m);
      series_add(lh, phi.log_series(p, m, v, -1.0));
      const double L = lh[0].real();
      lh[0] -= L;
      Series h = series_exp(lh);
      for (int j = 0; j < m; ++j) H(j, k) = h[j];
      LH(k) = L;
    }
    Scaled I = scaled_values(wr, ys, [&](cplx w, double y) {
      return -ws.phase(w, y) - phi.log_value(w, v, -1.0);
    });
    Eigen::MatrixXcd powers(m, static_cast<Eigen::Index>(wr.size()));
    for (std::size_t j = 0; j < wr.size(); ++j) {
      cplx pw = 1.0;
      for (int k = 0; k < m; ++k) {
        powers(k, j) = pw;
        pw *= (wr.nodes[j] - p);
      }
    }
    Eigen::MatrixXcd core_p = H.transpose() * (powers * I.M);
    accumulate(out.value, core_p, LH, I.L, pref / two_pi_i);
  }

  // b-zeros right of the w apex; their z contour stays left of every a-pole.
  const double z_left = std::min(pl.zc, phi.upper() - margin);
  for (std::size_t g = 0; g < phi.vb.size(); ++g) {
    const double u = phi.vb[g];
    const double q = -1.0 / u;
    if (!(q > pl.wc)) continue;
    const int m = phi.mb[g];
    auto psi_log = [&](cplx z, double x) { return zs.phase(z, x) + phi.log_value(z, -1.0, u); };
    std::vector<cplx> sing;
    for (double v : phi.va) sing.push_back(1.0 / v);
    Nodes jn = make_contour(z_left, zs.angle, [&](cplx z) { return psi_log(z, x_ref).real(); },
                            pl.scale, num, sing);
    const auto& jr = jn.contour.rule;
    Scaled J = scaled_values(jr, xs, psi_log);
    Eigen::MatrixXcd powers(m, static_cast<Eigen::Index>(jr.size()));
    for (std::size_t i = 0; i < jr.size(); ++i) {
      cplx pw = 1.0;
      for (int k = 0; k < m; ++k) {
        powers(k, i) = pw;
        pw *= (jr.nodes[i] - q);
      }
    }
    Eigen::MatrixXcd Gq(m, static_cast<Eigen::Index>(ys.size()));
    Eigen::VectorXd LG(static_cast<Eigen::Index>(ys.size()));
    for (std::size_t k = 0; k < ys.size(); ++k) {
      Series lg = ws.series(q, ys[k], m);
      for (auto& c : lg) c = -c;
      series_add(lg, phi.log_series(q, m, -1.0, u), -1.0);
      const double L = lg[0].real();
      lg[0] -= L;
      Series gser = series_exp(lg);
      for (int j = 0; j < m; ++j) Gq(j, k) = gser[j];
      LG(k) = L;
    }
    Eigen::MatrixXcd core_q = (powers * J.M).transpose() * Gq;
    accumulate(out.value, core_q, J.L, LG, pref / two_pi_i);
  }
  return out;
}

void check_finite_params(const WandererParams& p) {
  if (p.has_minus()) {
    throw Error(ErrorCode::InvalidArgument, "kernels accept only parameters without minus-sequences");
  }
}

double to_real(cplx v, const char* what) {
  if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real()))) {
    std::ostringstream os;
    os << what << ": discarded imaginary part " << v.imag() << " exceeds 1e-9";
    warn(os.str());
  }
  return v.real();
}

// Literal contours for the kernel with three terms; zeta coordinates.
EngineOutput abc_fixed(const Symbol& phi, double t1, const std::vector<double>& xs, double t2,
                       const std::vector<double>& ys, double alpha, double beta,
                       const KernelNumerics& num) {
  const double A = alpha + t1;
  const double B = beta + t2;
  for (double v : phi.va)
    if (std::abs(A - 1.0 / v) <= 1e-10 / v) throw Error(ErrorCode::PoleOnContour, "z contour apex on a pole");
  for (double u : phi.vb)
    if (std::abs(B + 1.0 / u) <= 1e-10 / u) throw Error(ErrorCode::PoleOnContour, "w contour apex on a zero");
  if (!(A < phi.upper())) {
    throw Error(ErrorCode::ContourOrderViolation, "alpha + t1 must lie left of the first pole");
  }
  if (!(B > phi.lower())) {
    throw Error(ErrorCode::ContourOrderViolation, "beta + t2 must lie right of the first zero");
  }
  if (std::abs(A - B) < 1e-12) {
    throw Error(ErrorCode::ContourOrderViolation, "contours touch at their apex");
  }
  Placement pl;
  pl.zc = A;
  pl.wc = B;
  pl.scale = 1.0;
  pl.residues = false;
  if (auto seg = intersection_segment(A, B)) {
    pl.z_singular.push_back(seg->upper);
    pl.w_singular.push_back(seg->upper);
  }
  KernelNumerics n2 = num;
  n2.margin = 0.0;
  return run_engine(abc_side(t1, kPi / 4.0), abc_side(t2, 3.0 * kPi / 4.0), 1.0, phi, xs, ys, pl,
                    n2);
}

EngineOutput abc_auto(const Symbol& phi, double t1, const std::vector<double>& xs, double t2,
                      const std::vector<double>& ys, const KernelNumerics& num) {
  const double xp = std::max(0.0, *std::min_element(xs.begin(), xs.end()));
  const double yp = std::max(0.0, *std::min_element(ys.begin(), ys.end()));
  Placement pl;
  pl.zc = t1 + std::max(std::sqrt(xp), 0.5);
  pl.wc = t2 - std::max(std::sqrt(yp), 0.5);
  pl.scale = 1.0;
  return run_engine(abc_side(t1, kPi / 3.0), abc_side(t2, 2.0 * kPi / 3.0), 1.0, phi, xs, ys, pl,
                    num);
}

EngineOutput sloped_engine(const Symbol& phi, double rho, double T, double s,
                           const std::vector<double>& xs, double t, const std::vector<double>& ys,
                           const KernelNumerics& num) {
  const double r2T = std::sqrt(2.0 * T);
  if (num.fixed_contours) {
    const double alpha = num.alpha, beta = num.beta;
    if (!(alpha < phi.upper() && alpha > beta && beta > 0.0)) {
      throw Error(ErrorCode::ContourOrderViolation, "sloped contours need 1/a_1 > alpha > beta > 0");
    }
    Placement pl;
    pl.zc = alpha;
    pl.wc = beta;
    pl.scale = 1.0;
    pl.residues = false;
    KernelNumerics n2 = num;
    n2.margin = 0.0;
    return run_engine(sloped_side(rho, T, s, kPi / 4.0), sloped_side(rho, T, t, 3.0 * kPi / 4.0),
                      r2T, phi, xs, ys, pl, n2);
  }
  const double xp = *std::min_element(xs.begin(), xs.end());
  const double yp = *std::min_element(ys.begin(), ys.end());
  Placement pl;
  pl.scale = 1.0 / r2T;
  // z apex: for large x the Gaussian point -x/s is a maximum along the wedge, so
  // move to the saddle next to the order-n pole at 1/rho instead.
  const double n = static_cast<double>(std::count(phi.a.begin(), phi.a.end(), rho));
  double uz = -xp / s;
  if (xp > 0.0) {
    const double disc = xp * xp - 4.0 * s * n;
    uz = disc > 0.0 ? (-xp + std::sqrt(disc)) / (2.0 * s) : -xp / (2.0 * s);
  }
  pl.zc = 1.0 / rho + uz * pl.scale;
  pl.wc = 1.0 / rho - (yp / t) * pl.scale;
  return run_engine(sloped_side(rho, T, s, 3.0 * kPi / 16.0),
                    sloped_side(rho, T, t, 2.0 * kPi / 3.0), r2T, phi, xs, ys, pl, num);
}

double dbm_value(double s, double x, double t, double y, int n, const KernelNumerics& num) {
  if (!(s > 0.0) || !(t > 0.0)) throw Error(ErrorCode::NonpositiveTime, "DBM kernel needs s, t > 0");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "DBM kernel needs n >= 1");
  double value = heat_gaussian(s, x, t, y);
  // Order-n residue at z = 0: Taylor coefficients of exp(-s z^2/2 - x z).
  Series f(n, 0.0);
  if (n > 1) f[1] = -x;
  if (n > 2) f[2] = -s / 2.0;
  Series c = series_exp(f);
  const double c0 = -y / t;
  const double half = std::sqrt((80.0 + 4.0 * n) / t) + 1.0;
  PanelSettings ps;
  ps.order = num.order;
  ps.panels = num.panels;
  ps.ratio = 1.0;
  auto line = vertical_line(c0, half, ps);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < line.rule.size(); ++k) {
    const cplx w = line.rule.nodes[k];
    const cplx e = std::exp(t * w * w / 2.0 + y * w);
    cplx poly = 0.0;
    for (int j = n; j-- > 0;) poly = poly * w + c[j];
    acc += line.rule.weights[k] * e * poly;
  }
  acc /= (2.0 * kPi * kI);
  return value + to_real(acc, "DBM kernel");
}

double abc_heat(double t1, double x1, double t2, double x2) {
  if (!(t2 > t1)) return 0.0;
  const double d = t2 - t1;
  return -std::exp(-(x2 - x1) * (x2 - x1) / (4.0 * d) - d * (x2 + x1) / 2.0 + d * d * d / 12.0) /
         std::sqrt(4.0 * kPi * d);
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::abc: return "abc";
    case Family::sloped: return "sloped";
    case Family::flat: return "flat";
    case Family::dbm: return "dbm";
    case Family::airy: return "airy";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "abc") return Family::abc;
  if (name == "sloped") return Family::sloped;
  if (name == "flat") return Family::flat;
  if (name == "dbm") return Family::dbm;
  if (name == "airy") return Family::airy;
  throw Error(ErrorCode::ConfigError, "unknown kernel family '" + name + "'");
}

KernelNumerics KernelNumerics::refined() const {
  KernelNumerics r = *this;
  r.panels = 2 * panels;
  r.drop = drop + 6.0;
  return r;
}

cplx SlopedPhase::operator()(cplx z, double s, double x) const {
  const double r2T = std::sqrt(2.0 * T);
  return z * z * z / 3.0 - z * z * s * T + (-x * r2T + 2.0 * s * T / rho) * z + x * r2T / rho -
         s * T / (rho * rho);
}

std::vector<double> SlopedPhase::coefficients(double s, double x) const {
  const double r2T = std::sqrt(2.0 * T);
  return {x * r2T / rho - s * T / (rho * rho), -x * r2T + 2.0 * s * T / rho, -s * T, 1.0 / 3.0};
}

ExtendedKernel ExtendedKernel::abc(const WandererParams& p, KernelNumerics num) {
  check_finite_params(p);
  ExtendedKernel k;
  k.family_ = Family::abc;
  k.params_ = p;
  k.num_ = num;
  return k;
}

ExtendedKernel ExtendedKernel::airy(KernelNumerics num) {
  ExtendedKernel k;
  k.family_ = Family::airy;
  k.num_ = num;
  return k;
}

ExtendedKernel ExtendedKernel::sloped(const WandererParams& p, double rho, double T,
                                      KernelNumerics num) {
  check_finite_params(p);
  if (!(rho > 0.0) || !(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "sloped kernel needs rho, T > 0");
  ExtendedKernel k;
  k.family_ = Family::sloped;
  k.params_ = p;
  k.rho_ = rho;
  k.T_ = T;
  k.num_ = num;
  return k;
}

ExtendedKernel ExtendedKernel::flat(const WandererParams& p, double T, KernelNumerics num) {
  check_finite_params(p);
  if (!(T >= 0.0)) throw Error(ErrorCode::InvalidArgument, "flat kernel needs T >= 0");
  ExtendedKernel k;
  k.family_ = Family::flat;
  k.params_ = p;
  k.T_ = T;
  k.num_ = num;
  return k;
}

ExtendedKernel ExtendedKernel::dbm(int n, KernelNumerics num) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "DBM kernel needs n >= 1");
  ExtendedKernel k;
  k.family_ = Family::dbm;
  k.n_ = n;
  k.num_ = num;
  return k;
}

ExtendedKernel ExtendedKernel::with_numerics(const KernelNumerics& num) const {
  ExtendedKernel k = *this;
  k.num_ = num;
  return k;
}

ExtendedKernel ExtendedKernel::gauged(GaugeFunction f, double alpha_g) const {
  if (!(alpha_g >= 0.0 && alpha_g <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "gauge exponent must lie in [0, 1]");
  }
  ExtendedKernel k = *this;
  k.gauges_.push_back({std::move(f), alpha_g});
  return k;
}

Eigen::MatrixXd ExtendedKernel::raw_block(double t1, const std::vector<double>& xs, double t2,
                                          const std::vector<double>& ys) const {
  const auto nx = static_cast<Eigen::Index>(xs.size());
  const auto ny = static_cast<Eigen::Index>(ys.size());
  Eigen::MatrixXd out(nx, ny);
  if (family_ == Family::dbm) {
    for (Eigen::Index p = 0; p < nx; ++p)
      for (Eigen::Index q = 0; q < ny; ++q) out(p, q) = dbm_value(t1, xs[p], t2, ys[q], n_, num_);
    return out;
  }
  const Symbol phi(family_ == Family::airy ? WandererParams{} : params_);
  EngineOutput eng;
  if (family_ == Family::sloped) {
    if (!(t1 > 0.0) || !(t2 > 0.0)) {
      throw Error(ErrorCode::NonpositiveTime, "sloped kernel needs s, t > 0");
    }
    eng = sloped_engine(phi, rho_, T_, t1, xs, t2, ys, num_);
    for (Eigen::Index p = 0; p < nx; ++p)
      for (Eigen::Index q = 0; q < ny; ++q)
        out(p, q) = heat_gaussian(t1, xs[p], t2, ys[q]) + to_real(eng.value(p, q), "sloped kernel");
    return out;
  }
  const double shift = family_ == Family::flat ? T_ : 0.0;
  const double tau1 = t1 + shift;
  const double tau2 = t2 + shift;
  bool k1 = false;
  double alpha = num_.alpha, beta = num_.beta;
  if (num_.fixed_contours) {
    if (family_ == Family::flat) {
      // Flat abscissas are given in the frame before the shift by T.
      if (!(alpha + t1 < phi.upper() && alpha + t1 > beta + t2 && beta + t2 > 0.0)) {
        throw Error(ErrorCode::ContourOrderViolation, "flat contours need 1/a_1 > alpha+s > beta+t > 0");
      }
      alpha -= T_;
      beta -= T_;
    }
    eng = abc_fixed(phi, tau1, xs, tau2, ys, alpha, beta, num_);
    k1 = alpha + tau1 < beta + tau2;
  } else {
    eng = abc_auto(phi, tau1, xs, tau2, ys, num_);
  }
  for (Eigen::Index p = 0; p < nx; ++p) {
    for (Eigen::Index q = 0; q < ny; ++q) {
      double v = abc_heat(tau1, xs[p], tau2, ys[q]) + to_real(eng.value(p, q), "kernel");
      if (k1) v += k1_segment({tau1, xs[p], tau2, ys[q]}, alpha, beta);
      out(p, q) = v;
    }
  }
  return out;
}

Eigen::MatrixXd ExtendedKernel::block(double t1, const std::vector<double>& xs, double t2,
                                      const std::vector<double>& ys) const {
  if (xs.empty() || ys.empty()) return Eigen::MatrixXd(xs.size(), ys.size());
  for (double v : xs)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "kernel query must be finite");
  for (double v : ys)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "kernel query must be finite");
  if (!std::isfinite(t1) || !std::isfinite(t2)) {
    throw Error(ErrorCode::InvalidArgument, "kernel query must be finite");
  }
  Eigen::MatrixXd out = raw_block(t1, xs, t2, ys);
  for (const auto& g : gauges_) {
    for (Eigen::Index p = 0; p < out.rows(); ++p) {
      const double fx = g.f(t1, xs[p]);
      if (!(fx > 0.0)) throw Error(ErrorCode::InvalidArgument, "gauge function must be positive");
      for (Eigen::Index q = 0; q < out.cols(); ++q) {
        const double fy = g.f(t2, ys[q]);
        if (!(fy > 0.0)) throw Error(ErrorCode::InvalidArgument, "gauge function must be positive");
        out(p, q) *= std::pow(fx, g.alpha) * std::pow(fy, 1.0 - g.alpha);
      }
    }
  }
  return out;
}

double ExtendedKernel::operator()(double t1, double x1, double t2, double x2) const {
  return block(t1, {x1}, t2, {x2})(0, 0);
}

double ExtendedKernel::quadrature_error(double t1, double x1, double t2, double x2) const {
  const double base = (*this)(t1, x1, t2, x2);
  const double fine = with_numerics(num_.refined())(t1, x1, t2, x2);
  double tail = 0.0;
  if (family_ != Family::dbm) {
    const Symbol phi(family_ == Family::airy ? WandererParams{} : params_);
    EngineOutput eng;
    if (family_ == Family::sloped) {
      eng = sloped_engine(phi, rho_, T_, t1, {x1}, t2, {x2}, num_);
    } else if (!num_.fixed_contours) {
      const double shift = family_ == Family::flat ? T_ : 0.0;
      eng = abc_auto(phi, t1 + shift, {x1}, t2 + shift, {x2}, num_);
    }
    tail = eng.tail;
  }
  return std::abs(fine - base) + tail;
}

std::vector<std::pair<double, double>> ExtendedKernel::mass_hints(double t) const {
  std::vector<std::pair<double, double>> hints;
  if (family_ == Family::dbm || family_ == Family::airy) return hints;
  auto mult = multiplicities(params_);
  if (family_ == Family::sloped) {
    const double r2T = std::sqrt(2.0 * T_);
    for (double v : mult.v_a) {
      const double p = 1.0 / v;
      if (p < 1.0 / rho_) hints.emplace_back(t * r2T * (1.0 / rho_ - p), std::sqrt(t));
    }
    return hints;
  }
  const double tau = t + (family_ == Family::flat ? T_ : 0.0);
  for (double v : mult.v_a) {
    const double p = 1.0 / v;
    if (p < tau) hints.emplace_back((tau - p) * (tau - p), std::sqrt(2.0 * (tau - p)));
  }
  return hints;
}

double heat_gaussian(double s, double x, double t, double y) {
  if (!(t > s)) return 0.0;
  const double d = t - s;
  return -std::exp(-(x - y) * (x - y) / (2.0 * d)) / std::sqrt(2.0 * kPi * d);
}

double k2_heat(const KernelQuery& q) { return abc_heat(q.t1, q.x1, q.t2, q.x2); }

double k1_segment(const KernelQuery& q, double alpha, double beta, int panels, int order) {
  auto seg = intersection_segment(alpha + q.t1, beta + q.t2);
  if (!seg) return 0.0;
  auto path = vertical_segment(seg->lower, seg->upper, panels, order);
  const double t1 = q.t1, t2 = q.t2, x1 = q.x1, x2 = q.x2;
  cplx acc = 0.0;
  for (std::size_t k = 0; k < path.rule.size(); ++k) {
    const cplx w = path.rule.nodes[k];
    const cplx e = (t2 - t1) * w * w + (t1 * t1 - t2 * t2) * w + w * (x2 - x1) + x1 * t1 - x2 * t2 -
                   t1 * t1 * t1 / 3.0 + t2 * t2 * t2 / 3.0;
    acc += path.rule.weights[k] * std::exp(e);
  }
  acc /= (2.0 * kPi * kI);
  return to_real(acc, "K1 segment");
}

double k3_double(const KernelQuery& q, double alpha, double beta, const WandererParams& p,
                 KernelNumerics num) {
  check_finite_params(p);
  const Symbol phi(p);
  auto eng = abc_fixed(phi, q.t1, {q.x1}, q.t2, {q.x2}, alpha, beta, num);
  return to_real(eng.value(0, 0), "K3 double integral");
}

double kernel_abc(const KernelQuery& q, const ExtendedKernel& k) { return k(q); }

double kernel_sloped(const KernelQuery& q, double rho, double T, const WandererParams& p,
                     KernelNumerics num) {
  return ExtendedKernel::sloped(p, rho, T, num)(q);
}

double kernel_flat(const KernelQuery& q, double T, const WandererParams& p, KernelNumerics num) {
  return ExtendedKernel::flat(p, T, num)(q);
}

double kernel_dbm(const KernelQuery& q, int n, KernelNumerics num) {
  return dbm_value(q.t1, q.x1, q.t2, q.x2, n, num);
}

ExtendedKernel gauge_transform(const ExtendedKernel& k, GaugeFunction f, double alpha_g) {
  return k.gauged(std::move(f), alpha_g);
}

double minor_determinant(const ExtendedKernel& k, const std::vector<SpacePoint>& points) {
  if (points.empty()) return 1.0;
  if (points.size() > 8) throw Error(ErrorCode::InvalidArgument, "minor_determinant takes at most 8 points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      M(i, j) = k(points[i].t, points[i].x, points[j].t, points[j].x);
  return M.determinant();
}

}  // namespace wkl
