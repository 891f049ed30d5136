#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wkl/contours.hpp"
#include "wkl/params.hpp"

namespace wkl {

struct KernelQuery {
  double t1 = 0.0;
  double x1 = 0.0;
  double t2 = 0.0;
  double x2 = 0.0;
};

enum class Family { abc, sloped, flat, dbm, airy };

const char* family_name(Family f);
Family parse_family(const std::string& name);

struct KernelNumerics {
  int order = 16;
  int panels = 8;
  double ratio = 1.5;
  double drop = 38.0;     // truncation depth in nats below the peak
  double radius = 0.0;    // > 0 overrides the adaptive truncation radius
  double margin = 0.3;    // pole clearance, in units of the family's length scale
  // Literal contours at the user's abscissas instead of saddle placement.
  bool fixed_contours = false;
  double alpha = 0.0;
  double beta = 0.0;

  KernelNumerics refined() const;
};

// Cubic phase P(zeta) = A(zeta) - x * ell * (zeta - center).
struct SlopedPhase {
  double rho = 1.0;
  double T = 1.0;
  // H(z, s, x) = z^3/3 - z^2 sT + (-x sqrt(2T) + 2sT/rho) z + x sqrt(2T)/rho - sT/rho^2
  cplx operator()(cplx z, double s, double x) const;
  std::vector<double> coefficients(double s, double x) const;  // constant term first
};

using GaugeFunction = std::function<double(double t, double x)>;

class ExtendedKernel {
 public:
  static ExtendedKernel abc(const WandererParams& p, KernelNumerics num = {});
  static ExtendedKernel airy(KernelNumerics num = {});
  static ExtendedKernel sloped(const WandererParams& p, double rho, double T,
                               KernelNumerics num = {});
  static ExtendedKernel flat(const WandererParams& p, double T, KernelNumerics num = {});
  static ExtendedKernel dbm(int n, KernelNumerics num = {});

  Family family() const { return family_; }
  const WandererParams& params() const { return params_; }
  const KernelNumerics& numerics() const { return num_; }
  double rho() const { return rho_; }
  double T() const { return T_; }
  int n() const { return n_; }

  ExtendedKernel with_numerics(const KernelNumerics& num) const;

  double operator()(double t1, double x1, double t2, double x2) const;
  double operator()(const KernelQuery& q) const { return (*this)(q.t1, q.x1, q.t2, q.x2); }

  // K(t1, xs[i]; t2, ys[j]) for all pairs, sharing contours across the block.
  Eigen::MatrixXd block(double t1, const std::vector<double>& xs, double t2,
                        const std::vector<double>& ys) const;

  // |K - K at refined quadrature| plus the truncation bound.
  double quadrature_error(double t1, double x1, double t2, double x2) const;

  // Places, in kernel coordinates, where the one-time intensity at time t
  // concentrates besides the edge: (center, width) pairs.
  std::vector<std::pair<double, double>> mass_hints(double t) const;

  ExtendedKernel gauged(GaugeFunction f, double alpha_g) const;
  bool has_gauge() const { return !gauges_.empty(); }

 private:
  struct Gauge {
    GaugeFunction f;
    double alpha;
  };

  Eigen::MatrixXd raw_block(double t1, const std::vector<double>& xs, double t2,
                            const std::vector<double>& ys) const;

  Family family_ = Family::airy;
  WandererParams params_;
  KernelNumerics num_;
  double rho_ = 1.0;
  double T_ = 0.0;
  int n_ = 1;
  std::vector<Gauge> gauges_;
};

// Individual pieces of the kernel with three terms.
double k2_heat(const KernelQuery& q);
double k1_segment(const KernelQuery& q, double alpha, double beta, int panels = 8,
                  int order = 16);
// Literal double integral over Gamma^+_alpha x Gamma^-_beta.
double k3_double(const KernelQuery& q, double alpha, double beta, const WandererParams& p,
                 KernelNumerics num = {});
double kernel_abc(const KernelQuery& q, const ExtendedKernel& k);
double kernel_sloped(const KernelQuery& q, double rho, double T, const WandererParams& p,
                     KernelNumerics num = {});
double kernel_flat(const KernelQuery& q, double T, const WandererParams& p,
                   KernelNumerics num = {});
double kernel_dbm(const KernelQuery& q, int n, KernelNumerics num = {});
double heat_gaussian(double s, double x, double t, double y);

ExtendedKernel gauge_transform(const ExtendedKernel& k, GaugeFunction f, double alpha_g);

struct SpacePoint {
  double t;
  double x;
};

// det[K(p_i; p_j)], at most 8 points.
double minor_determinant(const ExtendedKernel& k, const std::vector<SpacePoint>& points);

}  // namespace wkl
