#pragma once

#include <string>
#include <vector>

#include "wkl/kernels.hpp"

namespace wkl {

// max(1e-3, 10 x quadrature estimate)
double sweep_tolerance(double quadrature_error);

struct SweepReport {
  std::string kind;
  std::vector<double> T;
  std::vector<double> errors;          // sup over the point set
  std::vector<double> quad_errors;     // quadrature estimate at each T
  std::vector<double> refined_errors;  // errors at doubled resolution
  bool decreasing = false;
  double tolerance = 0.0;
  bool terminal_ok = false;
  bool resolution_stable = false;  // refined errors within 10%
  bool probe = false;              // hypotheses fail; nothing asserted
  bool pass = false;
  std::string note;
};

// Sloped kernel with rho = v_k against the DBM kernel with n = m_k.
SweepReport sweep_kernel_dbm(const WandererParams& p, int k, const std::vector<KernelQuery>& points,
                             const std::vector<double>& T_list, bool probe = false);
// Flat kernel against the Airy kernel.
SweepReport sweep_kernel_flat(const WandererParams& p, const std::vector<KernelQuery>& points,
                              const std::vector<double>& T_list, bool probe = false);

// prod_i (1 + b_i/a_j) / (a_j prod_{i != j} (1 - a_i/a_j)), j is 1-based.
double residue_prefactor(const WandererParams& p, int j);

struct ResidueRow {
  double T = 0.0;
  double value = 0.0;
  double log_abs = 0.0;
};

struct ResidueTable {
  int k = 0;
  int j = 0;
  double prefactor = 0.0;
  std::vector<ResidueRow> rows;
  std::vector<double> ratios;  // |U(T_i)| / |U(T_{i+1})|
  double slope = 0.0;          // least-squares slope of log|U| against T
  bool decaying = false;
};

// |U_j^T| at (s, x; s, x) over the wedge of angle 2 pi / 3 at u_T.
ResidueTable residue_decay(const WandererParams& p, int k, int j, double s, double x,
                           const std::vector<double>& T_list);

struct TailIdentity {
  double lhs = 0.0;
  double lhs_error = 0.0;
  double rhs = 0.0;
  double base = 0.0;  // k - 1 or J_a
  double V = 0.0;
  std::vector<double> U;
  double quad_error = 0.0;  // change of the right side under refinement
  double gap = 0.0;
  double rel_gap = 0.0;
};

TailIdentity tail_count_identity(const WandererParams& p, int k, double t, double A, double T);
TailIdentity flat_tail_count_identity(const WandererParams& p, double t, double A, double T);

struct SymmetryCase {
  std::vector<SpacePoint> points;
  double reflection = 0.0;   // relative difference of the minors
  double translation = 0.0;  // max relative difference of shifted intensities
  double gauge = 0.0;        // gauged minors against prod f(x_i) det K, all alpha
  double conjugation = 0.0;  // g(x)/g(y) conjugation against det K
  double contour = -1.0;     // literal against saddle contours; -1 if not checked
};

struct SymmetryReport {
  std::vector<SymmetryCase> cases;
  double max_reflection = 0.0;
  double max_translation = 0.0;
  double max_gauge = 0.0;
  double max_contour = 0.0;
  bool pass = false;
};

constexpr double kReflectionTol = 1e-7;
constexpr double kGaugeTol = 1e-10;
constexpr double kContourTol = 1e-8;

SymmetryReport symmetry_suite(const WandererParams& p,
                              const std::vector<std::vector<SpacePoint>>& point_sets,
                              double shift = 0.7);

}  // namespace wkl
