#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wkl/kernels.hpp"

namespace wkl {

// Union over j of {times[j]} x (thresholds[j], inf). A threshold of -inf
// means the whole line; +inf means an empty slice.
struct GapDomain {
  std::vector<double> times;
  std::vector<double> thresholds;
};

struct NystromSystem {
  std::vector<double> times;
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> weights;
  Eigen::MatrixXd M;
};

constexpr int kDefaultNodes = 40;

NystromSystem discretize(const ExtendedKernel& K, const GapDomain& D, int n_nodes = kDefaultNodes);
double fredholm_det(const NystromSystem& sys);

struct Estimate {
  double value = 0.0;
  double error = 0.0;  // change under refinement
};

// det(I - K) on D; the error is the change under node doubling.
Estimate gap_probability_estimate(const ExtendedKernel& K, const GapDomain& D,
                                  int n_nodes = kDefaultNodes);
double gap_probability(const ExtendedKernel& K, const GapDomain& D, int n_nodes = kDefaultNodes);

double intensity(const ExtendedKernel& K, double t, double x);

double tw2_cdf(double A, int n_nodes = kDefaultNodes);
double bbp_cdf(const WandererParams& p, double t, double A, int n_nodes = kDefaultNodes);

// Integral of the intensity over (A, inf) at time t.
Estimate expected_count_above(const ExtendedKernel& K, double t, double A);

}  // namespace wkl
