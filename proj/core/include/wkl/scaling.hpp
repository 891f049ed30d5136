#pragma once

#include "wkl/stochastic.hpp"

namespace wkl {

// out(t) = value_scale * (L(time_scale * t + time_shift) + q0 + q1 t + q2 t^2)
struct ScalingMap {
  double time_scale = 1.0;
  double time_shift = 0.0;
  double value_scale = 1.0;
  double q0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;

  static ScalingMap identity() { return {}; }
  // sqrt(2) L + t^2 = A
  static ScalingMap parabolic();
  // (2T)^{-1/2} (A(tT) + 2tT/rho - t^2 T^2)
  static ScalingMap sloped(double T, double rho);
  // 2^{-1/2} (A(t + T) - t^2)
  static ScalingMap flat(double T);

  ScalingMap inverse() const;
};

PathEnsemble apply_scaling(const PathEnsemble& paths, const ScalingMap& map);

}  // namespace wkl
