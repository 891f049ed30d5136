#include "wkl/scaling.hpp"

#include <cmath>

#include "wkl/errors.hpp"

namespace wkl {

ScalingMap ScalingMap::parabolic() {
  ScalingMap m;
  m.value_scale = 1.0 / std::sqrt(2.0);
  m.q2 = -1.0;
  return m;
}

ScalingMap ScalingMap::sloped(double T, double rho) {
  if (!(T > 0.0) || !(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "sloped frame needs T, rho > 0");
  ScalingMap m;
  m.time_scale = T;
  m.value_scale = 1.0 / std::sqrt(2.0 * T);
  m.q1 = 2.0 * T / rho;
  m.q2 = -T * T;
  return m;
}

ScalingMap ScalingMap::flat(double T) {
  ScalingMap m;
  m.time_shift = T;
  m.value_scale = 1.0 / std::sqrt(2.0);
  m.q2 = -1.0;
  return m;
}

ScalingMap ScalingMap::inverse() const {
  const double l = time_scale, h = time_shift, v = value_scale;
  ScalingMap m;
  m.time_scale = 1.0 / l;
  m.time_shift = -h / l;
  m.value_scale = 1.0 / v;
  m.q0 = -v * (q0 - q1 * h / l + q2 * h * h / (l * l));
  m.q1 = -v * (q1 / l - 2.0 * q2 * h / (l * l));
  m.q2 = -v * q2 / (l * l);
  return m;
}

PathEnsemble apply_scaling(const PathEnsemble& paths, const ScalingMap& map) {
  if (!(map.time_scale > 0.0) || !(map.value_scale > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "scaling map must have positive scales");
  }
  PathEnsemble out;
  out.non_intersecting = paths.non_intersecting;
  out.times.resize(paths.times.size());
  for (std::size_t j = 0; j < paths.times.size(); ++j) {
    out.times[j] = (paths.times[j] - map.time_shift) / map.time_scale;
  }
  out.curves = paths.curves;
  for (auto& c : out.curves) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double t = out.times[j];
      c[j] = map.value_scale * (c[j] + map.q0 + map.q1 * t + map.q2 * t * t);
    }
  }
  return out;
}

}  // namespace wkl
