#pragma once

#include <vector>

namespace wkl {

struct GaussRule {
  std::vector<double> x;  // on [-1, 1]
  std::vector<double> w;
};

// Cached Gauss-Legendre rule of the given order.
const GaussRule& gauss_legendre(int order);

// Panel edges 0 = r_0 < ... < r_n = length with panel lengths growing
// geometrically by `ratio` away from 0.
std::vector<double> graded_edges(double length, int panels, double ratio);

// Gauss-Legendre nodes and weights on [lo, hi] split at the given edges.
void panel_nodes(const std::vector<double>& edges, int order, std::vector<double>& nodes,
                 std::vector<double>& weights);

}  // namespace wkl
