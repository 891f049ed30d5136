#include "wkl/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <mutex>

#include "wkl/errors.hpp"

namespace wkl {

const GaussRule& gauss_legendre(int order) {
  static std::mutex guard;
  static std::map<int, GaussRule> cache;
  if (order < 1) throw Error(ErrorCode::BadResolution, "quadrature order must be positive");
  std::lock_guard<std::mutex> lock(guard);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  // Boost returns the nonnegative zeros in increasing order.
  auto zeros = boost::math::legendre_p_zeros<double>(order);
  auto weight = [order](double x) {
    double dp = boost::math::legendre_p_prime<double>(order, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto r = zeros.rbegin(); r != zeros.rend(); ++r) {
    if (*r == 0.0) continue;
    rule.x.push_back(-*r);
    rule.w.push_back(weight(*r));
  }
  for (double z : zeros) {
    rule.x.push_back(z);
    rule.w.push_back(weight(z));
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

std::vector<double> graded_edges(double length, int panels, double ratio) {
  if (panels < 1) throw Error(ErrorCode::BadResolution, "panel count must be at least 1");
  std::vector<double> edges(panels + 1, 0.0);
  double total = 0.0;
  double len = 1.0;
  for (int k = 0; k < panels; ++k) {
    total += len;
    len *= ratio;
  }
  double acc = 0.0;
  len = length / total;
  for (int k = 0; k < panels; ++k) {
    acc += len;
    edges[k + 1] = acc;
    len *= ratio;
  }
  edges[panels] = length;
  return edges;
}

void panel_nodes(const std::vector<double>& edges, int order, std::vector<double>& nodes,
                 std::vector<double>& weights) {
  const GaussRule& g = gauss_legendre(order);
  nodes.clear();
  weights.clear();
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double half = 0.5 * (edges[k + 1] - edges[k]);
    const double mid = 0.5 * (edges[k + 1] + edges[k]);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      nodes.push_back(mid + half * g.x[i]);
      weights.push_back(half * g.w[i]);
    }
  }
}

}  // namespace wkl
