#include "wkl/series.hpp"

#include <cmath>

namespace wkl {

Series series_exp(const Series& f) {
  Series g(f.size(), 0.0);
  if (f.empty()) return g;
  g[0] = std::exp(f[0]);
  for (std::size_t n = 1; n < f.size(); ++n) {
    cplx acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += static_cast<double>(k) * f[k] * g[n - k];
    g[n] = acc / static_cast<double>(n);
  }
  return g;
}

Series series_log_linear(cplx c0, cplx c1, int terms) {
  Series s(terms, 0.0);
  if (terms == 0) return s;
  s[0] = std::log(c0);
  const cplx r = c1 / c0;
  cplx pw = r;
  for (int k = 1; k < terms; ++k) {
    s[k] = ((k % 2 == 1) ? 1.0 : -1.0) * pw / static_cast<double>(k);
    pw *= r;
  }
  return s;
}

Series series_poly_shift(const std::vector<cplx>& coef, cplx z0, int terms) {
  Series s(terms, 0.0);
  // Horner on series: p(z0 + eps).
  for (std::size_t i = coef.size(); i-- > 0;) {
    Series next(terms, 0.0);
    for (int k = 0; k < terms; ++k) {
      next[k] += s[k] * z0;
      if (k + 1 < terms) next[k + 1] += s[k];
    }
    next[0] += coef[i];
    s.swap(next);
  }
  return s;
}

void series_add(Series& acc, const Series& f, cplx scale) {
  if (acc.size() < f.size()) acc.resize(f.size(), 0.0);
  for (std::size_t k = 0; k < f.size(); ++k) acc[k] += scale * f[k];
}

}  // namespace wkl
