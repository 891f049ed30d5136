#pragma once

#include <complex>
#include <vector>

namespace wkl {

using cplx = std::complex<double>;

// Truncated Taylor series: coefficient k multiplies eps^k.
using Series = std::vector<cplx>;

// exp of a series, by g_n = (1/n) sum_k k f_k g_{n-k}; g_0 = exp(f_0).
Series series_exp(const Series& f);

// log(c0 + c1 eps) expanded to `terms` coefficients.
Series series_log_linear(cplx c0, cplx c1, int terms);

// Cubic polynomial sum_k coef[k] z^k re-expanded about z0, truncated.
Series series_poly_shift(const std::vector<cplx>& coef, cplx z0, int terms);

void series_add(Series& acc, const Series& f, cplx scale = 1.0);

}  // namespace wkl
