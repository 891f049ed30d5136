#include "wkl/stochastic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "wkl/errors.hpp"
#include "wkl/parallel.hpp"

namespace wkl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

// No-touch probability of a Brownian bridge gap with endpoint gaps d0, d1 > 0
// over a step h; var is the variance rate of the gap.
double no_touch(double d0, double d1, double h, double var) {
  return -std::expm1(-2.0 * d0 * d1 / (var * h));
}

// Bridge from u to v on grid indices l..r (step h), written into c[l..r].
template <class Rng>
void fill_bridge(std::vector<double>& c, int l, int r, double u, double v, double h, Rng& rng) {
  std::normal_distribution<double> nd;
  const double sh = std::sqrt(h);
  const int len = r - l;
  c[l] = 0.0;
  for (int j = l + 1; j <= r; ++j) c[j] = c[j - 1] + sh * nd(rng);
  const double end = c[r];
  for (int j = l; j <= r; ++j) {
    const double s = static_cast<double>(j - l) / len;
    c[j] = c[j] - s * end + u + s * (v - u);
  }
  c[l] = u;
  c[r] = v;
}

struct Skeleton {
  const BridgeBoundary& bnd;
  std::vector<double> t;
  double h = 0.0;
  int N = 0;
  int spike_index = -1;

  explicit Skeleton(const BridgeBoundary& b) : bnd(b), t(b.grid()) {
    N = static_cast<int>(t.size()) - 1;
    h = (bnd.b - bnd.a) / N;
    if (bnd.spike) {
      spike_index = static_cast<int>(std::lround((bnd.spike->t0 - bnd.a) / h));
      if (std::abs(t[spike_index] - bnd.spike->t0) > 1e-9 * (bnd.b - bnd.a)) {
        std::ostringstream os;
        os << "spike time " << bnd.spike->t0 << " snapped to grid time " << t[spike_index];
        warn(os.str());
      }
    }
  }

  double upper(const std::vector<std::vector<double>>& c, int i, int j) const {
    if (i > 0) return c[i - 1][j];
    return bnd.ceiling.empty() ? std::numeric_limits<double>::infinity() : bnd.ceiling[j];
  }
  double lower(const std::vector<std::vector<double>>& c, int i, int j) const {
    const int k = static_cast<int>(c.size());
    double g = -std::numeric_limits<double>::infinity();
    if (i + 1 < k) return c[i + 1][j];
    if (!bnd.floor.empty()) g = bnd.floor[j];
    if (j == spike_index) g = std::max(g, bnd.spike->g0);
    return g;
  }

  // Weight of the terms that involve curve i on grid points l..r (intervals
  // l..r-1). Zero when a grid constraint fails.
  double curve_weight(const std::vector<std::vector<double>>& c, int i, int l, int r) const {
    const int k = static_cast<int>(c.size());
    for (int j = l; j <= r; ++j) {
      if (!(c[i][j] < upper(c, i, j)) || !(c[i][j] > lower(c, i, j))) return 0.0;
    }
    if (!bnd.between_grid) return 1.0;
    double w = 1.0;
    for (int j = l; j < r; ++j) {
      // Neighbor curves are themselves bridges: the gap has variance rate 2.
      if (i > 0) {
        w *= no_touch(c[i - 1][j] - c[i][j], c[i - 1][j + 1] - c[i][j + 1], h, 2.0);
      } else if (!bnd.ceiling.empty()) {
        w *= no_touch(bnd.ceiling[j] - c[i][j], bnd.ceiling[j + 1] - c[i][j + 1], h, 1.0);
      }
      if (i + 1 < k) {
        w *= no_touch(c[i][j] - c[i + 1][j], c[i][j + 1] - c[i + 1][j + 1], h, 2.0);
      } else if (!bnd.floor.empty()) {
        w *= no_touch(c[i][j] - bnd.floor[j], c[i][j + 1] - bnd.floor[j + 1], h, 1.0);
      }
    }
    return w;
  }

  // Weight of the whole configuration, each term counted once.
  double total_weight(const std::vector<std::vector<double>>& c) const {
    const int k = static_cast<int>(c.size());
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j <= N; ++j) {
        if (!(c[i][j] < upper(c, i, j)) || !(c[i][j] > lower(c, i, j))) return 0.0;
      }
    }
    if (!bnd.between_grid) return 1.0;
    double w = 1.0;
    for (int j = 0; j < N; ++j) {
      if (!bnd.ceiling.empty()) {
        w *= no_touch(bnd.ceiling[j] - c[0][j], bnd.ceiling[j + 1] - c[0][j + 1], h, 1.0);
      }
      for (int i = 0; i + 1 < k; ++i) {
        w *= no_touch(c[i][j] - c[i + 1][j], c[i][j + 1] - c[i + 1][j + 1], h, 2.0);
      }
      if (!bnd.floor.empty()) {
        w *= no_touch(c[k - 1][j] - bnd.floor[j], c[k - 1][j + 1] - bnd.floor[j + 1], h, 1.0);
      }
    }
    return w;
  }

  template <class Rng>
  std::vector<std::vector<double>> free_draw(Rng& rng) const {
    std::vector<std::vector<double>> c(bnd.x.size(), std::vector<double>(N + 1));
    for (std::size_t i = 0; i < bnd.x.size(); ++i) fill_bridge(c[i], 0, N, bnd.x[i], bnd.y[i], h, rng);
    return c;
  }
};

PathEnsemble wrap(std::vector<double> t, std::vector<std::vector<double>> c, bool ordered) {
  PathEnsemble p;
  p.times = std::move(t);
  p.curves = std::move(c);
  p.non_intersecting = ordered;
  return p;
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ splitmix64(a + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(b + 0x8cb92ba72f3d8dd7ULL));
  return std::mt19937_64(h);
}

bool PathEnsemble::strictly_ordered() const {
  for (std::size_t i = 1; i < curves.size(); ++i) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (!(curves[i][j] < curves[i - 1][j])) return false;
    }
  }
  return true;
}

bool WeylVector::valid() const {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (open ? !(x[i] < x[i - 1]) : !(x[i] <= x[i - 1])) return false;
  }
  return true;
}

// ---------------------------------------------------------------- DBM

PathEnsemble sample_dbm_euler(const DBMSpec& spec) {
  const int n = spec.n;
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  if (!(spec.dt > 0.0)) throw Error(ErrorCode::BadResolution, "dt must be positive");
  if (spec.times.empty()) throw Error(ErrorCode::EmptyData, "empty time grid");
  if (!(spec.times.front() > 0.0)) throw Error(ErrorCode::NonpositiveTime, "grid times must be > 0");
  for (std::size_t j = 1; j < spec.times.size(); ++j) {
    if (!(spec.times[j] > spec.times[j - 1])) {
      throw Error(ErrorCode::InvalidArgument, "grid must be strictly increasing");
    }
  }
  std::vector<double> start = spec.start.empty() ? std::vector<double>(n, 0.0) : spec.start;
  if (static_cast<int>(start.size()) != n || !WeylVector{start, false}.valid()) {
    throw Error(ErrorCode::NotNonincreasing, "start must be a nonincreasing vector of length n");
  }
  auto rng = make_stream(spec.seed, 1);
  std::normal_distribution<double> nd;

  // Exact first step: eigenvalues of diag(start) + H(t0), which also handles
  // coincident starting points.
  const double t0 = std::min(spec.dt, spec.times.front());
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
  const double s0 = std::sqrt(t0);
  for (int i = 0; i < n; ++i) {
    X(i, i) = start[i] + s0 * nd(rng);
    for (int j = i + 1; j < n; ++j) {
      const double re = nd(rng), im = nd(rng);
      X(i, j) = std::complex<double>(re, im) * (s0 / std::sqrt(2.0));
      X(j, i) = std::conj(X(i, j));
    }
  }
  std::vector<double> lam(n);
  if (n == 1) {
    lam[0] = X(0, 0).real();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(X, Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) lam[i] = es.eigenvalues()(n - 1 - i);
  }

  auto drift = [&](const std::vector<double>& v, int i) {
    double d = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) d += 1.0 / (v[i] - v[j]);
    }
    return d;
  };
  std::vector<double> prop(n);
  // Step with a fixed Brownian increment; split it by a bridge when unresolved.
  // depth counts consecutive halvings.
  std::function<void(double, std::vector<double>, int)> step = [&](double h, std::vector<double> dB,
                                                                   int depth) {
    // A step is resolvable when no adjacent gap changes by more than half of
    // itself; near-collisions then get refined instead of overshooting.
    for (int i = 0; i < n; ++i) prop[i] = lam[i] + dB[i] + h * drift(lam, i);
    bool ok = true;
    for (int i = 0; i + 1 < n; ++i) {
      const double g0 = lam[i] - lam[i + 1];
      const double g1 = prop[i] - prop[i + 1];
      if (std::abs(g1 - g0) > 0.5 * g0) ok = false;
    }
    if (ok && strictly_decreasing(prop)) {
      lam = prop;
      return;
    }
    if (depth >= 20) {
      throw Error(ErrorCode::CollisionAtStep, "step unresolved after halving it 20 times");
    }
    std::vector<double> d1(n), d2(n);
    const double sd = std::sqrt(h / 4.0);
    for (int i = 0; i < n; ++i) {
      d1[i] = 0.5 * dB[i] + sd * nd(rng);
      d2[i] = dB[i] - d1[i];
    }
    // The first half continues the run of halvings; the second starts after
    // an accepted sub-step, so its count restarts.
    step(0.5 * h, d1, depth + 1);
    step(0.5 * h, d2, 0);
  };

  PathEnsemble out;
  out.times = spec.times;
  out.curves.assign(n, std::vector<double>(spec.times.size()));
  double now = t0;
  std::vector<double> dB(n);
  for (std::size_t g = 0; g < spec.times.size(); ++g) {
    const double target = spec.times[g];
    while (now < target - 1e-12 * target) {
      const double h = std::min(spec.dt, target - now);
      for (int i = 0; i < n; ++i) dB[i] = std::sqrt(h) * nd(rng);
      if (n == 1) {
        lam[0] += dB[0];
      } else {
        step(h, dB, 0);
      }
      now += h;
    }
    for (int i = 0; i < n; ++i) out.curves[i][g] = lam[i];
  }
  out.non_intersecting = n > 1 ? out.strictly_ordered() : true;
  return out;
}

PathEnsemble sample_dbm_matrix(int n, const std::vector<double>& times, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  if (times.empty()) throw Error(ErrorCode::EmptyData, "empty time grid");
  if (times.front() < 0.0) throw Error(ErrorCode::NonpositiveTime, "grid times must be >= 0");
  auto rng = make_stream(seed, 2);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
  PathEnsemble out;
  out.times = times;
  out.curves.assign(n, std::vector<double>(times.size()));
  double prev = 0.0;
  const double r2 = 1.0 / std::sqrt(2.0);
  for (std::size_t g = 0; g < times.size(); ++g) {
    const double dt = times[g] - prev;
    if (dt < 0.0) throw Error(ErrorCode::InvalidArgument, "grid must be increasing");
    const double s = std::sqrt(dt);
    for (int i = 0; i < n; ++i) {
      X(i, i) += s * nd(rng);
      for (int j = i + 1; j < n; ++j) {
        const double re = nd(rng), im = nd(rng);
        X(i, j) += std::complex<double>(re, im) * (s * r2);
        X(j, i) = std::conj(X(i, j));
      }
    }
    prev = times[g];
    if (n == 1) {
      out.curves[0][g] = X(0, 0).real();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(X, Eigen::EigenvaluesOnly);
      for (int i = 0; i < n; ++i) out.curves[i][g] = es.eigenvalues()(n - 1 - i);
    }
  }
  out.non_intersecting = true;
  return out;
}

PathEnsemble time_reverse(const PathEnsemble& paths) {
  const std::size_t m = paths.times.size();
  for (double t : paths.times) {
    if (!(t > 0.0)) throw Error(ErrorCode::ZeroTime, "time reversal needs all grid times > 0");
  }
  PathEnsemble out;
  out.non_intersecting = paths.non_intersecting;
  out.times.resize(m);
  out.curves.assign(paths.size(), std::vector<double>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t src = m - 1 - j;
    out.times[j] = 1.0 / paths.times[src];
    for (std::size_t i = 0; i < paths.size(); ++i) {
      out.curves[i][j] = paths.curves[i][src] / paths.times[src];
    }
  }
  return out;
}

// ---------------------------------------------------------------- bridges

std::vector<double> BridgeBoundary::grid() const {
  const int N = std::max(2, static_cast<int>(std::lround((b - a) * points_per_unit)));
  std::vector<double> t(N + 1);
  for (int j = 0; j <= N; ++j) t[j] = a + (b - a) * j / N;
  t[N] = b;
  return t;
}

void BridgeBoundary::validate() const {
  if (!(b > a)) throw Error(ErrorCode::InvalidArgument, "bridge interval needs b > a");
  if (points_per_unit < 1) throw Error(ErrorCode::BadResolution, "points_per_unit must be positive");
  if (x.empty() || x.size() != y.size()) {
    throw Error(ErrorCode::InvalidArgument, "entrance and exit need the same positive length");
  }
  if (!strictly_decreasing(x) || !strictly_decreasing(y)) {
    throw Error(ErrorCode::NotNonincreasing, "entrance and exit must be strictly decreasing");
  }
  const std::size_t n = grid().size();
  if (!ceiling.empty()) {
    if (ceiling.size() != n) throw Error(ErrorCode::InvalidArgument, "ceiling must have one value per grid point");
    if (!(ceiling.front() > x.front()) || !(ceiling.back() > y.front())) {
      throw Error(ErrorCode::OrderingViolation, "ceiling must lie above the top endpoints");
    }
  }
  if (!floor.empty()) {
    if (floor.size() != n) throw Error(ErrorCode::InvalidArgument, "floor must have one value per grid point");
    if (!(floor.front() < x.back()) || !(floor.back() < y.back())) {
      throw Error(ErrorCode::OrderingViolation, "floor must lie below the bottom endpoints");
    }
  }
  if (spike && !(spike->t0 > a && spike->t0 < b)) {
    throw Error(ErrorCode::InvalidArgument, "spike time must be inside (a, b)");
  }
}

PathEnsemble sample_free_bridges(const BridgeBoundary& bnd, std::uint64_t seed) {
  bnd.validate();
  Skeleton sk(bnd);
  auto rng = make_stream(seed, 3);
  auto c = sk.free_draw(rng);
  return wrap(sk.t, std::move(c), false);
}

RejectionResult sample_avoiding_rejection(const BridgeBoundary& bnd, std::uint64_t seed,
                                          long max_attempts) {
  bnd.validate();
  Skeleton sk(bnd);
  auto rng = make_stream(seed, 4);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (long n = 1; n <= max_attempts; ++n) {
    auto c = sk.free_draw(rng);
    const double w = sk.total_weight(c);
    if (w > 0.0 && ud(rng) < w) {
      RejectionResult r;
      r.paths = wrap(sk.t, std::move(c), true);
      r.attempts = n;
      r.acceptance_rate = 1.0 / static_cast<double>(n);
      return r;
    }
  }
  std::ostringstream os;
  os << "no acceptance in " << max_attempts << " attempts; use the MCMC sampler";
  throw Error(ErrorCode::AcceptanceFloor, os.str());
}

AcceptanceEstimate estimate_acceptance(const BridgeBoundary& bnd, long attempts, std::uint64_t seed) {
  bnd.validate();
  if (attempts < 1) throw Error(ErrorCode::InvalidArgument, "attempts must be positive");
  Skeleton sk(bnd);
  const std::size_t chunks = 64;
  std::vector<long> hits(chunks, 0);
  parallel_for(chunks, [&](std::size_t q) {
    auto rng = make_stream(seed, 5, q);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const long lo = attempts * static_cast<long>(q) / static_cast<long>(chunks);
    const long hi = attempts * static_cast<long>(q + 1) / static_cast<long>(chunks);
    for (long n = lo; n < hi; ++n) {
      auto c = sk.free_draw(rng);
      const double w = sk.total_weight(c);
      if (w > 0.0 && ud(rng) < w) ++hits[q];
    }
  });
  long total = 0;
  for (long h : hits) total += h;
  AcceptanceEstimate e;
  e.attempts = attempts;
  e.rate = static_cast<double>(total) / static_cast<double>(attempts);
  e.se = std::sqrt(e.rate * (1.0 - e.rate) / static_cast<double>(attempts));
  return e;
}

void mcmc_sweeps(const BridgeBoundary& bnd, PathEnsemble& state, int sweeps, std::uint64_t seed,
                 MCMCOptions opt) {
  Skeleton sk(bnd);
  const int N = sk.N;
  const int k = static_cast<int>(state.size());
  int wmax = opt.max_window > 0 ? opt.max_window : bnd.points_per_unit;
  wmax = std::clamp(wmax, 2, N);
  const int per_curve = std::max(1, (2 * N + wmax + 1) / (wmax + 2));
  std::vector<double> save(N + 1);
  for (int s = 0; s < sweeps; ++s) {
    auto rng = make_stream(seed, 6, static_cast<std::uint64_t>(s));
    std::uniform_int_distribution<int> len_d(2, wmax);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int i = 0; i < k; ++i) {
      for (int w = 0; w < per_curve; ++w) {
        const int len = len_d(rng);
        const int l = std::uniform_int_distribution<int>(0, N - len)(rng);
        const int r = l + len;
        auto& c = state.curves[i];
        std::copy(c.begin() + l, c.begin() + r + 1, save.begin() + l);
        bool accepted = false;
        for (long att = 0; att < opt.attempt_cap; ++att) {
          fill_bridge(c, l, r, save[l], save[r], sk.h, rng);
          const double wgt = sk.curve_weight(state.curves, i, l, r);
          if (wgt > 0.0 && ud(rng) < wgt) {
            accepted = true;
            break;
          }
        }
        if (!accepted) {
          std::ostringstream os;
          os << "window [" << sk.t[l] << ", " << sk.t[r] << "] of curve " << i
             << " accepted nothing in " << opt.attempt_cap << " attempts";
          throw Error(ErrorCode::NonErgodicWindow, os.str());
        }
      }
    }
  }
}

PathEnsemble sample_avoiding_mcmc(const BridgeBoundary& bnd, int sweeps, std::uint64_t seed,
                                  MCMCOptions opt) {
  bnd.validate();
  if (sweeps < 0) throw Error(ErrorCode::InvalidArgument, "sweeps must be nonnegative");
  Skeleton sk(bnd);
  const int k = static_cast<int>(bnd.x.size());
  std::vector<std::vector<double>> c(k, std::vector<double>(sk.N + 1));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= sk.N; ++j) {
      const double s = static_cast<double>(j) / sk.N;
      c[i][j] = bnd.x[i] + s * (bnd.y[i] - bnd.x[i]);
    }
  }
  if (sk.spike_index >= 0 && !(c[k - 1][sk.spike_index] > bnd.spike->g0)) {
    // Lift every curve by a tent over the spike; the order is unchanged.
    const double lift = bnd.spike->g0 - c[k - 1][sk.spike_index] + 1.0;
    for (int j = 0; j <= sk.N; ++j) {
      const double tent = j <= sk.spike_index ? static_cast<double>(j) / sk.spike_index
                                              : static_cast<double>(sk.N - j) / (sk.N - sk.spike_index);
      for (int i = 0; i < k; ++i) c[i][j] += lift * tent;
    }
  }
  if (!(sk.total_weight(c) > 0.0)) {
    try {
      c = sample_avoiding_rejection(bnd, seed, 20000).paths.curves;
    } catch (const Error&) {
      throw Error(ErrorCode::NonErgodicWindow, "no admissible starting configuration found");
    }
  }
  PathEnsemble state = wrap(sk.t, std::move(c), true);
  mcmc_sweeps(bnd, state, sweeps, seed, opt);
  return state;
}

// ---------------------------------------------------------------- coupling

namespace {

void check_coupling_order(const BridgeBoundary& lo, const BridgeBoundary& hi) {
  auto fail = [](const char* what) { throw Error(ErrorCode::OrderingViolation, what); };
  if (lo.a != hi.a || lo.b != hi.b || lo.points_per_unit != hi.points_per_unit ||
      lo.x.size() != hi.x.size()) {
    fail("boundaries must share the interval, grid and curve count");
  }
  for (std::size_t i = 0; i < lo.x.size(); ++i) {
    if (lo.x[i] > hi.x[i] || lo.y[i] > hi.y[i]) fail("entrance/exit data must satisfy x <= x'");
  }
  const std::size_t n = lo.grid().size();
  const double ninf = -std::numeric_limits<double>::infinity();
  const double pinf = std::numeric_limits<double>::infinity();
  Skeleton sl(lo), sh(hi);
  for (std::size_t j = 0; j < n; ++j) {
    double gl = lo.floor.empty() ? ninf : lo.floor[j];
    double gh = hi.floor.empty() ? ninf : hi.floor[j];
    if (static_cast<int>(j) == sl.spike_index) gl = std::max(gl, lo.spike->g0);
    if (static_cast<int>(j) == sh.spike_index) gh = std::max(gh, hi.spike->g0);
    if (gl > gh) fail("floors must satisfy g <= g'");
    const double fl = lo.ceiling.empty() ? pinf : lo.ceiling[j];
    const double fh = hi.ceiling.empty() ? pinf : hi.ceiling[j];
    if (fl > fh) fail("ceilings must satisfy f <= f'");
  }
}

}  // namespace

CouplingReport monotone_coupling_check(const BridgeBoundary& low, const BridgeBoundary& high,
                                       int n_samples, std::uint64_t seed, Sampler sampler,
                                       int sweeps) {
  low.validate();
  high.validate();
  check_coupling_order(low, high);
  if (n_samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples");
  const int k = static_cast<int>(low.x.size());
  const auto t = low.grid();
  const int N = static_cast<int>(t.size()) - 1;
  const std::vector<int> idx = {N / 4, N / 2, (3 * N) / 4};
  // vals[side][curve][point][sample]
  std::vector<std::vector<std::vector<std::vector<double>>>> vals(
      2, std::vector<std::vector<std::vector<double>>>(
             k, std::vector<std::vector<double>>(idx.size(), std::vector<double>(n_samples))));
  parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t s) {
    for (int side = 0; side < 2; ++side) {
      const BridgeBoundary& b = side == 0 ? low : high;
      const std::uint64_t key = seed ^ (0x5bd1e995ULL * (side + 1));
      PathEnsemble p = sampler == Sampler::rejection
                           ? sample_avoiding_rejection(b, make_stream(key, 7, s)(), 1000000).paths
                           : sample_avoiding_mcmc(b, sweeps, make_stream(key, 8, s)());
      for (int i = 0; i < k; ++i) {
        for (std::size_t q = 0; q < idx.size(); ++q) vals[side][i][q][s] = p.curves[i][idx[q]];
      }
    }
  });
  CouplingReport rep;
  rep.samples = n_samples;
  const double n = n_samples;
  for (int i = 0; i < k; ++i) {
    for (std::size_t q = 0; q < idx.size(); ++q) {
      auto lo = vals[0][i][q], hi = vals[1][i][q];
      std::sort(lo.begin(), lo.end());
      std::sort(hi.begin(), hi.end());
      std::vector<double> pooled = lo;
      pooled.insert(pooled.end(), hi.begin(), hi.end());
      std::sort(pooled.begin(), pooled.end());
      CouplingPoint cp;
      cp.curve = i;
      cp.time = t[idx[q]];
      cp.max_excess_se = -std::numeric_limits<double>::infinity();
      cp.max_dominance_se = -std::numeric_limits<double>::infinity();
      for (int m = 1; m < 20; ++m) {
        const double u = pooled[static_cast<std::size_t>(m * (pooled.size() - 1) / 20)];
        const double Fl = static_cast<double>(std::upper_bound(lo.begin(), lo.end(), u) - lo.begin()) / n;
        const double Fh = static_cast<double>(std::upper_bound(hi.begin(), hi.end(), u) - hi.begin()) / n;
        const double se = std::max(std::sqrt((Fl * (1 - Fl) + Fh * (1 - Fh)) / n), 1.0 / n);
        cp.max_excess_se = std::max(cp.max_excess_se, (Fh - Fl) / se);
        cp.max_dominance_se = std::max(cp.max_dominance_se, (Fl - Fh) / se);
      }
      if (cp.max_excess_se > 3.0) rep.dominance_holds = false;
      if (cp.max_dominance_se > 3.0) rep.strict_detected = true;
      rep.points.push_back(cp);
    }
  }
  return rep;
}

// ---------------------------------------------------------------- statistics

double modulus_of_continuity(const std::vector<double>& times, const std::vector<double>& curve,
                             double delta) {
  if (times.size() != curve.size()) throw Error(ErrorCode::InvalidArgument, "size mismatch");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  if (times.empty()) return 0.0;
  const double slack = 1e-12 * std::max(1.0, std::abs(times.back() - times.front()));
  std::deque<std::size_t> mx, mn;
  double best = 0.0;
  std::size_t lo = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    while (times[j] - times[lo] > delta + slack) ++lo;
    while (!mx.empty() && mx.front() < lo) mx.pop_front();
    while (!mn.empty() && mn.front() < lo) mn.pop_front();
    while (!mx.empty() && curve[mx.back()] <= curve[j]) mx.pop_back();
    while (!mn.empty() && curve[mn.back()] >= curve[j]) mn.pop_back();
    mx.push_back(j);
    mn.push_back(j);
    best = std::max(best, curve[mx.front()] - curve[mn.front()]);
  }
  return best;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyData, "KS distance needs samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = a.size(), nb = b.size();
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

// ---------------------------------------------------------------- figure 1

Figure1Config figure1_config_from(const std::vector<double>& v_right, const std::vector<int>& m_right,
                                  const std::vector<double>& v_left, const std::vector<int>& m_left) {
  Figure1Config cfg;
  for (double v : v_right) cfg.slopes_right.push_back(-2.0 / v);
  for (double v : v_left) cfg.slopes_left.push_back(-2.0 / v);
  cfg.sizes_right = m_right;
  cfg.sizes_left = m_left;
  return cfg;
}

BridgeBoundary figure1_boundary(const Figure1Config& cfg) {
  if (cfg.slopes_right.size() != cfg.sizes_right.size() || cfg.slopes_left.size() != cfg.sizes_left.size()) {
    throw Error(ErrorCode::InvalidArgument, "one size per slope group");
  }
  if (!(cfg.L > 0.0)) throw Error(ErrorCode::InvalidArgument, "window half-width must be positive");
  const double spacing = cfg.spacing > 0.0 ? cfg.spacing : 3.0 * std::sqrt(cfg.L);
  auto side = [&](const std::vector<double>& slopes, const std::vector<int>& sizes) {
    std::vector<double> h;
    for (std::size_t g = 0; g < slopes.size(); ++g) {
      if (sizes[g] < 1) throw Error(ErrorCode::InvalidArgument, "group sizes must be positive");
      for (int i = 0; i < sizes[g]; ++i) h.push_back(slopes[g] * cfg.L - spacing * i);
    }
    return h;
  };
  auto right = side(cfg.slopes_right, cfg.sizes_right);
  auto left = side(cfg.slopes_left, cfg.sizes_left);
  const std::size_t k = std::max(right.size(), left.size()) + static_cast<std::size_t>(std::max(0, cfg.flat_curves));
  if (k == 0) throw Error(ErrorCode::EmptyData, "no curves");
  // Curves past the wanderers follow the parabola of the flat ensemble.
  const double parabola = -cfg.L * cfg.L / std::sqrt(2.0);
  auto complete = [&](std::vector<double> h) {
    const std::size_t w = h.size();
    for (std::size_t i = w; i < k; ++i) h.push_back(parabola - spacing * static_cast<double>(i - w));
    for (std::size_t i = 1; i < k; ++i) h[i] = std::min(h[i], h[i - 1] - spacing);
    return h;
  };
  BridgeBoundary b;
  b.a = -cfg.L;
  b.b = cfg.L;
  b.x = complete(left);
  b.y = complete(right);
  b.points_per_unit = cfg.points_per_unit;
  return b;
}

PathEnsemble figure1_emulation(const Figure1Config& cfg) {
  return sample_avoiding_mcmc(figure1_boundary(cfg), cfg.sweeps, cfg.seed);
}

}  // namespace wkl
