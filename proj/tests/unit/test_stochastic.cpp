#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "wkl/errors.hpp"
#include "wkl/scaling.hpp"
#include "wkl/stochastic.hpp"

using namespace wkl;

namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double var(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

BridgeBoundary two_bridges(int ppu = 64) {
  BridgeBoundary b;
  b.x = {1.0, 0.0};
  b.y = {1.0, 0.0};
  b.points_per_unit = ppu;
  return b;
}

}  // namespace

TEST(Stochastic, StreamsAreReproducible) {
  auto a = make_stream(7, 1, 2), b = make_stream(7, 1, 2), c = make_stream(7, 2, 1);
  EXPECT_EQ(a(), b());
  EXPECT_NE(make_stream(7, 1, 2)(), c());
}

TEST(Stochastic, OnePathEulerIsBrownian) {
  std::vector<double> t1;
  for (int s = 0; s < 4000; ++s) {
    DBMSpec spec;
    spec.n = 1;
    spec.times = {0.5, 1.0};
    spec.seed = s;
    spec.dt = 1.0 / 64.0;
    auto p = sample_dbm_euler(spec);
    t1.push_back(p.curves[0][1] - p.curves[0][0]);
  }
  EXPECT_NEAR(var(t1), 0.5, 0.5 * 0.1);
}

TEST(Stochastic, EulerKeepsOrder) {
  DBMSpec spec;
  spec.n = 2;
  spec.start = {1.0, -1.0};
  for (int j = 1; j <= 64; ++j) spec.times.push_back(j / 32.0);
  for (int s = 0; s < 50; ++s) {
    spec.seed = s;
    EXPECT_TRUE(sample_dbm_euler(spec).strictly_ordered());
  }
}

TEST(Stochastic, EulerAgreesWithMatrixSampler) {
  const int N = 20000;
  std::vector<double> e(N), m(N);
  DBMSpec spec;
  spec.n = 2;
  spec.times = {1.0};
  spec.dt = 1.0 / 256.0;
  for (int s = 0; s < N; ++s) {
    spec.seed = s;
    e[s] = sample_dbm_euler(spec).curves[0][0];
    m[s] = sample_dbm_matrix(2, {1.0}, 1000000 + s).curves[0][0];
  }
  const double se = std::sqrt(var(e) / N + var(m) / N);
  EXPECT_LT(std::abs(mean(e) - mean(m)), 3.0 * se);
  EXPECT_NEAR(mean(m), 2.0 / std::sqrt(M_PI), 3.0 * std::sqrt(var(m) / N));
}

TEST(Stochastic, MatrixSamplerMarginals) {
  std::vector<double> one;
  for (int s = 0; s < 20000; ++s) one.push_back(sample_dbm_matrix(1, {2.0}, s).curves[0][0]);
  EXPECT_NEAR(var(one), 2.0, 2.0 * 0.05);
  // two-path count above 0.5 at t = 1 against the Hermite density
  const int N = 40000;
  double count = 0.0;
  for (int s = 0; s < N; ++s) {
    auto p = sample_dbm_matrix(2, {0.5, 1.0}, s);
    EXPECT_TRUE(p.strictly_ordered());
    for (const auto& c : p.curves) count += c[1] > 0.5;
  }
  const double expect = oracle::dbm_count_above(2, 1.0, 0.5);
  EXPECT_NEAR(count / N, expect, 3.0 * std::sqrt(expect / N));
}

TEST(Stochastic, TimeReversal) {
  auto p = sample_dbm_matrix(2, {0.25, 0.5, 1.0, 2.0}, 3);
  auto r = time_reverse(time_reverse(p));
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.times.size(); ++j) EXPECT_NEAR(r.curves[i][j], p.curves[i][j], 1e-14);
  EXPECT_THROW(time_reverse(sample_free_bridges(two_bridges(), 1)), Error);
  std::vector<double> v;
  for (int s = 0; s < 20000; ++s) v.push_back(time_reverse(sample_dbm_matrix(1, {0.5}, s)).curves[0][0]);
  EXPECT_NEAR(var(v), 2.0, 2.0 * 0.05);
}

TEST(Stochastic, FreeBridges) {
  auto b = two_bridges(16);
  b.x = {0.0};
  b.y = {0.0};
  std::vector<double> mid;
  for (int s = 0; s < 40000; ++s) {
    auto p = sample_free_bridges(b, s);
    EXPECT_EQ(p.curves[0].front(), 0.0);
    EXPECT_EQ(p.curves[0].back(), 0.0);
    mid.push_back(p.curves[0][8]);
  }
  EXPECT_NEAR(var(mid), 0.25, 0.25 * 0.05);
  EXPECT_NEAR(mean(mid), 0.0, 3.0 * std::sqrt(0.25 / mid.size()));
}

TEST(Stochastic, RejectionAcceptance) {
  auto est = estimate_acceptance(two_bridges(), 40000, 11);
  const double exact = oracle::two_bridge_acceptance(1.0, 1.0, 1.0);
  EXPECT_NEAR(est.rate, exact, 3.0 * est.se);
  auto single = two_bridges();
  single.x = {0.3};
  single.y = {-0.2};
  EXPECT_DOUBLE_EQ(estimate_acceptance(single, 1000, 1).rate, 1.0);
}

TEST(Stochastic, RejectionOutputsRespectConstraints) {
  auto b = two_bridges(32);
  b.spike = Spike{0.5, -0.2};
  for (int s = 0; s < 30; ++s) {
    auto r = sample_avoiding_rejection(b, s);
    EXPECT_TRUE(r.paths.strictly_ordered());
    EXPECT_GT(r.paths.curves[1][16], -0.2);
  }
  auto hard = two_bridges(32);
  hard.x = {1e-3, 0.0};
  hard.y = {1e-3, 0.0};
  try {
    sample_avoiding_rejection(hard, 1, 50);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AcceptanceFloor);
  }
}

TEST(Stochastic, McmcMatchesRejection) {
  auto b = two_bridges(32);
  std::vector<double> rej, mc;
  for (int s = 0; s < 3000; ++s) {
    auto r = sample_avoiding_rejection(b, s).paths;
    auto m = sample_avoiding_mcmc(b, 30, 500000 + s);
    ASSERT_TRUE(m.strictly_ordered());
    rej.push_back(r.curves[0][16] - r.curves[1][16]);
    mc.push_back(m.curves[0][16] - m.curves[1][16]);
  }
  // 3000 vs 3000: the 0.1% critical value is about 0.05
  EXPECT_LT(ks_distance(rej, mc), 0.05);
}

TEST(Stochastic, McmcRespectsCeilingAndFloor) {
  auto b = two_bridges(32);
  const auto g = b.grid();
  b.ceiling.assign(g.size(), 1.5);
  b.floor.assign(g.size(), -0.5);
  for (int s = 0; s < 10; ++s) {
    auto p = sample_avoiding_mcmc(b, 20, s);
    EXPECT_TRUE(p.strictly_ordered());
    for (std::size_t j = 0; j < g.size(); ++j) {
      EXPECT_LT(p.curves[0][j], 1.5);
      EXPECT_GT(p.curves[1][j], -0.5);
    }
  }
}

TEST(Stochastic, BoundaryValidation) {
  auto b = two_bridges();
  b.x = {0.0, 1.0};
  try {
    b.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNonincreasing);
  }
  auto c = two_bridges();
  c.b = c.a;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Stochastic, Coupling) {
  auto low = two_bridges(32), high = two_bridges(32);
  high.x = {2.0, 1.0};
  high.y = {2.0, 1.0};
  auto rep = monotone_coupling_check(low, high, 2000, 5);
  EXPECT_TRUE(rep.dominance_holds);
  EXPECT_TRUE(rep.strict_detected);
  auto same = monotone_coupling_check(low, low, 2000, 6);
  EXPECT_TRUE(same.dominance_holds);
}

TEST(Stochastic, SpikeRaisesTheBottomCurve) {
  auto low = two_bridges(32), high = two_bridges(32);
  high.spike = Spike{0.5, 0.0};
  auto rep = monotone_coupling_check(low, high, 2000, 8);
  EXPECT_TRUE(rep.dominance_holds);
  EXPECT_TRUE(rep.strict_detected);
}

TEST(Stochastic, ModulusOfContinuity) {
  std::vector<double> t, f, c;
  for (int j = 0; j <= 100; ++j) {
    t.push_back(j / 100.0);
    f.push_back(3.0 * j / 100.0);
    c.push_back(2.0);
  }
  EXPECT_EQ(modulus_of_continuity(t, c, 0.1), 0.0);
  EXPECT_NEAR(modulus_of_continuity(t, f, 0.1), 0.3, 1e-12);
  auto w = sample_free_bridges(two_bridges(), 2);
  double prev = 0.0;
  for (double d : {0.01, 0.05, 0.1, 0.5}) {
    const double m = modulus_of_continuity(w.times, w.curves[0], d);
    EXPECT_GE(m, prev);
    prev = m;
  }
}

TEST(Stochastic, KsDistance) {
  EXPECT_EQ(ks_distance({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(ks_distance({0, 0}, {5, 5}), 1.0);
}

TEST(Stochastic, FigureEmulation) {
  auto cfg = figure1_config_from({1.0, 0.5}, {1, 3}, {0.8, 0.5}, {3, 2});
  auto b = figure1_boundary(cfg);
  EXPECT_EQ(b.x.size(), 7u);
  auto p = figure1_emulation(cfg);
  EXPECT_TRUE(p.strictly_ordered());
  EXPECT_EQ(p.size(), 7u);
  Figure1Config one;
  one.slopes_right = {0.0};
  one.sizes_right = {1};
  one.slopes_left = {0.0};
  one.sizes_left = {1};
  one.flat_curves = 0;
  auto q = figure1_emulation(one);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.curves[0].front(), 0.0);
}

TEST(Scaling, RoundTrips) {
  auto p = sample_dbm_matrix(3, {0.5, 1.0, 1.5}, 9);
  auto id = apply_scaling(p, ScalingMap::identity());
  EXPECT_EQ(id.curves, p.curves);
  for (auto m : {ScalingMap::parabolic(), ScalingMap::flat(3.0), ScalingMap::sloped(2.0, 0.5)}) {
    auto back = apply_scaling(apply_scaling(p, m), m.inverse());
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.times.size(); ++j) {
        EXPECT_NEAR(back.times[j], p.times[j], 1e-14);
        EXPECT_NEAR(back.curves[i][j], p.curves[i][j], 1e-12);
      }
  }
}

TEST(Scaling, SlopedFrameOfZero) {
  PathEnsemble z;
  z.times = {0.0, 0.5, 1.0, 2.0};
  z.curves = {std::vector<double>(4, 0.0)};
  auto s = apply_scaling(z, ScalingMap::sloped(1.0, 1.0));
  for (std::size_t j = 0; j < 4; ++j) {
    const double t = z.times[j];
    EXPECT_NEAR(s.curves[0][j], (2.0 * t - t * t) / std::sqrt(2.0), 1e-14);
  }
}
