#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "frozen.hpp"
#include "oracles.hpp"
#include "wkl/errors.hpp"
#include "wkl/fredholm.hpp"

using namespace wkl;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST(Fredholm, ZeroAndRankOne) {
  NystromSystem sys;
  sys.times = {0.0};
  sys.nodes = {{0.1, 0.2, 0.3}};
  sys.weights = {{0.5, 0.25, 0.25}};
  sys.M = Eigen::MatrixXd::Zero(3, 3);
  EXPECT_DOUBLE_EQ(fredholm_det(sys), 1.0);
  // entries sqrt(w_i) u_i v_j sqrt(w_j): det(I - M) = 1 - sum w_i u_i v_i
  Eigen::Vector3d u(1.0, -2.0, 0.5), v(0.3, 0.1, 2.0), w(0.5, 0.25, 0.25);
  Eigen::Vector3d sw = w.cwiseSqrt();
  sys.M = sw.cwiseProduct(u) * sw.cwiseProduct(v).transpose();
  EXPECT_NEAR(fredholm_det(sys), 1.0 - (w.cwiseProduct(u).cwiseProduct(v)).sum(), 1e-14);
}

TEST(Fredholm, TracyWidomAgainstPainleve) {
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(tw2_cdf(frozen::kTwGrid[i]), frozen::kTw2[i], 1e-7) << frozen::kTwGrid[i];
  EXPECT_NEAR(tw2_cdf(6.0), 1.0, 1e-8);
  const double f2 = tw2_cdf(2.0);
  EXPECT_GT(f2, 0.99);
  EXPECT_LT(f2, 1.0);
}

TEST(Fredholm, TracyWidomMonotone) {
  double prev = 0.0;
  for (double A = -4.0; A <= 2.0 + 1e-12; A += 0.25) {
    const double f = tw2_cdf(A);
    EXPECT_GE(f, prev) << A;
    prev = f;
  }
}

TEST(Fredholm, NodeDoublingIsStable) {
  auto K = ExtendedKernel::airy();
  auto e = gap_probability_estimate(K, {{0.0}, {-1.0}});
  EXPECT_LT(e.error, 1e-6);
  EXPECT_NEAR(e.value, gap_probability(K, {{0.0}, {-1.0}}, 80), 1e-9);
}

TEST(Fredholm, AiryOperatorIsAContraction) {
  auto sys = discretize(ExtendedKernel::airy(), {{0.0}, {0.0}});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sys.M + sys.M.transpose()));
  EXPECT_LT(es.eigenvalues().maxCoeff(), 1.0);
  EXPECT_GT(es.eigenvalues().maxCoeff(), 0.0);
}

TEST(Fredholm, BbpLimits) {
  const auto zero = make_params({});
  EXPECT_DOUBLE_EQ(bbp_cdf(zero, 0.0, 0.5), tw2_cdf(0.5));
  const auto tiny = make_params({1e-4});
  for (double A : {-1.0, 0.0, 1.0}) EXPECT_LT(std::abs(bbp_cdf(tiny, 0.0, A) - tw2_cdf(A)), 1e-3);
  const auto p = make_params({1.0, 0.5});
  EXPECT_LT(bbp_cdf(p, 0.0, -12.0), 1e-6);
  EXPECT_GT(bbp_cdf(p, 0.0, 12.0), 1.0 - 1e-6);
  double prev = 0.0;
  for (double A = -3.0; A <= 3.0; A += 1.0) {
    const double f = bbp_cdf(p, 0.0, A);
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(Fredholm, GapDomainEdges) {
  auto K = ExtendedKernel::airy();
  EXPECT_DOUBLE_EQ(gap_probability(K, {{0.0}, {kInf}}), 1.0);
  EXPECT_NEAR(gap_probability(K, {{0.0}, {40.0}}), 1.0, 1e-14);
}

TEST(Fredholm, BrownianGaps) {
  auto K = ExtendedKernel::dbm(1);
  EXPECT_NEAR(gap_probability(K, {{1.0}, {0.0}}), 0.5, 1e-6);
  EXPECT_NEAR(gap_probability(K, {{1.0}, {1.0}}), 0.5 * std::erfc(-1.0 / std::sqrt(2.0)), 1e-6);
  EXPECT_NEAR(gap_probability(K, {{1.0, 2.0}, {0.0, 0.0}}), frozen::kBrownianOrthant, 1e-6);
}

TEST(Fredholm, Intensity) {
  auto K = ExtendedKernel::dbm(1);
  EXPECT_NEAR(intensity(K, 1.0, 0.4), std::exp(-0.08) / std::sqrt(2.0 * M_PI), 1e-10);
  auto A = ExtendedKernel::airy();
  double prev = intensity(A, 0.0, 2.0);
  for (double x = 2.5; x <= 8.0; x += 0.5) {
    const double v = intensity(A, 0.0, x);
    EXPECT_LT(v, prev);
    EXPECT_GE(v, -1e-9);
    prev = v;
  }
}

TEST(Fredholm, DbmCounts) {
  for (int n : {1, 2, 3}) {
    auto e = expected_count_above(ExtendedKernel::dbm(n), 1.0, -40.0);
    EXPECT_NEAR(e.value, n, 1e-6);
  }
  EXPECT_NEAR(expected_count_above(ExtendedKernel::dbm(1), 1.0, 0.0).value, 0.5, 1e-8);
  for (int i = 0; i < 3; ++i) {
    auto e = expected_count_above(ExtendedKernel::dbm(2), 1.0, frozen::kCountGrid[i]);
    EXPECT_NEAR(e.value, frozen::kDbm2Count[i], 1e-9);
  }
}

TEST(Fredholm, SlopedCountAboveTheEdge) {
  auto e = expected_count_above(ExtendedKernel::sloped(make_params({1.0, 0.5}), 0.5, 200.0), 1.0, 8.0);
  EXPECT_NEAR(e.value, 1.0, 0.05);
}
