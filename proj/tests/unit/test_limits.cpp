#include <gtest/gtest.h>

#include <cmath>

#include "wkl/errors.hpp"
#include "wkl/limits.hpp"

using namespace wkl;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no wkl::Error thrown";
  return ErrorCode::InvalidArgument;
}

const std::vector<KernelQuery> kPoints{{0.5, 0, 0.5, 0}, {0.5, 0, 1, 1}};

}  // namespace

TEST(Limits, SweepTolerance) {
  EXPECT_DOUBLE_EQ(sweep_tolerance(1e-9), 1e-3);
  EXPECT_DOUBLE_EQ(sweep_tolerance(1e-3), 1e-2);
}

TEST(Limits, SweepHypotheses) {
  EXPECT_EQ(code_of([] { sweep_kernel_dbm(make_params({}), 1, kPoints, {10}); }), ErrorCode::AssumptionViolated);
  EXPECT_EQ(code_of([] { sweep_kernel_dbm(make_params({1, 1, 0.5}), 2, kPoints, {10}); }),
            ErrorCode::AssumptionViolated);
  EXPECT_EQ(code_of([] { sweep_kernel_flat(make_params({0.5, 0.5}), kPoints, {5}); }),
            ErrorCode::AssumptionViolated);
  auto probe = sweep_kernel_dbm(make_params({1, 1, 0.5}), 2, kPoints, {10, 20}, true);
  EXPECT_TRUE(probe.probe);
  EXPECT_FALSE(probe.pass);
}

TEST(Limits, SweepOnePointDecreases) {
  auto r = sweep_kernel_dbm(make_params({1.0}), 1, {{1, 0, 1, 0}}, {10, 50, 200});
  ASSERT_EQ(r.errors.size(), 3u);
  EXPECT_TRUE(r.decreasing);
  EXPECT_TRUE(r.resolution_stable);
  for (double e : r.errors) EXPECT_TRUE(std::isfinite(e));
}

TEST(Limits, FlatSweep) {
  auto z = sweep_kernel_flat(make_params({}), kPoints, {5, 20});
  for (double e : z.errors) EXPECT_LT(e, 1e-12);
  auto r = sweep_kernel_flat(make_params({0.7, 0.4}), {{0.5, 0, 0.5, 0}, {1, 0.5, 1, 0.5}}, {5, 20, 80});
  EXPECT_TRUE(r.decreasing);
}

TEST(Limits, ResiduePrefactor) {
  auto p = make_params({1.0, 0.5}, {0.8});
  // j = 1: (1 + 0.8) / (1 (1 - 0.5))
  EXPECT_NEAR(residue_prefactor(p, 1), 3.6, 1e-14);
  // j = 2: (1 + 1.6) / (0.5 (1 - 2))
  EXPECT_NEAR(residue_prefactor(p, 2), -5.2, 1e-14);
}

TEST(Limits, ResidueDecay) {
  auto t = residue_decay(make_params({1.0, 0.5}), 2, 1, 0.5, 0.0, {20, 40, 80});
  EXPECT_TRUE(t.decaying);
  for (double r : t.ratios) EXPECT_GT(r, 10.0);
  EXPECT_LT(t.slope, 0.0);
  EXPECT_THROW(residue_decay(make_params({1.0, 0.5}), 2, 2, 0.5, 0.0, {20, 40}), Error);
}

TEST(Limits, TailIdentities) {
  auto s = tail_count_identity(make_params({1.0, 0.5}), 2, 1.0, 0.0, 50.0);
  EXPECT_LT(s.rel_gap, 1e-5);
  EXPECT_EQ(s.base, 1.0);
  auto f = flat_tail_count_identity(make_params({0.7, 0.4}), 1.0, 0.0, 50.0);
  EXPECT_LT(f.rel_gap, 1e-5);
  EXPECT_EQ(f.base, 2.0);
  EXPECT_EQ(code_of([] { flat_tail_count_identity(make_params({0.5, 0.5}), 1.0, 0.0, 50.0); }),
            ErrorCode::AssumptionViolated);
}

TEST(Limits, Symmetry) {
  auto r = symmetry_suite(make_params({1, 0.5, 0.5, 0.5}, {0.8, 0.8, 0.8, 0.5, 0.5}),
                          {{{-0.5, 0.3}, {0.2, -0.1}, {0.5, 0.5}}, {{0.0, 0.0}, {0.2, 1.0}}});
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_reflection, kReflectionTol);
  EXPECT_LT(r.max_gauge, kGaugeTol);
  EXPECT_LT(r.max_contour, kContourTol);
  auto sym = symmetry_suite(make_params({0.5}, {0.5}), {{{-0.4, 0.2}, {0.4, 0.2}}}, 0.0);
  EXPECT_TRUE(sym.pass);
  EXPECT_EQ(sym.max_translation, 0.0);
}
