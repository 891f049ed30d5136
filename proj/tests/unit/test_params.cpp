#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "wkl/errors.hpp"
#include "wkl/params.hpp"

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

}  // namespace

TEST(Params, EmptyParameters) {
  auto p = make_params({});
  EXPECT_EQ(p.J_a(), 0);
  EXPECT_EQ(p.J_b(), 0);
  EXPECT_TRUE(std::isinf(p.underline_a()) && p.underline_a() > 0);
  EXPECT_TRUE(std::isinf(p.underline_b()) && p.underline_b() < 0);
  EXPECT_TRUE(p.is_zero());
}

TEST(Params, FigureShape) {
  auto p = make_params({1, 1, 1, 0.5}, {0.8, 0.8, 0.5, 0.5});
  EXPECT_EQ(p.J_a(), 4);
  EXPECT_EQ(p.J_b(), 4);
  EXPECT_DOUBLE_EQ(p.underline_a(), 1.0);
  EXPECT_DOUBLE_EQ(p.underline_b(), -1.25);
  auto m = multiplicities(p);
  EXPECT_EQ(m.v_a, (std::vector<double>{1, 0.5}));
  EXPECT_EQ(m.m_a, (std::vector<int>{3, 1}));
  EXPECT_EQ(m.m_b, (std::vector<int>{2, 2}));
}

TEST(Params, Validation) {
  EXPECT_EQ(code_of([] { make_params({0.5, 0.7}); }), ErrorCode::NotNonincreasing);
  EXPECT_EQ(code_of([] { make_params({0.5, -0.1}); }), ErrorCode::NegativeEntry);
  EXPECT_EQ(code_of([] { make_params({std::numeric_limits<double>::quiet_NaN()}); }), ErrorCode::InvalidArgument);
}

TEST(Params, Multiplicities) {
  auto m = multiplicities(make_params({2, 2, 1}));
  EXPECT_EQ(m.v_a, (std::vector<double>{2, 1}));
  EXPECT_EQ(m.m_a, (std::vector<int>{2, 1}));
  EXPECT_EQ(m.M_a, (std::vector<int>{2, 3}));
  EXPECT_TRUE(multiplicities(make_params({})).v_a.empty());
  EXPECT_EQ(reconstruct(m.v_a, m.m_a), (std::vector<double>{2, 2, 1}));
  EXPECT_EQ(code_of([] { reconstruct({1, 2}, {1, 1}); }), ErrorCode::NotNonincreasing);
}

TEST(Params, TrailingZerosAreDropped) {
  auto p = make_params({0.5, 0.0, 0.0});
  EXPECT_EQ(p.J_a(), 1);
  EXPECT_EQ(p.a_nonzero(), (std::vector<double>{0.5}));
}

TEST(Params, Phi) {
  EXPECT_NEAR(std::abs(phi(cplx(0.3, 1.7), make_params({})) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(phi(1.0, make_params({0.5}, {0.25})) - 2.5), 0.0, 1e-14);
  EXPECT_EQ(code_of([] { phi(2.0, make_params({0.5})); }), ErrorCode::PoleHit);
  auto p = make_params({0.5}, {0.25}, 0.3);
  const cplx z(0.2, -0.4);
  EXPECT_NEAR(std::abs(std::exp(log_phi(z, p)) - phi(z, p)), 0.0, 1e-14);
}

TEST(Params, UnderlineBounds) {
  EXPECT_DOUBLE_EQ(underline_bounds(make_params({0.5})).first, 2.0);
  EXPECT_TRUE(std::isinf(underline_bounds(make_params({})).first));
  auto p = validate_params(RawParams{{}, {}, 0.0, {0.1}, {}});
  EXPECT_DOUBLE_EQ(underline_bounds(p).first, 0.0);
}

TEST(Params, SwappedAndShift) {
  auto p = make_params({1, 0.5}, {0.8});
  auto s = p.swapped();
  EXPECT_EQ(s.a_plus(), p.b_plus());
  EXPECT_EQ(s.b_plus(), p.a_plus());
  EXPECT_DOUBLE_EQ(p.with_c_plus(0.7).c_plus(), 0.7);
}

TEST(Params, ConfigRoundTrip) {
  std::istringstream in("# comment\na_plus = 1, 0.5, 0.5\nb_plus = 0.8\nc_plus = 0.25\nseed = 4\n");
  auto kv = parse_key_values(in);
  auto p = params_from_config(kv);
  EXPECT_EQ(p.a_plus(), (std::vector<double>{1, 0.5, 0.5}));
  EXPECT_DOUBLE_EQ(p.c_plus(), 0.25);
  std::istringstream again(format_params(p));
  auto q = params_from_config(parse_key_values(again));
  EXPECT_EQ(q.a_plus(), p.a_plus());
  EXPECT_EQ(q.b_plus(), p.b_plus());
  EXPECT_EQ(q.c_plus(), p.c_plus());
}

TEST(Params, ConfigErrors) {
  std::istringstream bad("a_plus 1\n");
  EXPECT_EQ(code_of([&] { parse_key_values(bad); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { parse_list("1, x"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { load_params("/nonexistent/file.cfg"); }), ErrorCode::ConfigError);
}
