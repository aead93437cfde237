// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "lbgm/numerics.hpp"

using namespace lbgm;

TEST(Dot, SelfInnerProduct) { EXPECT_EQ(dot({1, 2, 3}, {1, 2, 3}), 14.0); }

TEST(Dot, Orthogonal) { EXPECT_EQ(dot({1, 0}, {0, 1}), 0.0); }

TEST(Dot, HandArithmetic) { EXPECT_EQ(dot({1, 2}, {3, -1}), 1.0); }

TEST(Dot, DimensionMismatchThrows) { EXPECT_THROW(dot({1, 2}, {1, 2, 3}), std::invalid_argument); }

TEST(NormSq, Examples) {
  EXPECT_EQ(norm_sq({0, 0, 0}), 0.0);
  EXPECT_EQ(norm_sq({3, 4}), 25.0);
  EXPECT_EQ(norm_sq({1, 1, 1, 1}), 4.0);
  EXPECT_EQ(norm({3, 4}), 5.0);
}

TEST(CosineSim, Examples) {
  EXPECT_EQ(cosine_sim({2, 0}, {5, 0}), 1.0);
  EXPECT_EQ(cosine_sim({1, 0}, {0, 3}), 0.0);
  EXPECT_DOUBLE_EQ(cosine_sim({1, 1}, {1, 0}), 0.7071067811865475);
}

TEST(CosineSim, ZeroNormThrows) {
  EXPECT_THROW(cosine_sim({0, 0}, {1, 0}), std::domain_error);
  EXPECT_THROW(cosine_sim({1, 0}, {0, 0}), std::domain_error);
}

TEST(Axpy, Examples) {
  const ParamVector x{1.5, -2.25};
  const ParamVector y{7, 9};
  EXPECT_TRUE(bit_equal(axpy(0, x, y), y));
  EXPECT_EQ(axpy(1, {1, 1}, {2, 2}), ParamVector({3, 3}));
  EXPECT_EQ(axpy(-0.5, {2, 4}, {1, 1}), ParamVector({0, -1}));
  EXPECT_THROW(axpy(1, {1}, {1, 2}), std::invalid_argument);
}

TEST(ParamVector, RejectsNonFinite) {
  EXPECT_THROW(ParamVector({1.0, std::numeric_limits<double>::quiet_NaN()}), std::domain_error);
  EXPECT_THROW(ParamVector({std::numeric_limits<double>::infinity()}), std::domain_error);
}

TEST(ParamVector, OverflowingOperationThrows) {
  const double big = std::numeric_limits<double>::max();
  EXPECT_THROW(axpy(1.0, {big}, {big}), std::domain_error);
}

TEST(ParamVector, ZeroConstructed) {
  const ParamVector v(4);
  EXPECT_EQ(v.dim(), 4u);
  EXPECT_TRUE(v.is_zero());
}

class NumericsProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(NumericsProperty, CosineOfSelfIsExactlyOne) {
  RngStream rng(GetParam(), 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 1 + static_cast<std::size_t>(rng.uniform(0, 50));
    ParamVector a(dim);
    for (std::size_t i = 0; i < dim; ++i) a[i] = rng.normal(0, std::pow(10.0, rng.uniform(-8, 8)));
    if (a.is_zero()) continue;
    EXPECT_EQ(cosine_sim(a, a), 1.0);
  }
}

TEST_P(NumericsProperty, CosineBounded) {
  RngStream rng(GetParam(), 1);
  for (int trial = 0; trial < 200; ++trial) {
    ParamVector a(8);
    ParamVector b(8);
    for (std::size_t i = 0; i < 8; ++i) {
      a[i] = rng.normal();
      b[i] = trial % 2 ? -3.0 * a[i] : rng.normal();
    }
    const double c = cosine_sim(a, b);
    EXPECT_LE(std::abs(c), 1.0);
  }
}

TEST_P(NumericsProperty, DotIsBilinear) {
  RngStream rng(GetParam(), 2);
  for (int trial = 0; trial < 200; ++trial) {
    ParamVector a(16);
    ParamVector b(16);
    for (std::size_t i = 0; i < 16; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
    }
    const double alpha = rng.uniform(-10, 10);
    const double lhs = dot(scale(alpha, a), b);
    const double rhs = alpha * dot(a, b);
    const double mag = std::abs(alpha) * norm(a) * norm(b);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * mag);
  }
}

TEST_P(NumericsProperty, StreamsReproduce) {
  RngStream a(GetParam(), 5);
  RngStream b(GetParam(), 5);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

INSTANTIATE_TEST_SUITE_P(Seeds, NumericsProperty, ::testing::Values(0u, 1u, 42u));

TEST(RngStream, DistinctStreamsDiffer) {
  RngStream a(7, 0);
  RngStream b(7, 1);
  RngStream c(8, 0);
  int same_ab = 0;
  int same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    same_ab += x == b();
    same_ac += x == c();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(RngStream, SampleWithoutReplacement) {
  RngStream rng(3, 0);
  const auto s = rng.sample_without_replacement(10, 5);
  ASSERT_EQ(s.size(), 5u);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 5u);
  for (auto i : s) EXPECT_LT(i, 10u);
  EXPECT_THROW(rng.sample_without_replacement(3, 4), std::invalid_argument);
}
