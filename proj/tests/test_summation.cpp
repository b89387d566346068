#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "erw/errors.hpp"
#include "erw/summation.hpp"
#include "support/generators.hpp"

namespace erw {
namespace {

TEST(CompensatedSum, RecoversCancelledLowBits) {
  CompensatedSum<double> s;
  s += 1.0;
  for (int i = 0; i < 1000; ++i) s += 1e-16;
  s += -1.0;
  // A plain double sum returns 0 or 2.2e-13 here.
  EXPECT_NEAR(s.value(), 1e-13, 1e-24);
}

TEST(ExactSum, IsExactOnCancellingInput) {
  ExactSum s;
  s += 1e300;
  s += 1.0;
  s += -1e300;
  s += 0x1.0p-1074;
  EXPECT_EQ(s.value(), 1.0);
  ExactSum tiny;
  tiny += 0x1.0p-1074;
  tiny += 0x1.0p-1074;
  EXPECT_EQ(tiny.value(), 0x1.0p-1073);
}

TEST(ExactSum, RejectsNonFinite) {
  ExactSum s;
  EXPECT_THROW(s += std::numeric_limits<double>::infinity(), DomainError);
  EXPECT_THROW(s += std::nan(""), DomainError);
}

TEST(ExactSum, OrderIndependent) {
  testing::Gen gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xs(500);
    for (auto& x : xs) x = gen.real(-1.0, 1.0) * std::pow(10.0, gen.real(-20.0, 20.0));
    ExactSum forward, backward, split_a, split_b;
    for (double x : xs) forward += x;
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) backward += *it;
    const auto cut = static_cast<std::size_t>(gen.integer(0, 500));
    for (std::size_t i = 0; i < cut; ++i) split_a += xs[i];
    for (std::size_t i = cut; i < xs.size(); ++i) split_b += xs[i];
    split_b += split_a;
    EXPECT_TRUE(forward == backward);
    EXPECT_TRUE(forward == split_b);
    EXPECT_EQ(forward.value(), backward.value());
    EXPECT_EQ(forward.value(), split_b.value());
  }
}

TEST(ExactSum, CorrectlyRoundedAgainstIntegerOracle) {
  // Integers below 2^40: the exact total fits in an int64.
  testing::Gen gen(8);
  ExactSum s;
  std::int64_t exact = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto v = gen.integer(-(std::int64_t{1} << 40), std::int64_t{1} << 40);
    exact += v;
    s += static_cast<double>(v);
  }
  EXPECT_EQ(s.value(), static_cast<double>(exact));
}

}  // namespace
}  // namespace erw
