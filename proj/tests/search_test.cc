#include "wncs/search.h"

#include <cmath>

#include <gtest/gtest.h>

#include "wncs/error.h"

namespace wncs {
namespace {

TEST(BisectFirstTrueTest, FindsThreshold) {
  const double x = BisectFirstTrue([](double t) { return t >= 0.3; }, 0, 1, 1e-12);
  EXPECT_GE(x, 0.3);
  EXPECT_LT(x - 0.3, 1e-12);
  EXPECT_EQ(BisectFirstTrue([](double) { return true; }, 0.2, 1, 1e-9), 0.2);
  EXPECT_THROW(BisectFirstTrue([](double) { return true; }, 1, 0, 1e-9),
               InputError);
}

TEST(GoldenSectionTest, Quadratic) {
  const ScalarMinimum m =
      GoldenSection([](double x) { return (x - 1.7) * (x - 1.7); }, 0, 5, 1e-10);
  EXPECT_NEAR(m.x, 1.7, 1e-8);
  EXPECT_NEAR(m.f, 0.0, 1e-15);
}

TEST(LocalMinimumFromRightTest, NShapedCurve) {
  // f(x) = x³/3 - 2x² + 3x has f' = (x-1)(x-3): local minimum at 3.
  auto fp = [](double x) { return (x - 1.0) * (x - 3.0); };
  const auto x = LocalMinimumFromRight(fp, 0.0, 5.0, 1e-12);
  ASSERT_TRUE(x.has_value());
  EXPECT_NEAR(*x, 3.0, 1e-10);
}

TEST(LocalMinimumFromRightTest, NoMinimum) {
  EXPECT_FALSE(LocalMinimumFromRight([](double) { return 1.0; }, 0, 1, 1e-9));
  EXPECT_FALSE(LocalMinimumFromRight([](double) { return -1.0; }, 0, 1, 1e-9));
  EXPECT_FALSE(LocalMinimumFromRight([](double) { return 1.0; }, 1, 1, 1e-9));
}

}  // namespace
}  // namespace wncs
