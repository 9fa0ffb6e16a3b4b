#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sosbm/numerics.hpp"

using namespace sosbm;

// Standard normal upper tail at 2, tabulated independently of erfc.
constexpr double kQ2 = 0.022750131948179195;

TEST(Erfc, KnownValues) {
  EXPECT_EQ(sosbm::erfc(0.0), 1.0);
  EXPECT_NEAR(sosbm::erfc(std::sqrt(2.0)), 2.0 * kQ2, 1e-15);
  EXPECT_NEAR(sosbm::erfc(-1.0), 1.8427007929497148, 1e-15);
}

TEST(Erfc, MatchesSeriesForErf) {
  // erf(z) = 2/sqrt(pi) sum (-1)^k z^(2k+1) / (k! (2k+1)), fine for |z| <= 2
  for (double z : {0.1, 0.5, 1.0, 1.5, 2.0}) {
    double term = z, sum = z;
    for (int k = 1; k < 80; ++k) {
      term *= -z * z / k;
      sum += term / (2 * k + 1);
    }
    EXPECT_NEAR(sosbm::erfc(z), 1.0 - 2.0 / std::sqrt(kPi) * sum, 2e-15) << z;
  }
}

TEST(Erfc, ReflectionAndMonotone) {
  double prev = 2.0;
  for (double z = -6.0; z <= 6.0; z += 0.01) {
    EXPECT_NEAR(sosbm::erfc(z) + sosbm::erfc(-z), 2.0, 1e-15);
    EXPECT_LE(sosbm::erfc(z), prev);
    prev = sosbm::erfc(z);
  }
  EXPECT_EQ(sosbm::erfc(40.0), 0.0);
  EXPECT_TRUE(std::isnan(sosbm::erfc(NAN)));
}

TEST(Erfc, AgreesWithLibmToTightRelativeError) {
  for (double z = 0.0; z < 26.0; z += 0.037)
    EXPECT_NEAR(sosbm::erfc(z) / std::erfc(z), 1.0, 1e-13) << z;
}

TEST(ScaledErfc, KnownValues) {
  EXPECT_EQ(scaled_erfc(0.0), 1.0);
  EXPECT_NEAR(scaled_erfc(std::sqrt(2.0)), std::exp(2.0) * 2.0 * kQ2, 1e-14);
  EXPECT_NEAR(scaled_erfc(std::sqrt(2.0)), 0.336204, 1e-6);
  EXPECT_NEAR(scaled_erfc(100.0) * 100.0 * std::sqrt(kPi), 1.0, 1e-4);
}

TEST(ScaledErfc, LargeArgumentsFollowMillsExpansion) {
  for (double z : {30.0, 1e3, 1e6, 1e10}) {
    const double mills = 1.0 / (z * std::sqrt(kPi)) * (1.0 - 0.5 / (z * z) + 0.75 / std::pow(z, 4) - 1.875 / std::pow(z, 6));
    EXPECT_NEAR(scaled_erfc(z) / mills, 1.0, 1e-8) << z;
  }
  EXPECT_TRUE(std::isfinite(scaled_erfc(1e300)));
}

TEST(ScaledErfc, NegativeSide) {
  for (double z : {-0.5, -1.0, -3.0})
    EXPECT_NEAR(scaled_erfc(z), std::exp(z * z) * std::erfc(z), 1e-12 * std::exp(z * z));
}

TEST(Integrate, GaussianOverRealLine) {
  auto r = integrate([](double y) { return normal_pdf(y); }, -INFINITY, INFINITY);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0, 1e-10);
  auto half = integrate([](double y) { return normal_pdf(y); }, 0.0, INFINITY);
  EXPECT_NEAR(half.value, 0.5, 1e-12);
}

TEST(Integrate, BreakpointsHandleKinks) {
  const double bp[] = {0.3};
  auto r = integrate([](double y) { return std::fabs(y - 0.3); }, -1.0, 1.0, bp);
  EXPECT_NEAR(r.value, (1.3 * 1.3 + 0.7 * 0.7) / 2.0, 1e-13);
  auto rev = integrate([](double y) { return y; }, 1.0, 0.0);
  EXPECT_NEAR(rev.value, -0.5, 1e-15);
  EXPECT_EQ(integrate([](double) { return 1.0; }, 2.0, 2.0).value, 0.0);
}

TEST(Integrate, RejectsBadSpec) {
  QuadratureSpec spec;
  spec.abs_tol = 0.0;
  EXPECT_THROW(integrate([](double y) { return y; }, 0.0, 1.0, {}, spec), std::invalid_argument);
  EXPECT_THROW(integrate([](double y) { return y; }, NAN, 1.0), std::invalid_argument);
}

TEST(FindRoot, Examples) {
  EXPECT_NEAR(find_root([](double x) { return x - 0.5; }, 0.0, 1.0), 0.5, 1e-12);
  EXPECT_NEAR(find_root([](double x) { return normal_cdf(x) - 0.975; }, 0.0, 4.0), 1.959963984540054, 1e-10);
  EXPECT_NEAR(find_root([](double x) { return x * x * x; }, -1.0, 2.0), 0.0, 1e-6);
  EXPECT_THROW(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), std::invalid_argument);
}

TEST(NormalHelpers, Consistent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-8.0, 8.0);
  for (int i = 0; i < 200; ++i) {
    const double z = d(rng);
    EXPECT_NEAR(normal_cdf(z) + normal_sf(z), 1.0, 1e-15);
  }
}
