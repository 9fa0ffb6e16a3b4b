#include <gtest/gtest.h>

#include <cmath>

#include "sosbm/kernel.hpp"

using namespace sosbm;

// e^2 erfc(sqrt 2), with erfc(sqrt 2) = 2 Q(2) from a normal table
const double kAtom = std::exp(2.0) * 2.0 * 0.022750131948179195;

TEST(Kernel, U1U2Examples) {
  EXPECT_NEAR(u1(1, 0, 0), 0.3989423, 1e-7);
  EXPECT_NEAR(u1(1, -1, 1), std::exp(-2.0) / std::sqrt(2 * kPi), 1e-15);
  EXPECT_NEAR(u1(4, 0, 2), u1(1, 0, 1) / 2, 1e-15);
  EXPECT_NEAR(u2(1, 1, 1), 0.0539910, 1e-7);
  EXPECT_THROW(u1(0, 0, 0), NonPositiveTime);
}

TEST(Kernel, VRhoExamples) {
  EXPECT_DOUBLE_EQ(v_rho(0.0, 1, 1, 1), u2(1, 1, 1));
  EXPECT_NEAR(v_rho(1.0, 1, 0, 0), kAtom, 1e-7);
  EXPECT_NEAR(v_rho(1e-6, 1, 0.5, 0.5), u2(1, 0.5, 0.5), 1e-4);
  EXPECT_THROW(v_rho(-1.0, 1, 0, 0), std::invalid_argument);
  // no overflow for tiny stickiness far from 0
  EXPECT_TRUE(std::isfinite(v_rho(1e-12, 0.01, 3, 3)));
}

TEST(Kernel, TransitionDensityExamples) {
  EXPECT_NEAR(transition_density({0, 0}, 1, 0, 0), 0.3989423, 1e-7);
  EXPECT_NEAR(transition_density({0, 0.5}, 1, -1, 1), 0.0539910, 1e-7);
  EXPECT_EQ(transition_density({1, 0.3}, 1, -0.5, 0.7), v_rho(1, 1, -0.5, 0.7));
  EXPECT_THROW(transition_density({0, 1.0}, 1, 0, 0), ReflectionUnsupported);
}

TEST(Kernel, SymmetricWithRespectToSpeedMeasure) {
  for (double beta : {-0.7, 0.0, 0.4})
    for (double x : {-1.3, 0.0, 0.4})
      for (double y : {-0.2, 0.0, 2.0})
        EXPECT_NEAR(transition_density({0.7, beta}, 0.8, x, y), transition_density({0.7, beta}, 0.8, y, x), 1e-15);
}

TEST(Kernel, AtomProbability) {
  EXPECT_EQ(atom_probability({0, 0.3}, 2.0, 0.4), 0.0);
  EXPECT_NEAR(atom_probability({1, 0}, 1, 0), kAtom, 1e-7);
  double mass = atom_probability({1, 0}, 1, 0) +
                integrate([](double y) { return continuous_density({1, 0}, 1, 0, y); }, -INFINITY, INFINITY,
                          std::vector<double>{0.0})
                    .value;
  EXPECT_NEAR(mass, 1.0, 1e-8);
}

TEST(Kernel, CdfExamples) {
  EXPECT_NEAR(transition_cdf({0, 0}, 1, 0, 0), 0.5, 1e-15);
  EXPECT_NEAR(transition_cdf({0.3, 0.2}, 1, 0.1, 60), 1.0, 1e-15);
  EXPECT_NEAR(transition_cdf({1, 0}, 1, 0, 0) - transition_cdf_left({1, 0}, 1, 0, 0), kAtom, 1e-7);
}

TEST(Kernel, CdfMatchesQuadratureOfDensity) {
  const SkewStickyParams p{0.5, -0.4};
  for (double x : {-1.0, 0.0, 0.8})
    for (double y : {-2.0, -0.3, 0.5, 1.7}) {
      const double q = integrate([&](double z) { return continuous_density(p, 0.7, x, z); }, -INFINITY, y,
                                 std::vector<double>{0.0, x})
                           .value;
      const double expected = q + (y >= 0.0 ? atom_probability(p, 0.7, x) : 0.0);
      EXPECT_NEAR(transition_cdf(p, 0.7, x, y), expected, 1e-10) << x << ' ' << y;
    }
}

TEST(Kernel, QuantileInvertsCdf) {
  const SkewStickyParams p{1, 0.5};
  for (double u : {0.01, 0.2, 0.45, 0.9, 0.999}) {
    const double y = transition_quantile(p, 1, -1, u);
    if (y == 0.0) {
      EXPECT_LE(transition_cdf_left(p, 1, -1, 0), u);
      EXPECT_GE(transition_cdf(p, 1, -1, 0), u);
    } else {
      EXPECT_NEAR(transition_cdf(p, 1, -1, y), u, 1e-12);
    }
  }
  EXPECT_THROW(transition_quantile(p, 1, 0, 1.0), std::invalid_argument);
}

TEST(Semigroup, Examples) {
  const SkewStickyParams p{1, 0.3};
  for (double x : {-2.0, 0.0, 1.5}) EXPECT_NEAR(semigroup_apply(p, 1.0, [](double) { return 1.0; }, x), 1.0, 1e-8);
  EXPECT_NEAR(semigroup_apply({1, 0}, 1.0, [](double y) { return y == 0.0 ? 1.0 : 0.0; }, 0.0), kAtom, 1e-7);
  EXPECT_NEAR(semigroup_apply({0, 0}, 1.0, [](double y) { return y; }, 2.0), 2.0, 1e-8);
  EXPECT_EQ(semigroup_apply(p, 1.0, [](double) { return 0.0; }, 0.3), 0.0);
}

TEST(Semigroup, GammaNClosedForm) {
  // Standard BM from 0, h = 1_[0,1] at scale sqrt(n): P_{i-1} h(0) = Phi(1/sqrt(i-1)) - 1/2.
  const auto h = [](double y) { return y >= 0.0 && y <= 1.0 ? 1.0 : 0.0; };
  const double brk[] = {1.0};
  double expected = 0.0;
  for (int i = 2; i <= 4; ++i) expected += normal_cdf(1.0 / std::sqrt(i - 1.0)) - 0.5;
  EXPECT_NEAR(gamma_n({0, 0}, h, 4, 1.0, 0.0, brk), expected, 1e-9);
  EXPECT_EQ(gamma_n({1, 0}, [](double) { return 0.0; }, 10, 1.0, 0.0), 0.0);
}

TEST(Kernel, ContinuityAsStickinessVanishes) {
  double prev = INFINITY;
  for (double rho : {1.0, 0.1, 0.01, 0.001}) {
    double worst = 0.0;
    for (double x : {-1.0, 0.0, 0.5})
      for (double y : {-0.5, 0.0, 1.0})
        worst = std::max(worst, std::fabs(transition_density({rho, 0.2}, 1, x, y) -
                                          transition_density({0, 0.2}, 1, x, y)));
    EXPECT_LT(worst, prev);
    prev = worst;
  }
}

TEST(JointLaw, MassAndLocalTimeMean) {
  // rho = beta = 0 from 0: E L = sqrt(2/pi), E O+ = 1/2 (the non-hitting part is empty).
  const SkewStickyParams p{0, 0};
  const double t = 1.0;
  auto over = [&](auto&& f) {
    return integrate(
               [&](double l) {
                 return integrate(
                            [&](double o) {
                              return integrate([&](double y) { return f(y, l, o) * joint_density(p, t, 0.0, {y, l, o}); },
                                               -INFINITY, INFINITY, std::vector<double>{0.0})
                                  .value;
                            },
                            0.0, t)
                     .value;
               },
               0.0, 12.0)
        .value;
  };
  EXPECT_NEAR(over([](double, double, double) { return 1.0; }), 1.0, 1e-6);
  EXPECT_NEAR(over([](double, double l, double) { return l; }), std::sqrt(2.0 / kPi), 1e-6);
  EXPECT_NEAR(over([](double, double, double o) { return o; }), 0.5, 1e-6);
}
