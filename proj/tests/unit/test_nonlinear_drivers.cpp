#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dlp/loan_contract.hpp"
#include "dlp/nonlinear_drivers.hpp"
#include "dlp/wealth_engine.hpp"

using namespace dlp;

namespace {

const RateSet kAave = RateSet::aave_2024_04();

DriverInput in(double y, double z, double sigma, RateSet r = kAave) { return {0.1, y, z, sigma, r}; }

}  // namespace

TEST(DriverF, Examples) {
  EXPECT_EQ(driver_f(in(0, 0, 0.5), 0.2), 0.0);
  const RateSet flat{0.08, 0.08, 0.017, 0.017};
  EXPECT_NEAR(driver_f(in(1.3, 0.4, 0.5, flat), 0.08 - 0.017), 0.08 * 1.3, 1e-15);
  // y=1, z=0.5, sigma=0.5: z/sigma = 1, y - z/sigma = 0, z > 0.
  // 0.08 - 0 + (0.017 - 0.08 + 0) * 1 - 0 = 0.017.
  EXPECT_NEAR(driver_f(in(1.0, 0.5, 0.5), 0.0), 0.017, 1e-15);
  // y=1, z=2, sigma=0.5: y - z/sigma = -3, so the borrow spread applies to 3.
  EXPECT_NEAR(driver_f(in(1.0, 2.0, 0.5), 0.0), 0.08 - 0.04 * 3 + (0.017 - 0.08) * 4, 1e-15);
}

TEST(DriverG, Examples) {
  EXPECT_NEAR(driver_g(in(2.0, 0.5, 0.5)), -0.08 * 2.0, 1e-15);
  const RateSet flat{0.08, 0.08, 0.017, 0.017};
  EXPECT_NEAR(driver_g(in(-1.0, -3.0, 0.3, flat)), 0.08, 1e-15);
  // (y, z) = (1, -0.2), sigma = 0.5: y - z/sigma = 1.4 > 0, z^- = 0.2.
  EXPECT_NEAR(driver_g(in(1.0, -0.2, 0.5)), -0.08 + 0.008 / 0.5 * 0.2, 1e-15);
  EXPECT_NEAR(driver_g(in(1.0, -0.2, 0.5)), -0.0768, 1e-15);
}

TEST(DriverGBar, Examples) {
  const RateSet flat{0.08, 0.08, 0.017, 0.017};
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int n = 0; n < 1000; ++n) EXPECT_EQ(driver_g_bar(in(u(g), u(g), 0.4, flat)), 0.0);
  // y = 0, z = -sigma: y - z/sigma = 1 is positive, so only the collateral
  // spread term survives.
  const double s = 0.5;
  EXPECT_NEAR(driver_g_bar(in(0.0, -s, s)), kAave.r_bE - kAave.r_cE, 1e-15);
}

TEST(Drivers, PositiveHomogeneity) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(-2, 2), us(0.05, 1.5), ur(0.0, 0.2);
  for (int n = 0; n < 10000; ++n) {
    const double cD = ur(g), cE = ur(g);
    const RateSet r{cD + ur(g), cD, cE + ur(g), cE};
    const DriverInput x = in(u(g), u(g), us(g), r);
    for (const double a : {0.5, 1.0, 2.0, 7.3}) {
      DriverInput y = x;
      y.y *= a;
      y.z *= a;
      const double g1 = driver_g(y), g0 = driver_g(x);
      const double b1 = driver_g_bar(y), b0 = driver_g_bar(x);
      // Relative to the size of the individual terms, which bounds the
      // rounding of a sum that may cancel.
      const double scale = a * (std::abs(x.y) + std::abs(x.z) / x.sigma_t) * 0.4;
      ASSERT_LE(std::abs(g1 - a * g0), 1e-12 * std::max(std::abs(a * g0), scale));
      ASSERT_LE(std::abs(b1 - a * b0), 1e-12 * std::max(std::abs(a * b0), scale));
    }
  }
}

TEST(Drivers, FIsMinusGUnderMartingaleDrift) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n = 0; n < 1000; ++n) {
    const DriverInput x = in(u(g), u(g), 0.4);
    EXPECT_NEAR(driver_f(x, kAave.r_cD - kAave.r_cE), -driver_g(x), 1e-15);
  }
}

TEST(Drivers, WealthStepConsistency) {
  // With dp = mu p dt, wealth_step - v = f dt + O(dt^2) for z = pi p sigma.
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> u(-2, 2);
  const double mu = 0.3, sigma = 0.5;
  for (int n = 0; n < 200; ++n) {
    const double v = u(g), pi = u(g), p = 1.0 + 0.3 * u(g);
    const double f = driver_f({0.0, v, pi * p * sigma, sigma, kAave}, mu);
    auto residual = [&](double dt) {
      return wealth_step(v, pi, p, mu * p * dt, kAave, dt) - v - f * dt;
    };
    const double r1 = residual(1e-2), r2 = residual(5e-3);
    if (std::abs(r1) < 1e-14) continue;
    EXPECT_NEAR(std::log2(r1 / r2), 2.0, 0.05);
  }
}

TEST(Scaling, RoundTripAndBarrier) {
  const LoanTerms terms{0.83, 0.9, 3000.0, 0.2};
  const ScaledState s0 = scale_state(3000.0, 510.0, 10.0, 0.0, terms, kAave);
  EXPECT_DOUBLE_EQ(s0.S, 1.0);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.3, 2.0), ut(0.0, 1.0);
  for (int n = 0; n < 10000; ++n) {
    const double p = 3000.0 * u(g), v = 1000.0 * (u(g) - 1), z = 500.0 * (u(g) - 1), t = ut(g);
    const ScaledState s = scale_state(p, v, z, t, terms, kAave);
    const UnscaledState back = unscale_state(s, t, terms, kAave);
    ASSERT_NEAR(back.price, p, 1e-14 * p);
    ASSERT_NEAR(back.wealth, v, 1e-14 * std::abs(v) + 1e-300);
    ASSERT_NEAR(back.loading, z, 1e-14 * std::abs(z) + 1e-300);
    const double near = 3000.0 * 0.83 / 0.9 * std::exp((kAave.r_bD - kAave.r_cE) * t);
    for (const double q : {p, near * (1 + 1e-9), near * (1 - 1e-9)}) {
      ASSERT_EQ(scaled_barrier_breached(scale_state(q, v, z, t, terms, kAave), terms),
                barrier_breached(t, q, terms, kAave));
    }
  }
}
