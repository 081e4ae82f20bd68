#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "dlp/analytic_pricer.hpp"
#include "dlp/errors.hpp"
#include "dlp/market_model.hpp"
#include "dlp/random.hpp"

using namespace dlp;

TEST(TimeGrid, UniformCoversHorizon) {
  const TimeGrid g = TimeGrid::uniform(0.2, 73);
  EXPECT_EQ(g.n_steps(), 73u);
  EXPECT_DOUBLE_EQ(g.dt(), 0.2 / 73);
  EXPECT_DOUBLE_EQ(g.time(0), 0.0);
  EXPECT_NEAR(g.horizon(), 0.2, 1e-15);
}

TEST(TimeGrid, RejectsBadInput) {
  EXPECT_THROW(TimeGrid(0.0, 10), ParameterError);
  EXPECT_THROW(TimeGrid(-1.0, 10), ParameterError);
}

TEST(Seeds, DeriveSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, {i}));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(42, {1, 2}), derive_seed(42, {1, 2}));
  EXPECT_NE(derive_seed(42, {1, 2}), derive_seed(42, {2, 1}));
  EXPECT_NE(derive_seed(42, {1}), derive_seed(43, {1}));
}

TEST(Seeds, NormalStreamMoments) {
  NormalStream n(5);
  double s = 0, s2 = 0;
  const int N = 400000;
  for (int i = 0; i < N; ++i) {
    const double x = n();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / N, 0.0, 4.0 / std::sqrt(N));
  EXPECT_NEAR(s2 / N, 1.0, 4.0 * std::sqrt(2.0 / N));
}

TEST(Simulate, ZeroVolatilityIsConstant) {
  const auto b = simulate_paths({0.0, 1e-12, Scheme::ExactLognormal}, TimeGrid::uniform(1.0, 50),
                                3000.0, 100, 1);
  for (std::size_t i = 0; i < b.n_paths(); ++i)
    for (const double p : b.path(i)) EXPECT_NEAR(p / 3000.0, 1.0, 1e-9);
}

TEST(Simulate, SameSeedIsBitIdentical) {
  const GbmParams g{0.1, 0.5, Scheme::ExactLognormal};
  const auto a = simulate_paths(g, TimeGrid::uniform(1.0, 20), 1.0, 500, 42);
  const auto b = simulate_paths(g, TimeGrid::uniform(1.0, 20), 1.0, 500, 42);
  EXPECT_TRUE(a == b);
  const auto c = simulate_paths(g, TimeGrid::uniform(1.0, 20), 1.0, 500, 43);
  EXPECT_FALSE(a == c);
}

TEST(Simulate, PathsDoNotDependOnBatchSize) {
  const GbmParams g{0.0, 0.3, Scheme::EulerMaruyama};
  const auto a = simulate_paths(g, TimeGrid::uniform(0.5, 10), 2.0, 10, 9);
  const auto b = simulate_paths(g, TimeGrid::uniform(0.5, 10), 2.0, 5000, 9);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t k = 0; k <= 10; ++k) EXPECT_EQ(a.at(i, k), b.at(i, k));
}

TEST(Simulate, DriftlessExactIsMartingale) {
  const std::size_t n = 1'000'000;
  const auto b = simulate_paths({0.0, 0.5, Scheme::ExactLognormal}, TimeGrid::uniform(1.0, 365),
                                1.0, n, 2024);
  std::vector<double> terminal(n);
  for (std::size_t i = 0; i < n; ++i) terminal[i] = b.at(i, 365);
  const McEstimate e = sample_mean(terminal);
  EXPECT_LE(std::abs(e.mean - 1.0), 3.0 * e.std_error) << e.mean << " +- " << e.std_error;
}

TEST(Simulate, RiskNeutralDiscountedPriceIsMartingale) {
  const RateSet r = RateSet::aave_2024_04();
  const GbmParams q = risk_neutral_drift({0.3, 0.5, Scheme::ExactLognormal}, r);
  const std::size_t n = 100'000;
  const auto grid = TimeGrid::uniform(0.2, 73);
  const auto b = simulate_paths(q, grid, 3000.0, n, 77);
  std::vector<double> x(n);
  for (std::size_t k = 0; k <= grid.n_steps(); ++k) {
    const double f = std::exp((r.r_cE - r.r_cD) * grid.time(k)) / 3000.0;
    for (std::size_t i = 0; i < n; ++i) x[i] = b.at(i, k) * f;
    const McEstimate e = sample_mean(x);
    if (k == 0) {
      EXPECT_DOUBLE_EQ(e.mean, 1.0);
    } else {
      EXPECT_LE(std::abs(e.mean - 1.0), 4.0 * e.std_error) << "k=" << k;
    }
  }
}

TEST(Simulate, EulerBiasShrinksWithStep) {
  // The Euler mean of P_T is p0 (1 + mu dt)^n exactly; compare its gap to the
  // exact-scheme mean p0 e^{mu T} as dt halves.
  const double mu = 0.5, T = 1.0;
  auto euler_mean = [&](std::size_t n) {
    const auto b = simulate_paths({mu, 0.2, Scheme::EulerMaruyama}, TimeGrid::uniform(T, n), 1.0,
                                  200000, 3);
    double s = 0;
    for (std::size_t i = 0; i < b.n_paths(); ++i) s += b.at(i, n);
    return s / static_cast<double>(b.n_paths());
  };
  const double exact = std::exp(mu * T);
  const double e4 = std::abs(std::pow(1 + mu * T / 4, 4) - exact);
  const double e8 = std::abs(std::pow(1 + mu * T / 8, 8) - exact);
  EXPECT_NEAR(e4 / e8, 2.0, 0.3);
  EXPECT_NEAR(euler_mean(4), std::pow(1 + mu * T / 4, 4), 0.01);
  EXPECT_NEAR(euler_mean(8), std::pow(1 + mu * T / 8, 8), 0.01);
}

TEST(Simulate, RejectsBadParameters) {
  const auto g = TimeGrid::uniform(1.0, 4);
  EXPECT_THROW(simulate_paths({0.0, 0.0, Scheme::ExactLognormal}, g, 1.0, 10, 1), ParameterError);
  EXPECT_THROW(simulate_paths({0.0, -0.2, Scheme::ExactLognormal}, g, 1.0, 10, 1), ParameterError);
  EXPECT_THROW(simulate_paths({0.0, 0.2, Scheme::ExactLognormal}, g, 0.0, 10, 1), ParameterError);
}

TEST(Measure, RiskNeutralDrift) {
  EXPECT_DOUBLE_EQ(risk_neutral_drift({0.4, 0.5, Scheme::ExactLognormal}, {}).mu, 0.0);
  EXPECT_NEAR(risk_neutral_drift({0.4, 0.5, Scheme::ExactLognormal}, RateSet::aave_2024_04()).mu,
              0.063, 1e-15);
  EXPECT_NEAR(market_price_of_risk({0.3, 0.5, Scheme::ExactLognormal}, RateSet::aave_2024_04()).nu,
              0.474, 1e-14);
}

TEST(Dump, BinaryRoundTripAndCsvShape) {
  const auto b = simulate_paths({0.0, 0.4, Scheme::ExactLognormal}, TimeGrid::uniform(0.1, 5), 7.0,
                                3, 11);
  std::stringstream bin;
  write_binary(bin, b);
  EXPECT_TRUE(read_binary(bin) == b);

  std::stringstream csv;
  write_csv(csv, b);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("path,0,", 0), 0u);
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Dump, RejectsCorruptBinary) {
  std::stringstream s("NOTAPATH");
  EXPECT_THROW(read_binary(s), ParameterError);
}
