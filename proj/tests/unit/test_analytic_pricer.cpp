#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "dlp/analytic_pricer.hpp"
#include "dlp/errors.hpp"
#include "dlp/random.hpp"
#include "dlp/verification.hpp"
#include "oracles.hpp"

using namespace dlp;

TEST(NormalCdf, AgreesWithSeriesOracle) {
  for (double x = -8.0; x <= 8.0; x += 0.0625) {
    const double ref = static_cast<double>(oracle::normal_cdf(x));
    EXPECT_NEAR(norm_cdf(x), ref, 2e-16 + 1e-14 * ref) << "x=" << x;
  }
}

TEST(NormalCdf, Symmetry) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(g);
    EXPECT_LE(std::abs(norm_cdf(x) + norm_cdf(-x) - 1.0), 1e-14);
  }
}

TEST(Vanilla, Limits) {
  EXPECT_NEAR(vanilla_call(100.0, 1.0, 1e-9, 0.5), 100.0, 1e-8);
  EXPECT_NEAR(vanilla_call(1.0, 0.0, 0.83, 0.5), 0.17, 1e-15);
  EXPECT_NEAR(vanilla_call(1.0, 1e-14, 0.83, 0.5), 0.17, 1e-12);
}

TEST(Vanilla, AtTheMoneyAgainstMonteCarlo) {
  const double closed = vanilla_call(1.0, 1.0, 1.0, 0.5);
  const double ref = static_cast<double>(2.0L * oracle::normal_cdf(0.25L) - 1.0L);
  EXPECT_NEAR(closed, ref, 1e-14);
  EXPECT_NEAR(closed, 0.197413, 1e-6);

  NormalStream n(99);
  const std::size_t N = 10'000'000;
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double x = std::max(std::exp(-0.125 + 0.5 * n()) - 1.0, 0.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / N;
  const double se = std::sqrt((s2 / N - mean * mean) / N);
  EXPECT_LE(std::abs(mean - closed), 3.0 * se);
}

TEST(Digital, Values) {
  EXPECT_NEAR(digital_call(1.0, 1.0, 1e-12, 0.5), 1.0, 1e-12);
  EXPECT_NEAR(digital_call(1.0, 1.0, 1.0, 0.5), static_cast<double>(oracle::normal_cdf(-0.25L)),
              1e-15);
  EXPECT_NEAR(digital_call(1.0, 1.0, 1.0, 0.5), 0.401294, 1e-6);
  EXPECT_NEAR(digital_call(1.0, 1.0, 1e12, 0.5), 0.0, 1e-15);
  EXPECT_EQ(digital_call(1.2, 0.0, 1.0, 0.5), 1.0);
  EXPECT_EQ(digital_call(0.8, 0.0, 1.0, 0.5), 0.0);
}

TEST(Barrier, ClosedFormMatchesKilledDensityQuadrature) {
  for (const double sigma : {0.1, 0.3, 0.5, 0.8}) {
    for (const double T : {0.05, 0.2, 0.5, 1.0}) {
      const LoanTerms terms{0.83, 0.9, 1.0, T};
      const double ref = oracle::down_and_out_call_quadrature(0.83, 0.83 / 0.9, sigma, T);
      const auto q = down_and_out_price(terms, sigma);
      EXPECT_NEAR(q.value, ref, 1e-10) << "sigma=" << sigma << " T=" << T;
      EXPECT_NEAR(q.value_reflection, q.value, 1e-12);
    }
  }
}

TEST(Barrier, ZeroVolLimitIsPremium) {
  const LoanTerms terms{0.83, 0.9, 1.0, 1e-8};
  EXPECT_NEAR(down_and_out_price(terms, 0.5).value, 0.17, 1e-9);
}

TEST(Barrier, BelowPremiumAndMonotoneInHorizon) {
  double prev = 0.17;
  for (int i = 1; i <= 40; ++i) {
    const LoanTerms terms{0.83, 0.9, 1.0, i / 40.0};
    const double v = down_and_out_price(terms, 0.5).value;
    EXPECT_LT(v, 0.17);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }
}

TEST(Barrier, ScalesWithP0) {
  const double a = down_and_out_price({0.83, 0.9, 1.0, 0.3}, 0.4).value;
  const double b = down_and_out_price({0.83, 0.9, 3000.0, 0.3}, 0.4).value;
  EXPECT_NEAR(b, 3000.0 * a, 1e-10);
}

TEST(Barrier, Errors) {
  EXPECT_THROW(down_and_out_price({0.9, 0.83, 1.0, 1.0}, 0.5), ParameterError);
  EXPECT_THROW(down_and_out_price({0.83, 0.9, 1.0, 1.0}, 0.0), ParameterError);
  EXPECT_THROW(down_and_out_price({0.83, 0.9, 1.0, 0.0}, 0.5), ParameterError);
}

TEST(Barrier, BridgeOracleAtHalfYear) {
  const LoanTerms terms{0.83, 0.9, 1.0, 0.5};
  BridgeOracleConfig cfg;
  cfg.n_paths = 200'000;
  cfg.seed = 17;
  const McEstimate mc = barrier_price_oracle(terms, 0.5, cfg);
  const double v = down_and_out_price(terms, 0.5).value;
  EXPECT_LE(std::abs(mc.mean - v), 3.0 * mc.std_error) << mc.mean << " vs " << v;
}

TEST(Curve, CsvAndShape) {
  std::vector<double> hs;
  for (int i = 1; i <= 20; ++i) hs.push_back(i / 20.0);
  const auto curve = barrier_vs_premium_curve({0.83, 0.9, 1.0, 1.0}, 0.5, hs);
  ASSERT_EQ(curve.size(), 20u);
  for (const auto& p : curve) EXPECT_LT(p.european_price, p.premium);
  std::stringstream s;
  write_curve_csv(s, curve);
  std::string header;
  std::getline(s, header);
  EXPECT_EQ(header, "T,european_price,premium");
}

class Stopping : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const GbmParams q = risk_neutral_drift({0.0, 0.5, Scheme::ExactLognormal}, kRates);
    batch_ = new PathBatch(simulate_paths(q, TimeGrid::uniform(0.2, 73), 3000.0, 100'000, 31));
  }
  static void TearDownTestSuite() { delete batch_; }

  static inline const RateSet kRates{0.08, 0.08, 0.017, 0.017};
  static inline const LoanTerms kTerms{0.83, 0.9, 3000.0, 0.2};
  static inline PathBatch* batch_ = nullptr;
};

TEST_F(Stopping, StoppedProcessEqualsPremium) {
  const auto e = mc_stopped_value(*batch_, kTerms, kRates, StopAtBarrierOrHorizon{});
  EXPECT_LE(std::abs(e.mean - kTerms.premium()), 3.0 * e.std_error);
}

TEST_F(Stopping, ImmediateStopIsExact) {
  const auto e = mc_stopped_value(*batch_, kTerms, kRates, FixedTime{0.0});
  EXPECT_NEAR(e.mean, kTerms.premium(), 1e-9);
  EXPECT_NEAR(e.std_error, 0.0, 1e-9);
}

TEST_F(Stopping, RulesDoNotBeatPremium) {
  for (const StoppingRule& r : std::vector<StoppingRule>{FixedTime{0.1}, FixedTime{0.2},
                                                        FirstHitLevel{1.1}, FirstHitLevel{1.3}}) {
    const auto e = mc_stopped_value(*batch_, kTerms, kRates, r);
    EXPECT_LE(e.mean, kTerms.premium() + 3.0 * e.std_error);
  }
}

TEST_F(Stopping, HorizonWithIndicatorMatchesClosedForm) {
  // The estimator monitors the barrier daily; the closed form monitors it
  // continuously. The continuity correction moves the barrier down by
  // exp(-0.5826 sigma sqrt(dt)).
  const auto e = mc_stopped_value(*batch_, kTerms, kRates, FixedTime{0.2});
  const double shift = std::exp(0.5826 * 0.5 * std::sqrt(0.2 / 73));
  const LoanTerms shifted{0.83, 0.9 * shift, 3000.0, 0.2};
  const double closed = down_and_out_price(shifted, 0.5).value;
  EXPECT_LE(std::abs(e.mean - closed), 3.0 * e.std_error) << e.mean << " vs " << closed;
  EXPECT_GT(e.mean, down_and_out_price(kTerms, 0.5).value);
}

TEST_F(Stopping, SpreadIsContractViolation) {
  EXPECT_THROW(mc_stopped_value(*batch_, kTerms, RateSet::aave_2024_04(), FixedTime{0.1}),
               ContractViolation);
}

TEST(SampleMean, Basic) {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto e = sample_mean(x);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt((1.25 * 4 / 3.0) / 4.0), 1e-15);
  EXPECT_EQ(e.n, 4u);
}
