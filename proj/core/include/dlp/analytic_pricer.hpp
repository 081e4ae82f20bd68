#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "dlp/loan_contract.hpp"
#include "dlp/market_model.hpp"
#include "dlp/rates.hpp"

namespace dlp {

/// Standard normal CDF via the complementary error function.
double norm_cdf(double x);

/// Zero-rate, zero-dividend call S N(d1) - E N(d2). T = 0 returns the intrinsic value.
double vanilla_call(double spot, double T, double strike, double sigma);

/// Zero-rate cash-or-nothing call N(d2). T = 0 returns the indicator spot > strike.
double digital_call(double spot, double T, double strike, double sigma);

/// Closed-form price of the loan held to the horizon when there is no rate
/// spread: a down-and-out call on the scaled price S (S_0 = 1, driftless under
/// the martingale measure) with strike theta0 and barrier B = theta0/theta > theta0.
struct BarrierCallQuote {
  struct Components {
    double vanilla_spot = 0.0;        ///< C_v(1, T, B)
    double digital_spot = 0.0;        ///< C_d(1, T, B)
    double vanilla_reflected = 0.0;   ///< C_v(B^2, T, B)
    double digital_reflected = 0.0;   ///< C_d(B^2, T, B)
  };

  double value = 0.0;        ///< simplified closed form, numeraire units
  double value_reflection = 0.0;  ///< the four-term reflection form, numeraire units
  double d1_bar = 0.0;
  double d2_bar = 0.0;
  double d1_hat = 0.0;
  double d2_hat = 0.0;
  Components components;
};

/// Throws ParameterError unless 0 < theta0 < theta < 1 and sigma, horizon > 0.
/// Throws NumericError if the two algebraic forms disagree beyond 1e-12 relative.
BarrierCallQuote down_and_out_price(const LoanTerms& terms, double sigma);

struct FixedTime {
  double t = 0.0;  ///< stops at the first grid time >= t (clamped to the horizon)
};
struct FirstHitLevel {
  double level = 1.0;  ///< stops once the discounted, dividend-adjusted price P_t e^{(r_cE - r_cD) t} / P0 >= level
};
struct StopAtBarrierOrHorizon {};  ///< the stopped process: no barrier indicator

using StoppingRule = std::variant<FixedTime, FirstHitLevel, StopAtBarrierOrHorizon>;

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Monte Carlo estimate of E^Q[e^{-r_cD tau} (P_tau e^{r_cE tau} - theta0 P0 e^{r_cD tau}) 1{tau < tau_B}]
/// for the given rule. The batch must be simulated under the martingale drift.
/// Throws ContractViolation when `rates` carries a spread.
McEstimate mc_stopped_value(const PathBatch& batch, const LoanTerms& terms, const RateSet& rates,
                            const StoppingRule& rule);

/// Mean and standard error of i.i.d. samples (two-pass, compensated).
McEstimate sample_mean(std::span<const double> samples);

struct BarrierCurvePoint {
  double horizon = 0.0;
  double european_price = 0.0;
  double premium = 0.0;
};

/// Held-to-horizon price against the premium for each horizon in `horizons`.
std::vector<BarrierCurvePoint> barrier_vs_premium_curve(const LoanTerms& terms, double sigma,
                                                        std::span<const double> horizons);

/// CSV with columns T,european_price,premium.
void write_curve_csv(std::ostream& out, std::span<const BarrierCurvePoint> curve);

}  // namespace dlp
