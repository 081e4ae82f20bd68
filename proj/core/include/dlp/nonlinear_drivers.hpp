#pragma once

#include "dlp/loan_contract.hpp"
#include "dlp/rates.hpp"

namespace dlp {

// Generators of the wealth/value backward equation when borrow and supply
// rates differ. Formula evaluators only.

struct DriverInput {
  double t = 0.0;
  double y = 0.0;        ///< wealth-like value
  double z = 0.0;        ///< volatility loading pi P sigma
  double sigma_t = 0.0;  ///< > 0
  RateSet rates;
};

/// Physical-measure drift of the wealth:
/// r_cD y - (r_bD - r_cD)(y - z/sigma)^- + (r_cE - r_cD + mu) z/sigma - (r_bE - r_cE)/sigma z^-.
double driver_f(const DriverInput& in, double mu_t);

/// Driver after removing the drift: -r_cD y + (r_bD - r_cD)(y - z/sigma)^- + (r_bE - r_cE)/sigma z^-.
double driver_g(const DriverInput& in);

/// Driver of the scaled problem: (r_bD - r_cD) y + (r_bD - r_cD)(y - z/sigma)^- + (r_bE - r_cE)/sigma z^-.
double driver_g_bar(const DriverInput& in);

struct ScaledState {
  double S = 0.0;  ///< P e^{(r_cE - r_bD) t} / P0
  double V = 0.0;  ///< V e^{-r_bD t} / P0
  double Z = 0.0;  ///< Z e^{-r_bD t} / P0
};

struct UnscaledState {
  double price = 0.0;
  double wealth = 0.0;
  double loading = 0.0;
};

ScaledState scale_state(double p_t, double v, double z, double t, const LoanTerms& terms,
                        const RateSet& rates);
UnscaledState unscale_state(const ScaledState& s, double t, const LoanTerms& terms,
                            const RateSet& rates);

/// Liquidation condition in scaled coordinates: S <= theta0 / theta.
bool scaled_barrier_breached(const ScaledState& s, const LoanTerms& terms);

}  // namespace dlp
