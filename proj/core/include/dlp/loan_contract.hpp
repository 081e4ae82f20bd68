#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "dlp/market_model.hpp"
#include "dlp/rates.hpp"

namespace dlp {

/// Terms of a long-collateral loan: deposit 1 unit of collateral worth p0,
/// borrow theta0 * p0 of the numeraire, liquidation once the loan-to-value
/// reaches theta.
struct LoanTerms {
  double theta0 = 0.0;  ///< initial loan-to-value
  double theta = 0.0;   ///< liquidation loan-to-value
  double p0 = 0.0;      ///< collateral price at inception
  double horizon = 0.0; ///< years

  /// Throws ParameterError unless 0 <= theta0 < theta <= 1, p0 > 0, horizon > 0.
  void validate() const;

  /// theta0 / theta: the liquidation level of the scaled price.
  double barrier() const { return theta0 / theta; }

  /// Net capital to open the position, p0 (1 - theta0).
  double premium() const { return p0 * (1.0 - theta0); }
};

struct LiquidationResult {
  bool hit = false;
  std::size_t step_index = 0;  ///< meaningful only when hit

  /// First grid index at which the payoff is zero; path length when never hit.
  std::size_t alive_until(std::size_t n_points) const { return hit ? step_index : n_points; }
};

/// True when theta P_t e^{r_cE t} <= theta0 P0 e^{r_bD t}.
bool barrier_breached(double t, double p_t, const LoanTerms& terms, const RateSet& rates);

/// First grid time (discrete monitoring) with the barrier inequality true.
/// `path` must hold one price per grid point.
LiquidationResult liquidation_time(std::span<const double> path, const TimeGrid& grid,
                                   const LoanTerms& terms, const RateSet& rates);

/// Borrower payoff (P_t e^{r_cE t} - theta0 P0 e^{r_bD t}) while the position
/// is alive, zero afterwards.
double payoff(double t, double p_t, const LoanTerms& terms, const RateSet& rates,
              bool pre_barrier);

/// Value of the protocol's side before liquidation: collateral minus the
/// borrower's claim, theta0 P0 e^{r_bD t}. Independent of the price.
double protocol_covered_payoff(double t, const LoanTerms& terms, const RateSet& rates);

}  // namespace dlp
