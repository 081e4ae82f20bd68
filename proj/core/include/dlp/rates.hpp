#pragma once

namespace dlp {

/// Annualized borrow/supply rates for the debt asset (USDC, "D") and the
/// collateral asset (ETH, "E"). Continuously compounded where used in the
/// payoff, simple per step inside the wealth recursion.
struct RateSet {
  double r_bD = 0.0;  ///< USDC borrow
  double r_cD = 0.0;  ///< USDC supply
  double r_bE = 0.0;  ///< ETH borrow
  double r_cE = 0.0;  ///< ETH supply

  /// Throws ParameterError unless r_bD >= r_cD >= 0 and r_bE >= r_cE >= 0.
  void validate() const;

  bool has_spread() const { return r_bD != r_cD || r_bE != r_cE; }

  /// Borrow = supply + spread on both assets.
  static RateSet with_spread(double r_cD, double r_cE, double spread);

  /// The rates of a live Aave market quoted on 2024-04-01.
  static RateSet aave_2024_04();

  bool operator==(const RateSet&) const = default;
};

}  // namespace dlp
