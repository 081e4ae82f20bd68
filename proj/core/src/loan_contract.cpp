#include "dlp/loan_contract.hpp"

#include <cmath>

#include "dlp/errors.hpp"

namespace dlp {

void LoanTerms::validate() const {
  if (!(theta0 >= 0.0 && theta0 < theta && theta <= 1.0)) {
    throw ParameterError("LoanTerms: require 0 <= theta0 < theta <= 1");
  }
  if (!(p0 > 0.0) || !std::isfinite(p0)) {
    throw ParameterError("LoanTerms: p0 must be positive");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ParameterError("LoanTerms: horizon must be positive");
  }
}

bool barrier_breached(double t, double p_t, const LoanTerms& terms, const RateSet& rates) {
  return terms.theta * p_t * std::exp(rates.r_cE * t) <=
         terms.theta0 * terms.p0 * std::exp(rates.r_bD * t);
}

LiquidationResult liquidation_time(std::span<const double> path, const TimeGrid& grid,
                                   const LoanTerms& terms, const RateSet& rates) {
  if (path.empty()) throw ParameterError("liquidation_time: empty path");
  if (path.size() > grid.n_steps() + 1) {
    throw ParameterError("liquidation_time: path longer than the grid");
  }
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (barrier_breached(grid.time(k), path[k], terms, rates)) {
      return {true, k};
    }
  }
  return {false, 0};
}

double payoff(double t, double p_t, const LoanTerms& terms, const RateSet& rates,
              bool pre_barrier) {
  if (!pre_barrier) return 0.0;
  return p_t * std::exp(rates.r_cE * t) - terms.theta0 * terms.p0 * std::exp(rates.r_bD * t);
}

double protocol_covered_payoff(double t, const LoanTerms& terms, const RateSet& rates) {
  return terms.theta0 * terms.p0 * std::exp(rates.r_bD * t);
}

}  // namespace dlp
