#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "dlp/loan_contract.hpp"
#include "dlp/market_model.hpp"
#include "dlp/rates.hpp"
#include "dlp/strategy.hpp"

namespace dlp {

/// Flat fee per rebalance. Hard mode charges the fee when |d pi| > epsilon;
/// smooth mode charges fee * (1 - exp(-|d pi| / kappa)) and is used for training.
struct CostModel {
  double fee = 0.0;
  double epsilon = 1e-4;
  double kappa = 1e-4;

  void validate() const;
  static CostModel none() { return {0.0, 1e-4, 1e-4}; }
};

enum class CostMode { Hard, Smooth };

/// Self-financing wealth after one step of length dt holding pi units of the
/// collateral asset, with cash v - pi p earning r_cD when positive and paying
/// r_bD when negative, and the collateral earning r_cE long / paying r_bE short.
double wealth_step(double v, double pi, double p, double dp, const RateSet& rates, double dt);

/// The same quantity from the expanded form: frictionless terms plus the
/// spread corrections, which vanish when borrow and supply rates coincide.
double wealth_step_expanded(double v, double pi, double p, double dp, const RateSet& rates,
                            double dt);

/// Value and partial derivatives of wealth_step. At the kinks v = pi p and
/// pi = 0 the zero subgradient is used.
struct WealthStepPartials {
  double value = 0.0;
  double d_v = 0.0;
  double d_pi = 0.0;
};
WealthStepPartials wealth_step_partials(double v, double pi, double p, double dp,
                                        const RateSet& rates, double dt);

double rebalance_cost(double pi_new, double pi_old, const CostModel& model, CostMode mode);

/// d cost / d pi_new in smooth mode (hard mode is piecewise constant: 0).
double rebalance_cost_derivative(double pi_new, double pi_old, const CostModel& model,
                                 CostMode mode);

/// Per-path time series on the grid, row-major [path][k].
/// V is the self-financing wealth, C the cumulative cost paid, so V - C is
/// the hedge value net of costs. Positions are decided at k < n_steps and
/// held through the final point.
class HedgeTrajectory {
 public:
  HedgeTrajectory(TimeGrid grid, std::size_t n_paths);

  const TimeGrid& grid() const { return grid_; }
  std::size_t n_paths() const { return n_paths_; }
  std::size_t n_points() const { return grid_.n_steps() + 1; }

  std::span<const double> price(std::size_t i) const { return row(price_, i); }
  std::span<const double> wealth(std::size_t i) const { return row(wealth_, i); }
  std::span<const double> position(std::size_t i) const { return row(position_, i); }
  std::span<const double> cost(std::size_t i) const { return row(cost_, i); }
  std::span<const double> target(std::size_t i) const { return row(target_, i); }
  const LiquidationResult& liquidation(std::size_t i) const { return liquidation_[i]; }

  std::span<double> price(std::size_t i) { return row(price_, i); }
  std::span<double> wealth(std::size_t i) { return row(wealth_, i); }
  std::span<double> position(std::size_t i) { return row(position_, i); }
  std::span<double> cost(std::size_t i) { return row(cost_, i); }
  std::span<double> target(std::size_t i) { return row(target_, i); }
  LiquidationResult& liquidation(std::size_t i) { return liquidation_[i]; }

 private:
  std::span<const double> row(const std::vector<double>& m, std::size_t i) const {
    return {m.data() + i * n_points(), n_points()};
  }
  std::span<double> row(std::vector<double>& m, std::size_t i) {
    return {m.data() + i * n_points(), n_points()};
  }

  TimeGrid grid_;
  std::size_t n_paths_;
  std::vector<double> price_, wealth_, position_, cost_, target_;
  std::vector<LiquidationResult> liquidation_;
};

/// Runs the strategy along every path of the batch starting from wealth v0.
/// Throws NumericError when the strategy returns a non-finite position.
HedgeTrajectory roll_forward(const PathBatch& batch, const Strategy& strategy, double v0,
                             const LoanTerms& terms, const RateSet& rates, const CostModel& cost,
                             CostMode mode = CostMode::Hard);

struct RelativeErrorReport {
  double value = 0.0;
  std::size_t included = 0;
  std::size_t excluded = 0;  ///< liquidated or psi <= floor
};

/// Mean of (psi - (V - C)) / psi over samples with psi > floor.
/// Throws DiagnosticError when every sample is excluded.
RelativeErrorReport mean_relative_error(const HedgeTrajectory& traj, double floor);

/// Mean over paths of the per-grid-time average of (psi - (V - C))^2, all samples included.
double mean_squared_error(const HedgeTrajectory& traj);

/// Long format: path,k,t,price,V,pi,C,psi for paths [0, max_paths).
void write_trajectory_csv(std::ostream& out, const HedgeTrajectory& traj, std::size_t max_paths);

/// Per grid time: t,mean_V_minus_C,mean_psi,mean_pi,alive_fraction.
void write_trajectory_summary_csv(std::ostream& out, const HedgeTrajectory& traj);

}  // namespace dlp
