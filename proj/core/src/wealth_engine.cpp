#include "dlp/wealth_engine.hpp"

#include <cmath>
#include <ostream>

#include "dlp/errors.hpp"
#include "dlp/numerics.hpp"
#include "dlp/parallel.hpp"

namespace dlp {

void CostModel::validate() const {
  if (!(fee >= 0.0) || !(epsilon >= 0.0) || !(kappa > 0.0)) {
    throw ParameterError("CostModel: require fee >= 0, epsilon >= 0, kappa > 0");
  }
}

double wealth_step(double v, double pi, double p, double dp, const RateSet& rates, double dt) {
  const double cash = v - pi * p;
  const double next = p + dp;
  return (1.0 + rates.r_cD * dt) * positive_part(cash) -
         (1.0 + rates.r_bD * dt) * negative_part(cash) +
         (1.0 + rates.r_cE * dt) * positive_part(pi) * next -
         (1.0 + rates.r_bE * dt) * negative_part(pi) * next;
}

double wealth_step_expanded(double v, double pi, double p, double dp, const RateSet& rates,
                            double dt) {
  const double cash = v - pi * p;
  const double short_units = negative_part(pi);
  const double spread_d = rates.r_bD - rates.r_cD;
  const double spread_e = rates.r_bE - rates.r_cE;
  return v + pi * dp + rates.r_cE * dt * pi * dp - spread_e * dt * short_units * dp +
         dt * (rates.r_cD * cash - spread_d * negative_part(cash) + rates.r_cE * pi * p -
               spread_e * short_units * p);
}

WealthStepPartials wealth_step_partials(double v, double pi, double p, double dp,
                                        const RateSet& rates, double dt) {
  const double cash = v - pi * p;
  const double next = p + dp;
  const double d_cash = cash > 0.0 ? 1.0 + rates.r_cD * dt : (cash < 0.0 ? 1.0 + rates.r_bD * dt : 0.0);
  const double d_units = pi > 0.0 ? (1.0 + rates.r_cE * dt) * next
                                  : (pi < 0.0 ? (1.0 + rates.r_bE * dt) * next : 0.0);
  return {wealth_step(v, pi, p, dp, rates, dt), d_cash, -p * d_cash + d_units};
}

double rebalance_cost(double pi_new, double pi_old, const CostModel& model, CostMode mode) {
  const double trade = std::abs(pi_new - pi_old);
  if (mode == CostMode::Hard) {
    return trade > model.epsilon ? model.fee : 0.0;
  }
  return model.fee * -std::expm1(-trade / model.kappa);
}

double rebalance_cost_derivative(double pi_new, double pi_old, const CostModel& model,
                                 CostMode mode) {
  const double trade = pi_new - pi_old;
  if (mode == CostMode::Hard || trade == 0.0) return 0.0;
  const double slope = model.fee / model.kappa * std::exp(-std::abs(trade) / model.kappa);
  return trade > 0.0 ? slope : -slope;
}

HedgeTrajectory::HedgeTrajectory(TimeGrid grid, std::size_t n_paths)
    : grid_(std::move(grid)),
      n_paths_(n_paths),
      price_(n_paths * n_points()),
      wealth_(price_.size()),
      position_(price_.size()),
      cost_(price_.size()),
      target_(price_.size()),
      liquidation_(n_paths) {}

HedgeTrajectory roll_forward(const PathBatch& batch, const Strategy& strategy, double v0,
                             const LoanTerms& terms, const RateSet& rates, const CostModel& cost,
                             CostMode mode) {
  terms.validate();
  rates.validate();
  cost.validate();
  const TimeGrid& grid = batch.grid();
  const std::size_t last = grid.n_steps();
  HedgeTrajectory traj(grid, batch.n_paths());

  for_each_chunk(batch.n_paths(), 64, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto prices = batch.path(i);
      const LiquidationResult liq = liquidation_time(prices, grid, terms, rates);
      traj.liquidation(i) = liq;
      auto P = traj.price(i);
      auto V = traj.wealth(i);
      auto pi = traj.position(i);
      auto C = traj.cost(i);
      auto psi = traj.target(i);

      double v = v0;
      double held = 0.0;
      double paid = 0.0;
      for (std::size_t k = 0; k <= last; ++k) {
        const double t = grid.time(k);
        const bool alive = !liq.hit || k < liq.step_index;
        double units = held;
        if (k < last) {
          units = strategy.position({t, prices[k], terms.p0, held, alive});
          if (!std::isfinite(units)) {
            throw NumericError("roll_forward: strategy returned a non-finite position", i, k);
          }
          paid += rebalance_cost(units, held, cost, mode);
        }
        P[k] = prices[k];
        V[k] = v;
        pi[k] = units;
        C[k] = paid;
        psi[k] = payoff(t, prices[k], terms, rates, alive);
        if (k < last) {
          v = wealth_step(v, units, prices[k], prices[k + 1] - prices[k], rates, grid.dt());
          if (!std::isfinite(v)) {
            throw NumericError("roll_forward: wealth became non-finite", i, k + 1);
          }
        }
        held = units;
      }
    }
  });
  return traj;
}

RelativeErrorReport mean_relative_error(const HedgeTrajectory& traj, double floor) {
  if (!(floor > 0.0)) throw ParameterError("mean_relative_error: floor must be positive");
  constexpr std::size_t kChunk = 256;
  std::vector<CompensatedSum> sums(chunk_count(traj.n_paths(), kChunk));
  std::vector<std::size_t> counts(sums.size(), 0);
  for_each_chunk(traj.n_paths(), kChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto V = traj.wealth(i);
      const auto C = traj.cost(i);
      const auto psi = traj.target(i);
      for (std::size_t k = 0; k < psi.size(); ++k) {
        if (psi[k] > floor) {
          sums[c].add((psi[k] - (V[k] - C[k])) / psi[k]);
          ++counts[c];
        }
      }
    }
  });
  CompensatedSum total;
  std::size_t included = 0;
  for (std::size_t c = 0; c < sums.size(); ++c) {
    total.add(sums[c]);
    included += counts[c];
  }
  const std::size_t all = traj.n_paths() * traj.n_points();
  if (included == 0) {
    throw DiagnosticError("mean_relative_error: every sample is liquidated or below the floor");
  }
  return {total.value() / static_cast<double>(included), included, all - included};
}

double mean_squared_error(const HedgeTrajectory& traj) {
  constexpr std::size_t kChunk = 256;
  std::vector<CompensatedSum> sums(chunk_count(traj.n_paths(), kChunk));
  for_each_chunk(traj.n_paths(), kChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto V = traj.wealth(i);
      const auto C = traj.cost(i);
      const auto psi = traj.target(i);
      for (std::size_t k = 0; k < psi.size(); ++k) {
        const double e = psi[k] - (V[k] - C[k]);
        sums[c].add(e * e);
      }
    }
  });
  CompensatedSum total;
  for (const auto& s : sums) total.add(s);
  return total.value() / static_cast<double>(traj.n_paths() * traj.n_points());
}

void write_trajectory_csv(std::ostream& out, const HedgeTrajectory& traj, std::size_t max_paths) {
  out << "path,k,t,price,V,pi,C,psi\n";
  const std::size_t n = std::min(max_paths, traj.n_paths());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < traj.n_points(); ++k) {
      out << i << ',' << k << ',' << format_double(traj.grid().time(k)) << ','
          << format_double(traj.price(i)[k]) << ',' << format_double(traj.wealth(i)[k]) << ','
          << format_double(traj.position(i)[k]) << ',' << format_double(traj.cost(i)[k]) << ','
          << format_double(traj.target(i)[k]) << '\n';
    }
  }
}

void write_trajectory_summary_csv(std::ostream& out, const HedgeTrajectory& traj) {
  out << "t,mean_V_minus_C,mean_psi,mean_pi,alive_fraction\n";
  const double n = static_cast<double>(traj.n_paths());
  for (std::size_t k = 0; k < traj.n_points(); ++k) {
    CompensatedSum net, psi, pi;
    std::size_t alive = 0;
    for (std::size_t i = 0; i < traj.n_paths(); ++i) {
      net.add(traj.wealth(i)[k] - traj.cost(i)[k]);
      psi.add(traj.target(i)[k]);
      pi.add(traj.position(i)[k]);
      alive += traj.liquidation(i).alive_until(traj.n_points()) > k ? 1 : 0;
    }
    out << format_double(traj.grid().time(k)) << ',' << format_double(net.value() / n) << ','
        << format_double(psi.value() / n) << ',' << format_double(pi.value() / n) << ','
        << format_double(static_cast<double>(alive) / n) << '\n';
  }
}

}  // namespace dlp
