#include "dlp/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dlp/errors.hpp"
#include "dlp/market_model.hpp"
#include "dlp/numerics.hpp"
#include "dlp/parallel.hpp"
#include "dlp/random.hpp"
#include "dlp/strategy.hpp"
#include "dlp/wealth_engine.hpp"

namespace dlp {

McEstimate barrier_price_oracle(const LoanTerms& terms, double sigma,
                                const BridgeOracleConfig& config) {
  terms.validate();
  if (!(sigma > 0.0) || !(config.fine_dt > 0.0) || config.block == 0 || config.n_paths < 2) {
    throw ParameterError("barrier_price_oracle: bad configuration");
  }
  const double T = terms.horizon;
  const auto n_fine = static_cast<std::size_t>(std::ceil(T / config.fine_dt - 1e-9));
  const double dt = T / static_cast<double>(n_fine);
  const double b = std::log(terms.barrier());
  const double var_fine = sigma * sigma * dt;
  // Skip test: p = exp(-2 (x-b)(y-b) / (sigma^2 h)) < skip  <=>  (x-b)(y-b) > -log(skip) sigma^2 h / 2.
  const double skip_log = -std::log(config.skip_probability);

  std::vector<double> samples(config.n_paths);
  for_each_chunk(config.n_paths, 4096, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      NormalStream normal(derive_seed(config.seed, {i}));
      double x = 0.0;
      double survive = 1.0;
      std::size_t done = 0;
      while (done < n_fine && survive > 0.0) {
        const std::size_t m = std::min(config.block, n_fine - done);
        const double h = static_cast<double>(m) * dt;
        const double var = sigma * sigma * h;
        const double y = x - 0.5 * var + std::sqrt(var) * normal();
        if (y <= b) {
          survive = 0.0;
          break;
        }
        const double gap = (x - b) * (y - b);
        if (gap <= 0.5 * skip_log * var) {
          // Refine: sample the fine points of the block from the bridge and apply the
          // per-step crossing probability.
          double a = x;
          for (std::size_t j = 0; j + 1 < m && survive > 0.0; ++j) {
            const double remaining = static_cast<double>(m - j);
            const double mean = a + (y - a) / remaining;
            const double sd = std::sqrt(var_fine * (remaining - 1.0) / remaining);
            const double c = mean + sd * normal();
            if (c <= b) {
              survive = 0.0;
              break;
            }
            survive *= -std::expm1(-2.0 * (a - b) * (c - b) / var_fine);
            a = c;
          }
          if (survive > 0.0) survive *= -std::expm1(-2.0 * (a - b) * (y - b) / var_fine);
        }
        x = y;
        done += m;
      }
      samples[i] = survive > 0.0 ? survive * std::max(std::exp(x) - terms.theta0, 0.0) : 0.0;
    }
  });
  McEstimate est = sample_mean(samples);
  est.mean *= terms.p0;
  est.std_error *= terms.p0;
  return est;
}

namespace {

std::string describe(double value, double reference, double se) {
  std::ostringstream s;
  s.precision(10);
  s << "value=" << value << " reference=" << reference << " se=" << se;
  return s.str();
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  std::vector<CheckResult> out;

  {
    bool pass = true;
    std::ostringstream detail;
    std::size_t cell = 0;
    for (const double sigma : {0.1, 0.5, 0.9}) {
      for (const double T : {0.1, 0.55, 1.0}) {
        const LoanTerms terms{0.83, 0.9, 1.0, T};
        const auto quote = down_and_out_price(terms, sigma);
        BridgeOracleConfig cfg;
        cfg.n_paths = options.oracle_paths;
        cfg.seed = derive_seed(options.seed, {1, cell++});
        const McEstimate mc = barrier_price_oracle(terms, sigma, cfg);
        const double z = std::abs(mc.mean - quote.value) / mc.std_error;
        if (!(z <= 3.0)) pass = false;
        detail << "sigma=" << sigma << " T=" << T << " z=" << z << "; ";
      }
    }
    out.push_back({"closed form vs bridge oracle (3 SE)", pass, detail.str()});
  }

  {
    const RateSet rates{0.08, 0.08, 0.017, 0.017};
    const LoanTerms terms{0.83, 0.9, 3000.0, 0.2};
    const GbmParams q = risk_neutral_drift({0.0, 0.5, Scheme::ExactLognormal}, rates);
    const PathBatch paths = simulate_paths(q, TimeGrid::uniform(0.2, 73), terms.p0,
                                           options.stopping_paths, derive_seed(options.seed, {2}));
    const McEstimate stopped = mc_stopped_value(paths, terms, rates, StopAtBarrierOrHorizon{});
    const double premium = terms.premium();
    out.push_back({"stopped loan value equals premium (3 SE)",
                   std::abs(stopped.mean - premium) <= 3.0 * stopped.std_error,
                   describe(stopped.mean, premium, stopped.std_error)});
    bool dominated = true;
    std::ostringstream detail;
    const std::vector<StoppingRule> rules{FixedTime{0.05}, FixedTime{0.2}, FirstHitLevel{1.05},
                                          FirstHitLevel{1.2}};
    for (const auto& rule : rules) {
      const McEstimate e = mc_stopped_value(paths, terms, rates, rule);
      if (!(e.mean <= premium + 3.0 * e.std_error)) dominated = false;
      detail << e.mean << "+-" << e.std_error << "; ";
    }
    out.push_back({"no stopping rule beats the premium", dominated, detail.str()});
  }

  {
    const LoanTerms terms{0.83, 0.9, 1.0, 1e-4};
    const double v = down_and_out_price(terms, 0.5).value;
    out.push_back({"closed form tends to the premium as T -> 0",
                   std::abs(v - terms.premium()) <= 1e-3, describe(v, terms.premium(), 0.0)});
  }

  {
    const RateSet zero{0.0, 0.0, 0.0, 0.0};
    const LoanTerms terms{0.83, 0.9, 3000.0, 0.2};
    const PathBatch paths =
        simulate_paths({0.0, 0.5, Scheme::ExactLognormal}, TimeGrid::uniform(0.2, 73), terms.p0,
                       options.replication_paths, derive_seed(options.seed, {3}));
    const HedgeTrajectory traj = roll_forward(paths, Strategy::constant(1.0), terms.premium(),
                                              terms, zero, CostModel::none());
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.n_paths(); ++i) {
      const std::size_t alive = traj.liquidation(i).alive_until(traj.n_points());
      for (std::size_t k = 0; k < alive; ++k) {
        worst = std::max(worst, std::abs(traj.wealth(i)[k] - traj.target(i)[k]));
      }
    }
    out.push_back({"frictionless replication with one unit", worst <= 1e-10 * terms.p0,
                   describe(worst, 1e-10 * terms.p0, 0.0)});
  }
  return out;
}

}  // namespace dlp
