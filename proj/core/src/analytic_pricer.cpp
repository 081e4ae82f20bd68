#include "dlp/analytic_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "dlp/errors.hpp"
#include "dlp/numerics.hpp"
#include "dlp/parallel.hpp"

namespace dlp {

double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

namespace {

void check_option_inputs(double spot, double T, double strike, double sigma, const char* who) {
  if (!(spot > 0.0) || !(strike > 0.0) || !(sigma > 0.0) || !(T >= 0.0)) {
    throw ParameterError(std::string(who) + ": require spot, strike, sigma > 0 and T >= 0");
  }
}

struct Moneyness {
  double d1;
  double d2;
};

Moneyness moneyness(double spot, double T, double strike, double sigma) {
  const double vol = sigma * std::sqrt(T);
  const double d1 = (std::log(spot / strike) + 0.5 * vol * vol) / vol;
  return {d1, d1 - vol};
}

}  // namespace

double vanilla_call(double spot, double T, double strike, double sigma) {
  check_option_inputs(spot, T, strike, sigma, "vanilla_call");
  if (T == 0.0) return std::max(spot - strike, 0.0);
  const auto [d1, d2] = moneyness(spot, T, strike, sigma);
  return spot * norm_cdf(d1) - strike * norm_cdf(d2);
}

double digital_call(double spot, double T, double strike, double sigma) {
  check_option_inputs(spot, T, strike, sigma, "digital_call");
  if (T == 0.0) return spot > strike ? 1.0 : 0.0;
  return norm_cdf(moneyness(spot, T, strike, sigma).d2);
}

BarrierCallQuote down_and_out_price(const LoanTerms& terms, double sigma) {
  if (!(terms.theta0 > 0.0 && terms.theta0 < terms.theta && terms.theta < 1.0)) {
    throw ParameterError("down_and_out_price: require 0 < theta0 < theta < 1");
  }
  if (!(sigma > 0.0) || !(terms.horizon > 0.0) || !(terms.p0 > 0.0)) {
    throw ParameterError("down_and_out_price: require sigma, horizon, p0 > 0");
  }
  const double T = terms.horizon;
  const double theta0 = terms.theta0;
  const double theta = terms.theta;
  const double B = terms.barrier();
  const double vol = sigma * std::sqrt(T);
  const double log_ratio = std::log(theta0 / theta);

  BarrierCallQuote q;
  q.d1_bar = (-log_ratio + 0.5 * vol * vol) / vol;
  q.d2_bar = q.d1_bar - vol;
  q.d1_hat = (log_ratio + 0.5 * vol * vol) / vol;
  q.d2_hat = (log_ratio - 0.5 * vol * vol) / vol;

  q.value = terms.p0 * (theta - theta0 / theta + (1.0 - theta) * norm_cdf(q.d1_bar) +
                        theta0 * (1.0 / theta - 1.0) * norm_cdf(q.d2_bar));

  auto& c = q.components;
  c.vanilla_spot = vanilla_call(1.0, T, B, sigma);
  c.digital_spot = digital_call(1.0, T, B, sigma);
  c.vanilla_reflected = vanilla_call(B * B, T, B, sigma);
  c.digital_reflected = digital_call(B * B, T, B, sigma);
  q.value_reflection =
      terms.p0 * (c.vanilla_spot + (B - theta0) * c.digital_spot -
                  (c.vanilla_reflected + (B - theta0) * c.digital_reflected) / B);

  // Both forms lose digits to cancellation when the price is tiny relative to
  // its O(1) constituents, hence the absolute floor on the unit-P0 scale.
  const double scale = std::max({std::abs(q.value), std::abs(q.value_reflection), 1e-4 * terms.p0});
  if (std::abs(q.value - q.value_reflection) > 1e-12 * scale) {
    throw NumericError("down_and_out_price: closed forms disagree", 0, 0);
  }
  return q;
}

McEstimate mc_stopped_value(const PathBatch& batch, const LoanTerms& terms, const RateSet& rates,
                            const StoppingRule& rule) {
  terms.validate();
  if (rates.has_spread()) {
    throw ContractViolation("mc_stopped_value: requires r_bD == r_cD and r_bE == r_cE");
  }
  const TimeGrid& grid = batch.grid();
  const std::size_t last = grid.n_steps();
  const double r_d = rates.r_cD;
  const double r_e = rates.r_cE;

  auto stop_index = [&](std::span<const double> path, const LiquidationResult& liq) -> std::size_t {
    return std::visit(
        [&](const auto& r) -> std::size_t {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, FixedTime>) {
            const double k = std::ceil(r.t / grid.dt() - 1e-9);
            return k <= 0.0 ? 0 : std::min(static_cast<std::size_t>(k), last);
          } else if constexpr (std::is_same_v<R, FirstHitLevel>) {
            for (std::size_t k = 0; k <= last; ++k) {
              const double t = grid.time(k);
              if (path[k] * std::exp((r_e - r_d) * t) / terms.p0 >= r.level) return k;
            }
            return last;
          } else {
            return liq.hit ? liq.step_index : last;
          }
        },
        rule);
  };
  const bool indicator = !std::holds_alternative<StopAtBarrierOrHorizon>(rule);

  constexpr std::size_t kChunk = 1024;
  const std::size_t n = batch.n_paths();
  std::vector<double> samples(n);
  for_each_chunk(n, kChunk, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto path = batch.path(i);
      const LiquidationResult liq = liquidation_time(path, grid, terms, rates);
      const std::size_t k = stop_index(path, liq);
      const bool alive = !liq.hit || k < liq.step_index;
      double x = 0.0;
      if (alive || !indicator) {
        const double t = grid.time(k);
        x = std::exp(-r_d * t) *
            (path[k] * std::exp(r_e * t) - terms.theta0 * terms.p0 * std::exp(r_d * t));
      }
      samples[i] = x;
    }
  });
  return sample_mean(samples);
}

McEstimate sample_mean(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw ParameterError("sample_mean: no samples");
  CompensatedSum total;
  for (const double x : samples) total.add(x);
  const double nd = static_cast<double>(n);
  const double mean = total.value() / nd;
  CompensatedSum sq;
  for (const double x : samples) sq.add((x - mean) * (x - mean));
  const double var = n > 1 ? sq.value() / (nd - 1.0) : 0.0;
  return {mean, std::sqrt(var / nd), n};
}

std::vector<BarrierCurvePoint> barrier_vs_premium_curve(const LoanTerms& terms, double sigma,
                                                        std::span<const double> horizons) {
  std::vector<BarrierCurvePoint> curve;
  curve.reserve(horizons.size());
  for (const double T : horizons) {
    LoanTerms t = terms;
    t.horizon = T;
    curve.push_back({T, down_and_out_price(t, sigma).value, t.premium()});
  }
  return curve;
}

void write_curve_csv(std::ostream& out, std::span<const BarrierCurvePoint> curve) {
  out << "T,european_price,premium\n";
  for (const auto& pt : curve) {
    out << format_double(pt.horizon) << ',' << format_double(pt.european_price) << ','
        << format_double(pt.premium) << '\n';
  }
}

}  // namespace dlp
