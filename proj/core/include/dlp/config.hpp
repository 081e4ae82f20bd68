#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dlp/deep_hedge.hpp"
#include "dlp/market_model.hpp"
#include "dlp/rates.hpp"
#include "dlp/wealth_engine.hpp"

namespace dlp {

enum class ExperimentId { Fig1Curve, Exp1Grid, Exp2SpreadCost, HedgeTrace, TrainCurve, PriceVsSpread };

std::string to_string(ExperimentId id);
ExperimentId experiment_from_string(const std::string& s);

/// Either four fixed rates, or supply rates plus a spread grid
/// (borrow = supply + spread for both assets).
struct RateGrid {
  RateSet fixed = RateSet::aave_2024_04();
  bool use_spread = false;
  double r_cD = 0.08;
  double r_cE = 0.017;
  std::vector<double> spreads;

  std::vector<RateSet> expand() const;
  /// Spread reported for a rate set: r_bD - r_cD.
  static double spread_of(const RateSet& r) { return r.r_bD - r.r_cD; }
};

struct McConfig {
  std::size_t n_train_paths = 20000;
  std::size_t n_eval_paths = 10000;
  std::size_t n_eval_repeats = 10;
  /// Relative-error floor as a fraction of P0.
  double error_floor = 1e-4;
};

struct CurveConfig {
  std::size_t n_points = 20;
  double t_max = 1.0;
};

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::Exp1Grid;
  std::uint64_t seed = 2024;
  std::filesystem::path output_dir = "results";
  std::size_t threads = 0;  ///< 0 = library default
  bool plot = true;

  std::vector<double> mu{0.0};
  std::vector<double> sigma{0.1};
  Scheme scheme = Scheme::ExactLognormal;
  std::size_t steps_per_year = 365;

  double theta = 0.9;
  std::vector<double> theta0{0.83};
  double p0 = 3000.0;
  double horizon = 0.2;

  RateGrid rates;
  std::vector<double> fee{20.0};
  double epsilon = 1e-4;
  double kappa = 1e-4;

  McConfig mc;
  TrainConfig train;
  std::vector<std::string> strategies{"deep", "delta"};
  CurveConfig curve;
  std::size_t trace_paths = 5;

  /// Throws ConfigError when a grid is empty or a value is out of range.
  void validate() const;
};

/// Parses YAML text. Unknown keys are rejected. Throws ConfigError.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical YAML rendering (every key, fixed order); used for hashing.
std::string dump_config(const ExperimentConfig& config);

}  // namespace dlp
