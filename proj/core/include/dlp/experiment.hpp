#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dlp/config.hpp"
#include "dlp/deep_hedge.hpp"
#include "dlp/loan_contract.hpp"
#include "dlp/strategy.hpp"
#include "dlp/wealth_engine.hpp"

namespace dlp {

/// One point of the parameter grid.
struct Cell {
  std::size_t index = 0;
  double mu = 0.0;
  double sigma = 0.0;
  LoanTerms terms;
  RateSet rates;
  CostModel cost;
  std::uint64_t seed = 0;  ///< derived from (master seed, index)
};

/// Cartesian product mu x sigma x theta0 x rates x fee, in that nesting order.
std::vector<Cell> expand_cells(const ExperimentConfig& config);

TimeGrid cell_grid(const ExperimentConfig& config);

struct EvalMetrics {
  double mre_mean = 0.0;
  double mre_std = 0.0;  ///< across repeats
  double mse_mean = 0.0;
  double mse_std = 0.0;
  double excluded_fraction = 0.0;
};

/// Fresh evaluation paths for every repeat, seeded from (cell seed, 1 + repeat),
/// disjoint from the training stream (cell seed, 0). Hard costs.
EvalMetrics evaluate_strategy(const Strategy& strategy, double v0, const Cell& cell,
                              const ExperimentConfig& config);

PathBatch training_paths(const Cell& cell, const ExperimentConfig& config);
PathBatch evaluation_paths(const Cell& cell, const ExperimentConfig& config, std::size_t repeat);

struct ResultRow {
  double mu = 0.0, sigma = 0.0, theta0 = 0.0, spread = 0.0, fee = 0.0;
  std::string strategy;
  EvalMetrics metrics;
  double v0 = 0.0;
  double premium = 0.0;
  std::string status = "ok";
  std::string error;
};

struct ResultTable {
  std::vector<ResultRow> rows;

  bool any_failed() const;
  /// mu,sigma,theta0,spread,fee,strategy,mre_mean,mre_std,mse_mean,mse_std,
  /// excluded_fraction,v0,premium,status,error
  void write_csv(std::ostream& out) const;
};

struct CellTiming {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

struct ExperimentOutcome {
  ResultTable table;
  std::vector<std::filesystem::path> files;  ///< every data file written, relative to output_dir
  std::vector<CellTiming> timings;
  bool plot_ok = false;
};

/// Runs the configured experiment, writing CSVs, a manifest.json listing every
/// file with its SHA-256, and (optionally) plots through the plotting script.
/// A failing cell is recorded in the table and the run continues.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const std::filesystem::path& plot_script = {});

/// Hex SHA-256 of a byte string and of a file.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace dlp
