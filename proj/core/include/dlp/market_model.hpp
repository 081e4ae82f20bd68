#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dlp/rates.hpp"

namespace dlp {

enum class Scheme {
  ExactLognormal,  ///< P' = P exp((mu - sigma^2/2) dt + sigma sqrt(dt) xi)
  EulerMaruyama,   ///< P' = P + mu P dt + sigma P sqrt(dt) xi
};

struct GbmParams {
  double mu = 0.0;
  double sigma = 0.0;
  Scheme scheme = Scheme::ExactLognormal;

  void validate() const;
};

/// Market price of risk of the change to the martingale measure.
struct MeasureChange {
  double nu = 0.0;
};

/// Uniform grid {k dt : k = 0..n_steps}.
class TimeGrid {
 public:
  TimeGrid(double dt, std::size_t n_steps);

  /// n_steps equal steps covering [0, horizon].
  static TimeGrid uniform(double horizon, std::size_t n_steps);

  double dt() const { return dt_; }
  std::size_t n_steps() const { return n_steps_; }
  double horizon() const { return times_.back(); }
  std::span<const double> times() const { return times_; }
  double time(std::size_t k) const { return times_[k]; }

  bool operator==(const TimeGrid&) const = default;

 private:
  double dt_;
  std::size_t n_steps_;
  std::vector<double> times_;
};

/// Dense [n_paths x (n_steps + 1)] matrix of simulated prices, row-major by path.
/// Immutable after construction.
class PathBatch {
 public:
  PathBatch(TimeGrid grid, std::size_t n_paths, std::vector<double> prices, std::uint64_t seed);

  const TimeGrid& grid() const { return grid_; }
  std::size_t n_paths() const { return n_paths_; }
  std::size_t n_points() const { return grid_.n_steps() + 1; }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> path(std::size_t i) const {
    return {prices_.data() + i * n_points(), n_points()};
  }
  double at(std::size_t i, std::size_t k) const { return prices_[i * n_points() + k]; }
  std::span<const double> data() const { return prices_; }

  bool operator==(const PathBatch&) const = default;

 private:
  TimeGrid grid_;
  std::size_t n_paths_;
  std::vector<double> prices_;
  std::uint64_t seed_;
};

/// Simulates n_paths independent paths starting at p0. Path i draws from its
/// own normal stream derived from (seed, i), so the result does not depend on
/// how the work is split across threads.
PathBatch simulate_paths(const GbmParams& params, const TimeGrid& grid, double p0,
                         std::size_t n_paths, std::uint64_t seed);

/// Drift under which exp(-r_cD t) P_t exp(r_cE t) is a martingale: r_cD - r_cE.
GbmParams risk_neutral_drift(const GbmParams& params, const RateSet& rates);

/// nu = (mu + r_cE - r_cD) / sigma.
MeasureChange market_price_of_risk(const GbmParams& params, const RateSet& rates);

// Dumps. CSV: header "path,<t_0>,...,<t_n>", then one row per path.
// Binary: "DLPPATH1", u64 n_paths, u64 n_steps, f64 dt, u64 seed, f64 prices (little-endian).
void write_csv(std::ostream& out, const PathBatch& batch);
void write_binary(std::ostream& out, const PathBatch& batch);
PathBatch read_binary(std::istream& in);

}  // namespace dlp
