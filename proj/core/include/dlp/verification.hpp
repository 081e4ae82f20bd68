#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dlp/analytic_pricer.hpp"
#include "dlp/loan_contract.hpp"

namespace dlp {

struct BridgeOracleConfig {
  std::size_t n_paths = 1'000'000;
  double fine_dt = 1.0 / 3650.0;  ///< monitoring step; rounded so it divides the horizon
  std::size_t block = 10;         ///< fine steps per coarse block
  std::uint64_t seed = 1;
  /// Coarse blocks whose bridge crossing probability is below this are not refined.
  double skip_probability = 1e-12;
};

/// Monte Carlo price of the held-to-horizon loan as a continuously monitored
/// down-and-out call on the scaled price: exact log-normal steps on the fine
/// grid with the Brownian-bridge survival probability applied on every step.
/// Fine points are only sampled inside coarse blocks that can reach the barrier.
/// Numeraire units (scaled by P0).
McEstimate barrier_price_oracle(const LoanTerms& terms, double sigma,
                                const BridgeOracleConfig& config);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::size_t oracle_paths = 100'000;
  std::size_t stopping_paths = 100'000;
  std::size_t replication_paths = 1'000;
  std::uint64_t seed = 7;
};

/// The pricing and replication checks behind the `verify` subcommand:
/// closed form against the bridge oracle, value of the stopped loan against the
/// premium, the short-horizon limit of the closed form and exact replication
/// in the frictionless case.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace dlp
