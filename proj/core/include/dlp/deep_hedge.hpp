#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dlp/loan_contract.hpp"
#include "dlp/market_model.hpp"
#include "dlp/strategy.hpp"
#include "dlp/wealth_engine.hpp"

namespace dlp {

enum class LrSchedule { Constant, Cosine };

struct TrainConfig {
  std::size_t n_epochs = 40;
  std::size_t batch_paths = 500;
  double learning_rate = 1e-3;
  LrSchedule lr_schedule = LrSchedule::Cosine;
  double grad_clip = 10.0;
  std::size_t hidden_width = 32;
  std::size_t n_hidden_layers = 2;
  Activation activation = Activation::Tanh;
  double price_scale = 0.1;
  double position_scale = 1.0;
  std::uint64_t seed = 1;
  /// Initial wealth as a fraction of P0 before training.
  double v0_init = 0.0;
  /// Smoothing scale of the cost surrogate at the first epoch; it decays
  /// geometrically to CostModel::kappa at the last epoch. 0 disables the decay.
  double kappa_start = 1e-2;
  /// After the last epoch, re-solve v0 against the hard-cost loss with the weights fixed.
  bool refit_v0 = true;
  /// Run the finite-difference gradient check on a micro-instance before training,
  /// under the cost surrogate of the first epoch.
  bool check_gradient = true;

  void validate() const;
  Architecture architecture() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;       ///< mean minibatch loss over the epoch (training cost mode)
  double grad_norm = 0.0;  ///< mean pre-clip gradient norm over the epoch
  double v0 = 0.0;         ///< numeraire units, end of epoch
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;
  double final_loss_smooth = 0.0;  ///< full training set, surrogate costs
  double final_loss_hard = 0.0;    ///< full training set, hard costs
  double v0_refit_shift = 0.0;     ///< change of v0 from the hard-cost refit, numeraire units

  /// epoch,loss,grad_norm,v0 with the surrogate/hard gap as trailing comment lines.
  void write_csv(std::ostream& out) const;
};

struct TrainResult {
  PolicyParams params;
  TrainingLog log;
};

/// Hedging loss on paths [first, first + count) of the batch: mean over paths of
/// sum_k ((psi_k - (V_k - C_k)) / P0)^2 with the neural strategy, and its
/// gradient with respect to phi and to the normalized initial wealth v0 / P0,
/// obtained by backpropagation through the whole unrolled recursion.
struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad_phi;
  double grad_v0 = 0.0;  ///< d loss / d (v0 / P0)
};

LossGradient hedging_loss_gradient(const PolicyParams& params, const PathBatch& batch,
                                   std::size_t first, std::size_t count, const LoanTerms& terms,
                                   const RateSet& rates, const CostModel& cost, CostMode mode);

/// Forward-only version of the same loss.
double hedging_loss(const PolicyParams& params, const PathBatch& batch, std::size_t first,
                    std::size_t count, const LoanTerms& terms, const RateSet& rates,
                    const CostModel& cost, CostMode mode);

/// Components smaller than this fraction of the largest finite difference are
/// compared against that floor: central differences cannot resolve them.
inline constexpr double kGradientCheckFloor = 1e-6;

struct GradientCheckReport {
  double max_rel_error = 0.0;  ///< over every weight and v0
  double norm_rel_error = 0.0; ///< |a - f| / |f| over the whole vector
  std::size_t worst_index = 0;  ///< n_params means v0
  std::size_t n_checked = 0;
};

/// Compares the analytic gradient with central differences of step h on every
/// weight and on v0 / P0, using the first `n_paths` paths truncated to `n_steps`
/// steps. Per component the relative error is |a - f| / max(|a|, |f|, floor).
GradientCheckReport gradient_check(const PolicyParams& params, const PathBatch& batch,
                                   const LoanTerms& terms, const RateSet& rates,
                                   const CostModel& cost, std::size_t n_paths = 8,
                                   std::size_t n_steps = 3, double h = 1e-5);

/// Least-squares initial wealth for fixed weights: Gauss-Newton on v0 alone,
/// which is exact between kinks of the cash balance since positions do not
/// depend on v0. Returns v0 in numeraire units.
double refit_initial_wealth(const PolicyParams& params, const PathBatch& batch,
                            const LoanTerms& terms, const RateSet& rates, const CostModel& cost,
                            CostMode mode, std::size_t iterations = 3);

/// Jointly fits (phi, v0) by Adam on minibatches of the training batch with
/// smooth costs. Throws TrainingDivergence on a non-finite loss and
/// DiagnosticError when the gradient check exceeds 1e-4.
TrainResult train_deep_hedge(const PathBatch& train, const LoanTerms& terms, const RateSet& rates,
                             const CostModel& cost, const TrainConfig& config);

// Versioned flat binary: "DLPPOL01", u32 version, u64 n_params, f64 v0, f64 phi[n].
// The JSON descriptor records the architecture needed to interpret phi.
void write_policy_binary(std::ostream& out, const PolicyParams& params);
std::string policy_shape_json(const PolicyParams& params);
PolicyParams read_policy(std::istream& binary, const std::string& shape_json);

}  // namespace dlp
