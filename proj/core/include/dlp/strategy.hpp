#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dlp/rates.hpp"

namespace dlp {

enum class Activation { Tanh, Sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Shape of the recurrent policy cell: a fully connected network mapping the
/// features ((p/P0 - 1) / price_scale, pi_prev / position_scale) to a scalar.
struct Architecture {
  std::vector<std::size_t> hidden{32, 32};
  Activation activation = Activation::Tanh;
  double price_scale = 0.1;
  double position_scale = 1.0;

  static constexpr std::size_t kInputs = 2;

  /// Weights and biases of every layer, output layer included.
  std::size_t n_params() const;
  std::size_t n_hidden_units() const;

  bool operator==(const Architecture&) const = default;
};

/// Flat weights phi (layer by layer: row-major W then b) and the initial wealth.
struct PolicyParams {
  Architecture arch;
  std::vector<double> phi;
  double v0 = 0.0;  ///< numeraire units

  /// Throws ParameterError on a weight count mismatch or non-finite v0.
  void validate() const;

  /// Glorot-uniform hidden layers, output layer scaled by `output_gain`.
  static PolicyParams initialize(const Architecture& arch, std::uint64_t seed, double v0,
                                 double output_gain = 0.1);

  bool operator==(const PolicyParams&) const = default;
};

/// Evaluates the network at the normalized price p_t / P0 and previous position.
/// Throws ParameterError on a shape mismatch.
double policy_eval(const PolicyParams& params, double price_ratio, double pi_prev);

/// Low-level forward pass on features. Writes post-activation hidden values,
/// layer after layer, into `hidden` (size arch.n_hidden_units()).
double mlp_forward(const Architecture& arch, std::span<const double> phi, double x0, double x1,
                   std::span<double> hidden);

/// Reverse pass for one evaluation with output adjoint `g_out`. Accumulates
/// into `grad_phi` and returns d(output)/d(x1) * g_out. `scratch` needs
/// 2 * max hidden width doubles.
double mlp_backward(const Architecture& arch, std::span<const double> phi, double x0, double x1,
                    std::span<const double> hidden, double g_out, std::span<double> grad_phi,
                    std::span<double> scratch);

/// Position of the delta hedge before liquidation: e^{r_cE t}.
double delta_position(double t, const RateSet& rates);

/// What a strategy sees at a decision time.
struct StepState {
  double t = 0.0;
  double price = 0.0;
  double p0 = 0.0;
  double pi_prev = 0.0;
  bool alive = true;  ///< the loan has not been liquidated yet
};

struct DeltaHedge {};

/// Recurrent neural policy. The network output is the trade, so the new
/// position is pi_prev + output; once the loan is liquidated the hedge is closed.
struct NeuralHedge {
  std::shared_ptr<const PolicyParams> params;
};

/// Holds `value` units forever, liquidation or not.
struct ConstantHedge {
  double value = 0.0;
};

class Strategy {
 public:
  using Kind = std::variant<DeltaHedge, NeuralHedge, ConstantHedge>;

  explicit Strategy(Kind kind, RateSet rates = {});

  static Strategy delta(const RateSet& rates) { return Strategy(DeltaHedge{}, rates); }
  static Strategy neural(PolicyParams params);
  static Strategy constant(double value) { return Strategy(ConstantHedge{value}); }

  double position(const StepState& s) const;

  const Kind& kind() const { return kind_; }
  std::string name() const;

 private:
  Kind kind_;
  RateSet rates_;
};

}  // namespace dlp
