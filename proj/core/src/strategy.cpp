#include "dlp/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dlp/errors.hpp"
#include "dlp/random.hpp"

namespace dlp {

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "sigmoid"; }

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "sigmoid") return Activation::Sigmoid;
  throw ParameterError("unknown activation '" + s + "'");
}

std::size_t Architecture::n_params() const {
  std::size_t n = 0;
  std::size_t in = kInputs;
  for (const std::size_t width : hidden) {
    n += width * in + width;
    in = width;
  }
  return n + in + 1;
}

std::size_t Architecture::n_hidden_units() const {
  std::size_t n = 0;
  for (const std::size_t width : hidden) n += width;
  return n;
}

void PolicyParams::validate() const {
  if (arch.hidden.empty() || std::ranges::any_of(arch.hidden, [](std::size_t w) { return w == 0; })) {
    throw ParameterError("PolicyParams: every hidden layer needs at least one unit");
  }
  if (phi.size() != arch.n_params()) {
    throw ParameterError("PolicyParams: expected " + std::to_string(arch.n_params()) +
                         " weights, got " + std::to_string(phi.size()));
  }
  if (!std::isfinite(v0)) throw ParameterError("PolicyParams: v0 must be finite");
  if (!(arch.price_scale > 0.0) || !(arch.position_scale > 0.0)) {
    throw ParameterError("PolicyParams: input scales must be positive");
  }
}

PolicyParams PolicyParams::initialize(const Architecture& arch, std::uint64_t seed, double v0,
                                      double output_gain) {
  PolicyParams p{arch, std::vector<double>(arch.n_params(), 0.0), v0};
  std::mt19937_64 engine(derive_seed(seed, {0x706f6c696379ULL}));
  auto uniform = [&](double limit) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * limit;
  };
  std::size_t offset = 0;
  std::size_t in = Architecture::kInputs;
  for (const std::size_t width : arch.hidden) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + width));
    for (std::size_t j = 0; j < width * in; ++j) p.phi[offset + j] = uniform(limit);
    offset += width * in + width;  // biases stay zero
    in = width;
  }
  const double limit = output_gain * std::sqrt(6.0 / static_cast<double>(in + 1));
  for (std::size_t j = 0; j < in; ++j) p.phi[offset + j] = uniform(limit);
  p.validate();
  return p;
}

namespace {

inline double fast_tanh(double z) {
  if (z > 20.0) return 1.0;
  if (z < -20.0) return -1.0;
  const double e = std::expm1(2.0 * z);
  return e / (e + 2.0);
}

inline double activate(Activation a, double z) {
  return a == Activation::Tanh ? fast_tanh(z) : 1.0 / (1.0 + std::exp(-z));
}

inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// Derivative expressed through the activation value.
inline double activate_slope(Activation a, double h) {
  return a == Activation::Tanh ? 1.0 - h * h : h * (1.0 - h);
}

}  // namespace

double mlp_forward(const Architecture& arch, std::span<const double> phi, double x0, double x1,
                   std::span<double> hidden) {
  const double* w = phi.data();
  double* out = hidden.data();
  const std::size_t first = arch.hidden.front();
  for (std::size_t j = 0; j < first; ++j) {
    out[j] = activate(arch.activation, w[first * 2 + j] + w[2 * j] * x0 + w[2 * j + 1] * x1);
  }
  w += first * 2 + first;
  const double* prev = out;
  std::size_t in = first;
  for (std::size_t l = 1; l < arch.hidden.size(); ++l) {
    const std::size_t width = arch.hidden[l];
    double* cur = const_cast<double*>(prev) + in;
    const double* bias = w + width * in;
    for (std::size_t j = 0; j < width; ++j) {
      cur[j] = activate(arch.activation, bias[j] + dot(w + j * in, prev, in));
    }
    w += width * in + width;
    prev = cur;
    in = width;
  }
  return w[in] + dot(w, prev, in);
}

double mlp_backward(const Architecture& arch, std::span<const double> phi, double x0, double x1,
                    std::span<const double> hidden, double g_out, std::span<double> grad_phi,
                    std::span<double> scratch) {
  const std::size_t n_layers = arch.hidden.size();
  // Offsets of each layer's weights and of its activations.
  std::size_t w_offset[16];
  std::size_t h_offset[16];
  if (n_layers >= 16) throw ParameterError("mlp_backward: too many layers");
  std::size_t in = Architecture::kInputs;
  std::size_t wo = 0, ho = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    w_offset[l] = wo;
    h_offset[l] = ho;
    wo += arch.hidden[l] * in + arch.hidden[l];
    ho += arch.hidden[l];
    in = arch.hidden[l];
  }
  const std::size_t max_width = *std::ranges::max_element(arch.hidden);
  double* delta = scratch.data();
  double* delta_prev = scratch.data() + max_width;

  // Output layer.
  const double* h_last = hidden.data() + h_offset[n_layers - 1];
  const double* w_out = phi.data() + wo;
  double* g_out_w = grad_phi.data() + wo;
  for (std::size_t i = 0; i < in; ++i) {
    g_out_w[i] += g_out * h_last[i];
    delta[i] = g_out * w_out[i];
  }
  g_out_w[in] += g_out;

  double g_x1 = 0.0;
  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t width = arch.hidden[l];
    const std::size_t fan_in = l == 0 ? Architecture::kInputs : arch.hidden[l - 1];
    const double* h = hidden.data() + h_offset[l];
    const double* W = phi.data() + w_offset[l];
    double* gW = grad_phi.data() + w_offset[l];
    double* gb = gW + width * fan_in;
    for (std::size_t j = 0; j < width; ++j) {
      delta[j] *= activate_slope(arch.activation, h[j]);
      gb[j] += delta[j];
    }
    if (l == 0) {
      for (std::size_t j = 0; j < width; ++j) {
        gW[2 * j] += delta[j] * x0;
        gW[2 * j + 1] += delta[j] * x1;
        g_x1 += delta[j] * W[2 * j + 1];
      }
    } else {
      const double* prev = hidden.data() + h_offset[l - 1];
      std::fill_n(delta_prev, fan_in, 0.0);
      for (std::size_t j = 0; j < width; ++j) {
        const double d = delta[j];
        const double* row = W + j * fan_in;
        double* grow = gW + j * fan_in;
        for (std::size_t i = 0; i < fan_in; ++i) {
          grow[i] += d * prev[i];
          delta_prev[i] += d * row[i];
        }
      }
      std::swap(delta, delta_prev);
    }
  }
  return g_x1;
}

double policy_eval(const PolicyParams& params, double price_ratio, double pi_prev) {
  if (params.phi.size() != params.arch.n_params() || params.arch.hidden.empty()) {
    throw ParameterError("policy_eval: weight vector does not match the architecture");
  }
  thread_local std::vector<double> hidden;
  hidden.resize(params.arch.n_hidden_units());
  const double x0 = (price_ratio - 1.0) / params.arch.price_scale;
  const double x1 = pi_prev / params.arch.position_scale;
  return mlp_forward(params.arch, params.phi, x0, x1, hidden);
}

double delta_position(double t, const RateSet& rates) { return std::exp(rates.r_cE * t); }

Strategy::Strategy(Kind kind, RateSet rates) : kind_(std::move(kind)), rates_(rates) {}

Strategy Strategy::neural(PolicyParams params) {
  params.validate();
  return Strategy(NeuralHedge{std::make_shared<const PolicyParams>(std::move(params))});
}

double Strategy::position(const StepState& s) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, DeltaHedge>) {
          return s.alive ? delta_position(s.t, rates_) : 0.0;
        } else if constexpr (std::is_same_v<K, NeuralHedge>) {
          return s.alive ? s.pi_prev + policy_eval(*k.params, s.price / s.p0, s.pi_prev) : 0.0;
        } else {
          return k.value;
        }
      },
      kind_);
}

std::string Strategy::name() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, DeltaHedge>) return "delta";
        else if constexpr (std::is_same_v<K, NeuralHedge>) return "deep";
        else return "constant";
      },
      kind_);
}

}  // namespace dlp
