#include "dlp/deep_hedge.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <utility>

#include "dlp/errors.hpp"
#include "dlp/numerics.hpp"
#include "dlp/parallel.hpp"
#include "dlp/random.hpp"
#include "json.hpp"

namespace dlp {

void TrainConfig::validate() const {
  if (n_epochs == 0 || batch_paths == 0 || hidden_width == 0 || n_hidden_layers == 0) {
    throw ParameterError("TrainConfig: epochs, batch size, width and depth must be >= 1");
  }
  if (n_hidden_layers >= 16) throw ParameterError("TrainConfig: at most 15 hidden layers");
  if (!(learning_rate > 0.0)) throw ParameterError("TrainConfig: learning_rate must be positive");
  if (!(grad_clip > 0.0)) throw ParameterError("TrainConfig: grad_clip must be positive");
  if (!(price_scale > 0.0) || !(position_scale > 0.0)) {
    throw ParameterError("TrainConfig: input scales must be positive");
  }
  if (!std::isfinite(v0_init)) throw ParameterError("TrainConfig: v0_init must be finite");
  if (!(kappa_start >= 0.0)) throw ParameterError("TrainConfig: kappa_start must be >= 0");
}

Architecture TrainConfig::architecture() const {
  Architecture a;
  a.hidden.assign(n_hidden_layers, hidden_width);
  a.activation = activation;
  a.price_scale = price_scale;
  a.position_scale = position_scale;
  return a;
}

void TrainingLog::write_csv(std::ostream& out) const {
  out << "epoch,loss,grad_norm,v0\n";
  for (const auto& e : epochs) {
    out << e.epoch << ',' << format_double(e.loss) << ',' << format_double(e.grad_norm) << ','
        << format_double(e.v0) << '\n';
  }
  out << "# final_loss_smooth," << format_double(final_loss_smooth) << '\n';
  out << "# final_loss_hard," << format_double(final_loss_hard) << '\n';
  out << "# v0_refit_shift," << format_double(v0_refit_shift) << '\n';
}

namespace {

// Per-thread scratch for one path: everything the backward pass needs.
struct PathTape {
  std::vector<double> hidden;  // [k][unit] for k < n_steps
  std::vector<double> pi, trade, d_v, d_pi, err, x0, x1;
  std::vector<char> alive;
  std::vector<double> scratch;

  void resize(std::size_t n_steps, const Architecture& arch) {
    const std::size_t n = n_steps + 1;
    hidden.resize(n_steps * arch.n_hidden_units());
    for (auto* v : {&pi, &trade, &d_v, &d_pi, &err, &x0, &x1}) v->resize(n);
    alive.resize(n);
    scratch.resize(2 * *std::ranges::max_element(arch.hidden));
  }
};

struct Problem {
  const PolicyParams& params;
  const PathBatch& batch;
  const LoanTerms& terms;
  const RateSet& rates;
  CostModel cost;  // fee in units of P0
  CostMode mode;
};

// Loss of one path in P0 units; fills the tape when `record` is set.
double forward_path(const Problem& pb, std::size_t i, PathTape& tape, std::span<double> hidden_tmp,
                    bool record) {
  const Architecture& arch = pb.params.arch;
  const TimeGrid& grid = pb.batch.grid();
  const std::size_t last = grid.n_steps();
  const std::size_t n_hidden = arch.n_hidden_units();
  const auto prices = pb.batch.path(i);
  const LiquidationResult liq = liquidation_time(prices, grid, pb.terms, pb.rates);
  const double p0 = pb.terms.p0;

  double v = pb.params.v0 / p0;
  double held = 0.0;
  double paid = 0.0;
  double loss = 0.0;
  for (std::size_t k = 0; k <= last; ++k) {
    const double t = grid.time(k);
    const double ratio = prices[k] / p0;
    const bool alive = !liq.hit || k < liq.step_index;
    double units = held;
    double trade = 0.0;
    if (k < last) {
      if (alive) {
        const double x0 = (ratio - 1.0) / arch.price_scale;
        const double x1 = held / arch.position_scale;
        std::span<double> h =
            record ? std::span<double>(tape.hidden.data() + k * n_hidden, n_hidden) : hidden_tmp;
        units = held + mlp_forward(arch, pb.params.phi, x0, x1, h);
        if (record) {
          tape.x0[k] = x0;
          tape.x1[k] = x1;
        }
      } else {
        units = 0.0;
      }
      trade = units - held;
      paid += rebalance_cost(units, held, pb.cost, pb.mode);
    }
    const double target = payoff(t, prices[k], pb.terms, pb.rates, alive) / p0;
    const double e = target - (v - paid);
    loss += e * e;
    if (record) {
      tape.pi[k] = units;
      tape.trade[k] = trade;
      tape.err[k] = e;
      tape.alive[k] = alive ? 1 : 0;
    }
    if (k < last) {
      const double next = prices[k + 1] / p0;
      if (record) {
        const auto part = wealth_step_partials(v, units, ratio, next - ratio, pb.rates, grid.dt());
        tape.d_v[k] = part.d_v;
        tape.d_pi[k] = part.d_pi;
        v = part.value;
      } else {
        v = wealth_step(v, units, ratio, next - ratio, pb.rates, grid.dt());
      }
    }
    held = units;
  }
  return loss;
}

// Accumulates d(path loss)/d phi into grad_phi and returns d(path loss)/d v0_hat.
double backward_path(const Problem& pb, PathTape& tape, std::span<double> grad_phi) {
  const Architecture& arch = pb.params.arch;
  const std::size_t last = pb.batch.grid().n_steps();
  const std::size_t n_hidden = arch.n_hidden_units();

  double gV = -2.0 * tape.err[last];
  double gC = 2.0 * tape.err[last];
  double g_carry = 0.0;      // d loss / d pi_k through pi_{k+1}
  double g_cost_next = 0.0;  // gC_{k+1} * c'(trade_{k+1})
  for (std::size_t k = last; k-- > 0;) {
    // gV, gC currently hold the adjoints at k + 1.
    const double gV_next = gV;
    gC = 2.0 * tape.err[k] + gC;
    const double g_cost = gC * rebalance_cost_derivative(tape.pi[k], tape.pi[k] - tape.trade[k],
                                                         pb.cost, pb.mode);
    const double g_pi = gV_next * tape.d_pi[k] + g_cost - g_cost_next + g_carry;
    gV = -2.0 * tape.err[k] + gV_next * tape.d_v[k];

    if (tape.alive[k]) {
      const double g_x1 = mlp_backward(
          arch, pb.params.phi, tape.x0[k], tape.x1[k],
          std::span<const double>(tape.hidden.data() + k * n_hidden, n_hidden), g_pi, grad_phi,
          tape.scratch);
      g_carry = g_pi + g_x1 / arch.position_scale;
    } else {
      g_carry = 0.0;
    }
    g_cost_next = g_cost;
  }
  return gV;
}

Problem make_problem(const PolicyParams& params, const PathBatch& batch, std::size_t first,
                     std::size_t count, const LoanTerms& terms, const RateSet& rates,
                     const CostModel& cost, CostMode mode) {
  params.validate();
  terms.validate();
  rates.validate();
  cost.validate();
  if (count == 0 || first + count > batch.n_paths()) {
    throw ParameterError("hedging loss: path range out of bounds");
  }
  CostModel scaled = cost;
  scaled.fee = cost.fee / terms.p0;
  return {params, batch, terms, rates, scaled, mode};
}

constexpr std::size_t kPathChunk = 16;

// Sums of e_k * dV_k/dv0_hat and (dV_k/dv0_hat)^2 along one path with fixed weights.
std::pair<double, double> v0_normal_terms(const Problem& pb, std::size_t i,
                                          std::span<double> hidden) {
  const Architecture& arch = pb.params.arch;
  const TimeGrid& grid = pb.batch.grid();
  const std::size_t last = grid.n_steps();
  const auto prices = pb.batch.path(i);
  const LiquidationResult liq = liquidation_time(prices, grid, pb.terms, pb.rates);
  const double p0 = pb.terms.p0;
  double v = pb.params.v0 / p0;
  double dv = 1.0;
  double held = 0.0, paid = 0.0, num = 0.0, den = 0.0;
  for (std::size_t k = 0; k <= last; ++k) {
    const double ratio = prices[k] / p0;
    const bool alive = !liq.hit || k < liq.step_index;
    double units = held;
    if (k < last) {
      units = alive ? held + mlp_forward(arch, pb.params.phi, (ratio - 1.0) / arch.price_scale,
                                         held / arch.position_scale, hidden)
                    : 0.0;
      paid += rebalance_cost(units, held, pb.cost, pb.mode);
    }
    const double e = payoff(grid.time(k), prices[k], pb.terms, pb.rates, alive) / p0 - (v - paid);
    num += e * dv;
    den += dv * dv;
    if (k < last) {
      const auto part = wealth_step_partials(v, units, ratio, prices[k + 1] / p0 - ratio, pb.rates,
                                             grid.dt());
      v = part.value;
      dv *= part.d_v;
    }
    held = units;
  }
  return {num, den};
}

}  // namespace

double refit_initial_wealth(const PolicyParams& params, const PathBatch& batch,
                            const LoanTerms& terms, const RateSet& rates, const CostModel& cost,
                            CostMode mode, std::size_t iterations) {
  PolicyParams current = params;
  for (std::size_t it = 0; it < iterations; ++it) {
    const Problem pb =
        make_problem(current, batch, 0, batch.n_paths(), terms, rates, cost, mode);
    const std::size_t n_chunks = chunk_count(batch.n_paths(), kPathChunk);
    std::vector<double> num(n_chunks, 0.0), den(n_chunks, 0.0);
    for_each_chunk(batch.n_paths(), kPathChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
      thread_local std::vector<double> hidden;
      hidden.resize(current.arch.n_hidden_units());
      for (std::size_t i = begin; i < end; ++i) {
        const auto [a, b] = v0_normal_terms(pb, i, hidden);
        num[c] += a;
        den[c] += b;
      }
    });
    CompensatedSum n, d;
    for (std::size_t c = 0; c < n_chunks; ++c) {
      n.add(num[c]);
      d.add(den[c]);
    }
    if (!(d.value() > 0.0)) break;
    current.v0 += n.value() / d.value() * terms.p0;
  }
  return current.v0;
}

LossGradient hedging_loss_gradient(const PolicyParams& params, const PathBatch& batch,
                                   std::size_t first, std::size_t count, const LoanTerms& terms,
                                   const RateSet& rates, const CostModel& cost, CostMode mode) {
  const Problem pb = make_problem(params, batch, first, count, terms, rates, cost, mode);
  const std::size_t n_params = params.phi.size();
  const std::size_t n_chunks = chunk_count(count, kPathChunk);
  std::vector<double> grads(n_chunks * n_params, 0.0);
  std::vector<double> losses(n_chunks, 0.0), g_v0(n_chunks, 0.0);

  for_each_chunk(count, kPathChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    thread_local PathTape tape;
    tape.resize(batch.grid().n_steps(), params.arch);
    std::span<double> grad(grads.data() + c * n_params, n_params);
    CompensatedSum loss;
    double gv = 0.0;
    for (std::size_t j = begin; j < end; ++j) {
      loss.add(forward_path(pb, first + j, tape, {}, true));
      gv += backward_path(pb, tape, grad);
    }
    losses[c] = loss.value();
    g_v0[c] = gv;
  });

  LossGradient out;
  out.grad_phi.assign(n_params, 0.0);
  CompensatedSum loss;
  double gv = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    loss.add(losses[c]);
    gv += g_v0[c];
    const double* g = grads.data() + c * n_params;
    for (std::size_t p = 0; p < n_params; ++p) out.grad_phi[p] += g[p];
  }
  const double inv = 1.0 / static_cast<double>(count);
  out.loss = loss.value() * inv;
  out.grad_v0 = gv * inv;
  for (double& g : out.grad_phi) g *= inv;
  return out;
}

double hedging_loss(const PolicyParams& params, const PathBatch& batch, std::size_t first,
                    std::size_t count, const LoanTerms& terms, const RateSet& rates,
                    const CostModel& cost, CostMode mode) {
  const Problem pb = make_problem(params, batch, first, count, terms, rates, cost, mode);
  const std::size_t n_chunks = chunk_count(count, kPathChunk);
  std::vector<double> losses(n_chunks, 0.0);
  for_each_chunk(count, kPathChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    thread_local PathTape tape;
    thread_local std::vector<double> hidden;
    hidden.resize(params.arch.n_hidden_units());
    CompensatedSum loss;
    for (std::size_t j = begin; j < end; ++j) loss.add(forward_path(pb, first + j, tape, hidden, false));
    losses[c] = loss.value();
  });
  CompensatedSum loss;
  for (const double l : losses) loss.add(l);
  return loss.value() / static_cast<double>(count);
}

GradientCheckReport gradient_check(const PolicyParams& params, const PathBatch& batch,
                                   const LoanTerms& terms, const RateSet& rates,
                                   const CostModel& cost, std::size_t n_paths, std::size_t n_steps,
                                   double h) {
  n_paths = std::min(n_paths, batch.n_paths());
  n_steps = std::min(n_steps, batch.grid().n_steps());
  if (n_paths == 0 || n_steps == 0) throw ParameterError("gradient_check: empty micro-instance");
  std::vector<double> prices;
  prices.reserve(n_paths * (n_steps + 1));
  for (std::size_t i = 0; i < n_paths; ++i) {
    const auto path = batch.path(i);
    prices.insert(prices.end(), path.begin(), path.begin() + static_cast<std::ptrdiff_t>(n_steps + 1));
  }
  const PathBatch micro(TimeGrid(batch.grid().dt(), n_steps), n_paths, std::move(prices),
                        batch.seed());
  LoanTerms micro_terms = terms;
  micro_terms.horizon = micro.grid().horizon();

  const auto loss_at = [&](const PolicyParams& p) {
    return hedging_loss(p, micro, 0, n_paths, micro_terms, rates, cost, CostMode::Smooth);
  };
  const LossGradient g =
      hedging_loss_gradient(params, micro, 0, n_paths, micro_terms, rates, cost, CostMode::Smooth);

  std::vector<double> analytic(params.phi.size() + 1), fd(params.phi.size() + 1);
  PolicyParams probe = params;
  for (std::size_t p = 0; p <= params.phi.size(); ++p) {
    if (p < params.phi.size()) {
      const double w = params.phi[p];
      probe.phi[p] = w + h;
      const double up = loss_at(probe);
      probe.phi[p] = w - h;
      const double down = loss_at(probe);
      probe.phi[p] = w;
      fd[p] = (up - down) / (2.0 * h);
      analytic[p] = g.grad_phi[p];
    } else {
      const double v = params.v0;
      probe.v0 = v + h * terms.p0;
      const double up = loss_at(probe);
      probe.v0 = v - h * terms.p0;
      const double down = loss_at(probe);
      probe.v0 = v;
      fd[p] = (up - down) / (2.0 * h);
      analytic[p] = g.grad_v0;
    }
  }
  double largest = 0.0;
  double diff_sq = 0.0, fd_sq = 0.0;
  for (std::size_t p = 0; p < fd.size(); ++p) {
    largest = std::max(largest, std::abs(fd[p]));
    diff_sq += (analytic[p] - fd[p]) * (analytic[p] - fd[p]);
    fd_sq += fd[p] * fd[p];
  }
  const double floor = kGradientCheckFloor * largest;
  GradientCheckReport report;
  report.norm_rel_error = fd_sq > 0.0 ? std::sqrt(diff_sq / fd_sq) : std::sqrt(diff_sq);
  for (std::size_t p = 0; p < fd.size(); ++p) {
    const double scale = std::max({std::abs(analytic[p]), std::abs(fd[p]), floor});
    const double r = scale == 0.0 ? 0.0 : std::abs(analytic[p] - fd[p]) / scale;
    if (r > report.max_rel_error) {
      report.max_rel_error = r;
      report.worst_index = p;
    }
    ++report.n_checked;
  }
  return report;
}

namespace {

struct Adam {
  std::vector<double> m, v;
  std::size_t t = 0;
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::span<double> x, std::span<const double> g, double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
    for (std::size_t i = 0; i < x.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
      x[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
    }
  }
};

}  // namespace

TrainResult train_deep_hedge(const PathBatch& train, const LoanTerms& terms, const RateSet& rates,
                             const CostModel& cost, const TrainConfig& config) {
  config.validate();
  terms.validate();
  rates.validate();
  cost.validate();
  if (train.n_paths() == 0) throw ParameterError("train_deep_hedge: empty training batch");

  TrainResult result{PolicyParams::initialize(config.architecture(), config.seed,
                                              config.v0_init * terms.p0),
                     {}};
  PolicyParams& params = result.params;
  if (config.check_gradient) {
    // The initial network sits on the cost and cash kinks (zero position,
    // zero wealth), so the check runs at a nearby random point, with the
    // surrogate of the first epoch.
    PolicyParams probe = params;
    std::mt19937_64 engine(derive_seed(config.seed, {0x6b696e6bULL}));
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    for (double& w : probe.phi) w += jitter(engine);
    probe.v0 += (0.1 + jitter(engine)) * terms.p0;
    CostModel check_cost = cost;
    check_cost.kappa = std::max(cost.kappa, config.kappa_start);
    const auto report = gradient_check(probe, train, terms, rates, check_cost);
    if (report.max_rel_error > 1e-4) {
      throw DiagnosticError("train_deep_hedge: gradient check failed, relative error " +
                            format_double(report.max_rel_error) + " at index " +
                            std::to_string(report.worst_index));
    }
  }

  const std::size_t n_params = params.phi.size();
  // Optimized vector: the weights followed by v0 / P0.
  std::vector<double> x(n_params + 1);
  std::copy(params.phi.begin(), params.phi.end(), x.begin());
  x[n_params] = params.v0 / terms.p0;
  std::vector<double> g(n_params + 1);
  Adam adam(n_params + 1);

  const std::size_t batch = std::min(config.batch_paths, train.n_paths());
  const std::size_t per_epoch = train.n_paths() / batch;
  const double total_steps = static_cast<double>(config.n_epochs * per_epoch);
  std::size_t step = 0;

  CostModel epoch_cost = cost;
  for (std::size_t epoch = 1; epoch <= config.n_epochs; ++epoch) {
    if (config.kappa_start > cost.kappa && config.n_epochs > 1) {
      const double progress =
          static_cast<double>(epoch - 1) / static_cast<double>(config.n_epochs - 1);
      epoch_cost.kappa = config.kappa_start * std::pow(cost.kappa / config.kappa_start, progress);
    }
    CompensatedSum epoch_loss;
    double epoch_norm = 0.0;
    for (std::size_t b = 0; b < per_epoch; ++b) {
      std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n_params), params.phi.begin());
      params.v0 = x[n_params] * terms.p0;
      const LossGradient lg = hedging_loss_gradient(params, train, b * batch, batch, terms, rates,
                                                    epoch_cost, CostMode::Smooth);
      if (!std::isfinite(lg.loss)) {
        throw TrainingDivergence("train_deep_hedge: non-finite loss", epoch);
      }
      std::copy(lg.grad_phi.begin(), lg.grad_phi.end(), g.begin());
      g[n_params] = lg.grad_v0;
      double norm = 0.0;
      for (const double gi : g) norm += gi * gi;
      norm = std::sqrt(norm);
      if (!std::isfinite(norm)) {
        throw TrainingDivergence("train_deep_hedge: non-finite gradient", epoch);
      }
      if (norm > config.grad_clip) {
        const double s = config.grad_clip / norm;
        for (double& gi : g) gi *= s;
      }
      double lr = config.learning_rate;
      if (config.lr_schedule == LrSchedule::Cosine) {
        lr *= 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(step) / total_steps));
      }
      adam.step(x, g, lr);
      ++step;
      epoch_loss.add(lg.loss);
      epoch_norm += norm;
    }
    std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n_params), params.phi.begin());
    params.v0 = x[n_params] * terms.p0;
    result.log.epochs.push_back({epoch, epoch_loss.value() / static_cast<double>(per_epoch),
                                 epoch_norm / static_cast<double>(per_epoch), params.v0});
  }

  if (config.refit_v0) {
    const double before = params.v0;
    params.v0 = refit_initial_wealth(params, train, terms, rates, cost, CostMode::Hard);
    result.log.v0_refit_shift = params.v0 - before;
  }
  result.log.final_loss_smooth =
      hedging_loss(params, train, 0, train.n_paths(), terms, rates, cost, CostMode::Smooth);
  result.log.final_loss_hard =
      hedging_loss(params, train, 0, train.n_paths(), terms, rates, cost, CostMode::Hard);
  if (!std::isfinite(result.log.final_loss_smooth) || !std::isfinite(result.log.final_loss_hard)) {
    throw TrainingDivergence("train_deep_hedge: non-finite final loss", config.n_epochs);
  }
  return result;
}

namespace {

constexpr char kPolicyMagic[8] = {'D', 'L', 'P', 'P', 'O', 'L', '0', '1'};
constexpr std::uint32_t kPolicyVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParameterError("read_policy: truncated policy file");
  return value;
}

}  // namespace

void write_policy_binary(std::ostream& out, const PolicyParams& params) {
  params.validate();
  out.write(kPolicyMagic, sizeof kPolicyMagic);
  put<std::uint32_t>(out, kPolicyVersion);
  put<std::uint64_t>(out, params.phi.size());
  put<double>(out, params.v0);
  for (const double w : params.phi) put<double>(out, w);
}

std::string policy_shape_json(const PolicyParams& params) {
  nlohmann::json j;
  j["format"] = "dlp-policy";
  j["version"] = kPolicyVersion;
  j["inputs"] = Architecture::kInputs;
  j["hidden"] = params.arch.hidden;
  j["activation"] = to_string(params.arch.activation);
  j["price_scale"] = params.arch.price_scale;
  j["position_scale"] = params.arch.position_scale;
  j["n_params"] = params.phi.size();
  j["layout"] = "per layer: W row-major [out][in] then b; output layer last";
  return j.dump(2);
}

PolicyParams read_policy(std::istream& binary, const std::string& shape_json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(shape_json);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("read_policy: bad shape descriptor: ") + e.what());
  }
  PolicyParams p;
  try {
    if (j.at("version").get<std::uint32_t>() != kPolicyVersion) {
      throw ParameterError("read_policy: unsupported descriptor version");
    }
    p.arch.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    p.arch.activation = activation_from_string(j.at("activation").get<std::string>());
    p.arch.price_scale = j.at("price_scale").get<double>();
    p.arch.position_scale = j.at("position_scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("read_policy: bad shape descriptor: ") + e.what());
  }

  char magic[8];
  binary.read(magic, sizeof magic);
  if (!binary || std::memcmp(magic, kPolicyMagic, sizeof magic) != 0) {
    throw ParameterError("read_policy: not a policy file");
  }
  if (get<std::uint32_t>(binary) != kPolicyVersion) {
    throw ParameterError("read_policy: unsupported binary version");
  }
  const auto n = get<std::uint64_t>(binary);
  if (n != p.arch.n_params()) {
    throw ParameterError("read_policy: weight count does not match the descriptor");
  }
  p.v0 = get<double>(binary);
  p.phi.resize(n);
  for (double& w : p.phi) w = get<double>(binary);
  p.validate();
  return p;
}

}  // namespace dlp
