#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "dlp/deep_hedge.hpp"
#include "dlp/errors.hpp"
#include "dlp/market_model.hpp"
#include "dlp/random.hpp"
#include "dlp/strategy.hpp"
#include "dlp/wealth_engine.hpp"

using namespace dlp;

namespace {

const RateSet kAave = RateSet::aave_2024_04();
const LoanTerms kTerms{0.83, 0.9, 3000.0, 0.2};

PolicyParams jittered(std::uint64_t seed, double v0) {
  Architecture a;
  a.hidden = {8, 8};
  PolicyParams p = PolicyParams::initialize(a, seed, v0);
  std::mt19937_64 g(seed + 1);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (double& w : p.phi) w += u(g);
  return p;
}

// Walks the layout to compute the Frobenius norm of each weight matrix.
double lipschitz_bound(const Architecture& a, const std::vector<double>& phi) {
  double L = 1.0;
  std::size_t in = Architecture::kInputs, off = 0;
  std::vector<std::size_t> widths = a.hidden;
  widths.push_back(1);
  for (const std::size_t out : widths) {
    double f = 0.0;
    for (std::size_t i = 0; i < out * in; ++i) f += phi[off + i] * phi[off + i];
    L *= std::sqrt(f);
    off += out * in + out;
    in = out;
  }
  return L;
}

}  // namespace

TEST(Delta, Position) {
  EXPECT_EQ(delta_position(0.0, kAave), 1.0);
  EXPECT_EQ(delta_position(0.7, RateSet{0.1, 0.05, 0.0, 0.0}), 1.0);
  EXPECT_NEAR(delta_position(0.2, kAave), std::exp(0.0034), 1e-15);
  EXPECT_NEAR(delta_position(0.2, kAave), 1.003406, 1e-6);
}

TEST(Strategy, Kinds) {
  const Strategy d = Strategy::delta(kAave);
  EXPECT_NEAR(d.position({0.1, 1.0, 1.0, 0.0, true}), std::exp(0.0017), 1e-15);
  EXPECT_EQ(d.position({0.1, 1.0, 1.0, 0.5, false}), 0.0);
  const Strategy c = Strategy::constant(0.7);
  EXPECT_EQ(c.position({0.1, 1.0, 1.0, 0.0, false}), 0.7);
  EXPECT_EQ(d.name(), "delta");
  EXPECT_EQ(c.name(), "constant");

  PolicyParams p = PolicyParams::initialize(Architecture{}, 3, 0.0);
  std::fill(p.phi.begin(), p.phi.end(), 0.0);
  p.phi.back() = 0.25;
  const Strategy n = Strategy::neural(p);
  EXPECT_EQ(n.name(), "deep");
  EXPECT_DOUBLE_EQ(n.position({0.1, 1.2, 1.0, 0.5, true}), 0.75);
  EXPECT_EQ(n.position({0.1, 1.2, 1.0, 0.5, false}), 0.0);
}

TEST(Mlp, DeadAndBiasOnly) {
  PolicyParams p = PolicyParams::initialize(Architecture{}, 3, 0.0);
  std::fill(p.phi.begin(), p.phi.end(), 0.0);
  EXPECT_EQ(policy_eval(p, 1.3, -2.0), 0.0);
  p.phi.back() = -0.4;
  for (const double x : {0.2, 1.0, 5.0}) EXPECT_DOUBLE_EQ(policy_eval(p, x, x - 1), -0.4);
}

TEST(Mlp, ShapeMismatch) {
  PolicyParams p = PolicyParams::initialize(Architecture{}, 3, 0.0);
  p.phi.pop_back();
  EXPECT_THROW(policy_eval(p, 1.0, 0.0), ParameterError);
  EXPECT_THROW(Strategy::neural(p), ParameterError);
}

TEST(Mlp, ParameterCount) {
  Architecture a;
  a.hidden = {32, 32};
  EXPECT_EQ(a.n_params(), (2 * 32 + 32) + (32 * 32 + 32) + (32 + 1));
  EXPECT_EQ(a.n_hidden_units(), 64u);
}

TEST(Mlp, LipschitzBound) {
  for (const auto act : {Activation::Tanh, Activation::Sigmoid}) {
    Architecture a;
    a.activation = act;
    const PolicyParams p = PolicyParams::initialize(a, 5, 0.0, 1.0);
    const double L = lipschitz_bound(a, p.phi) * (act == Activation::Sigmoid ? 0.0625 : 1.0);
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> h(a.n_hidden_units());
    for (int n = 0; n < 2000; ++n) {
      const double x0 = u(g), x1 = u(g), d0 = 0.1 * u(g), d1 = 0.1 * u(g);
      const double y = mlp_forward(a, p.phi, x0, x1, h);
      const double z = mlp_forward(a, p.phi, x0 + d0, x1 + d1, h);
      EXPECT_LE(std::abs(z - y), L * std::hypot(d0, d1) * (1 + 1e-12));
    }
  }
}

TEST(Mlp, BackwardMatchesDifferences) {
  for (const auto act : {Activation::Tanh, Activation::Sigmoid}) {
    Architecture a;
    a.hidden = {5, 4, 3};
    a.activation = act;
    PolicyParams p = PolicyParams::initialize(a, 8, 0.0, 1.0);
    std::vector<double> h(a.n_hidden_units()), grad(p.phi.size(), 0.0), scratch(10);
    const double x0 = 0.3, x1 = -0.7;
    mlp_forward(a, p.phi, x0, x1, h);
    const double gx1 = mlp_backward(a, p.phi, x0, x1, h, 1.0, grad, scratch);
    const double eps = 1e-6;
    std::vector<double> tmp(h.size());
    for (std::size_t i = 0; i < p.phi.size(); ++i) {
      auto phi = p.phi;
      phi[i] += eps;
      const double up = mlp_forward(a, phi, x0, x1, tmp);
      phi[i] -= 2 * eps;
      const double dn = mlp_forward(a, phi, x0, x1, tmp);
      EXPECT_NEAR(grad[i], (up - dn) / (2 * eps), 1e-8) << i;
    }
    const double fx = (mlp_forward(a, p.phi, x0, x1 + eps, tmp) -
                       mlp_forward(a, p.phi, x0, x1 - eps, tmp)) / (2 * eps);
    EXPECT_NEAR(gx1, fx, 1e-8);
  }
}

TEST(Activation, Names) {
  EXPECT_EQ(activation_from_string(to_string(Activation::Tanh)), Activation::Tanh);
  EXPECT_EQ(activation_from_string(to_string(Activation::Sigmoid)), Activation::Sigmoid);
  EXPECT_THROW(activation_from_string("relu6"), ParameterError);
}

class DeepHedge : public ::testing::Test {
 protected:
  PathBatch batch = simulate_paths({0.0, 0.3, Scheme::ExactLognormal}, TimeGrid::uniform(0.2, 73),
                                   3000.0, 256, 4);
  CostModel cost{20.0, 1e-4, 1e-2};
};

TEST_F(DeepHedge, GradientCheckMicroInstance) {
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    const auto rep = gradient_check(jittered(seed, 0.1 * kTerms.p0 + 400.0), batch, kTerms, kAave,
                                    cost, 8, 3, 1e-5);
    EXPECT_LE(rep.max_rel_error, 1e-4) << "worst index " << rep.worst_index;
    EXPECT_LE(rep.norm_rel_error, 1e-6);
    EXPECT_EQ(rep.n_checked, jittered(seed, 0).phi.size() + 1);
  }
}

TEST_F(DeepHedge, LossMatchesRollForward) {
  const PolicyParams p = jittered(7, 520.0);
  for (const auto mode : {CostMode::Hard, CostMode::Smooth}) {
    const auto tr = roll_forward(batch, Strategy::neural(p), p.v0, kTerms, kAave, cost, mode);
    double ref = 0.0;
    for (std::size_t i = 0; i < tr.n_paths(); ++i)
      for (std::size_t k = 0; k < tr.n_points(); ++k) {
        const double e = (tr.target(i)[k] - (tr.wealth(i)[k] - tr.cost(i)[k])) / kTerms.p0;
        ref += e * e;
      }
    ref /= static_cast<double>(tr.n_paths());
    const double loss = hedging_loss(p, batch, 0, batch.n_paths(), kTerms, kAave, cost, mode);
    EXPECT_NEAR(loss, ref, 1e-11 * ref);
    const auto lg = hedging_loss_gradient(p, batch, 0, batch.n_paths(), kTerms, kAave, cost, mode);
    EXPECT_NEAR(lg.loss, ref, 1e-11 * ref);
  }
}

TEST_F(DeepHedge, InitialWealthGradientFromAccrualFactors) {
  const PolicyParams p = jittered(9, 540.0);
  const auto tr =
      roll_forward(batch, Strategy::neural(p), p.v0, kTerms, kAave, cost, CostMode::Hard);
  const double dt = batch.grid().dt();
  double ref = 0.0;
  for (std::size_t i = 0; i < tr.n_paths(); ++i) {
    double dv = 1.0;
    for (std::size_t k = 0; k < tr.n_points(); ++k) {
      const double e = (tr.target(i)[k] - (tr.wealth(i)[k] - tr.cost(i)[k])) / kTerms.p0;
      ref += -2.0 * e * dv;
      const double cash = tr.wealth(i)[k] - tr.position(i)[k] * tr.price(i)[k];
      dv *= 1.0 + (cash > 0.0 ? kAave.r_cD : kAave.r_bD) * dt;
    }
  }
  ref /= static_cast<double>(tr.n_paths());
  const auto lg =
      hedging_loss_gradient(p, batch, 0, batch.n_paths(), kTerms, kAave, cost, CostMode::Hard);
  EXPECT_NEAR(lg.grad_v0, ref, 1e-10 * std::abs(ref));
  const double h = 1e-6;
  PolicyParams up = p, dn = p;
  up.v0 += h * kTerms.p0;
  dn.v0 -= h * kTerms.p0;
  const double fd = (hedging_loss(up, batch, 0, 256, kTerms, kAave, cost, CostMode::Hard) -
                     hedging_loss(dn, batch, 0, 256, kTerms, kAave, cost, CostMode::Hard)) /
                    (2 * h);
  EXPECT_NEAR(lg.grad_v0, fd, 1e-6 * std::abs(fd));
}

TEST_F(DeepHedge, RefitMinimizesOverInitialWealth) {
  const PolicyParams p = jittered(10, 300.0);
  PolicyParams q = p;
  q.v0 = refit_initial_wealth(p, batch, kTerms, kAave, cost, CostMode::Hard);
  const double at = hedging_loss(q, batch, 0, 256, kTerms, kAave, cost, CostMode::Hard);
  EXPECT_LT(at, hedging_loss(p, batch, 0, 256, kTerms, kAave, cost, CostMode::Hard));
  for (const double d : {-1.0, 1.0}) {
    PolicyParams r = q;
    r.v0 += d;
    EXPECT_GE(hedging_loss(r, batch, 0, 256, kTerms, kAave, cost, CostMode::Hard), at);
  }
}

TEST_F(DeepHedge, TrainingIsDeterministicAndDecreases) {
  TrainConfig cfg;
  cfg.n_epochs = 6;
  cfg.batch_paths = 64;
  cfg.hidden_width = 8;
  cfg.learning_rate = 5e-3;
  cfg.seed = 12;
  const auto a = train_deep_hedge(batch, kTerms, kAave, cost, cfg);
  const auto b = train_deep_hedge(batch, kTerms, kAave, cost, cfg);
  EXPECT_TRUE(a.params == b.params);
  std::stringstream la, lb;
  a.log.write_csv(la);
  b.log.write_csv(lb);
  EXPECT_EQ(la.str(), lb.str());
  ASSERT_EQ(a.log.epochs.size(), 6u);
  EXPECT_LE(a.log.epochs.back().loss, a.log.epochs.front().loss);
  EXPECT_TRUE(std::isfinite(a.log.final_loss_hard));
  EXPECT_EQ(la.str().rfind("epoch,loss,grad_norm,v0\n", 0), 0u);
}

TEST_F(DeepHedge, ConfigValidation) {
  TrainConfig cfg;
  cfg.n_epochs = 0;
  EXPECT_THROW(train_deep_hedge(batch, kTerms, kAave, cost, cfg), ParameterError);
  cfg = TrainConfig{};
  cfg.learning_rate = -1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(Policy, BinaryRoundTrip) {
  Architecture a;
  a.hidden = {4, 6};
  a.activation = Activation::Sigmoid;
  a.price_scale = 0.2;
  const PolicyParams p = PolicyParams::initialize(a, 77, 512.5);
  std::stringstream bin;
  write_policy_binary(bin, p);
  const std::string shape = policy_shape_json(p);
  EXPECT_TRUE(read_policy(bin, shape) == p);
}

TEST(Policy, RejectsCorruptInput) {
  const PolicyParams p = PolicyParams::initialize(Architecture{}, 1, 0.0);
  std::stringstream bad("XXXXXXXXXXXXXXXXXXXXXXXX");
  EXPECT_THROW(read_policy(bad, policy_shape_json(p)), ParameterError);
  std::stringstream bin;
  write_policy_binary(bin, p);
  Architecture other;
  other.hidden = {3};
  EXPECT_THROW(read_policy(bin, policy_shape_json(PolicyParams::initialize(other, 1, 0.0))),
               ParameterError);
  std::stringstream bin2;
  write_policy_binary(bin2, p);
  EXPECT_THROW(read_policy(bin2, "{not json"), ParameterError);
}
