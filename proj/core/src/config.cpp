#include "dlp/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "dlp/errors.hpp"
#include "dlp/numerics.hpp"

namespace dlp {

namespace {

constexpr std::pair<ExperimentId, const char*> kExperimentNames[] = {
    {ExperimentId::Fig1Curve, "fig1_curve"},
    {ExperimentId::Exp1Grid, "exp1_grid"},
    {ExperimentId::Exp2SpreadCost, "exp2_spread_cost"},
    {ExperimentId::HedgeTrace, "hedge_trace"},
    {ExperimentId::TrainCurve, "train_curve"},
    {ExperimentId::PriceVsSpread, "price_vs_spread"},
};

void reject_unknown(const YAML::Node& node, const std::string& section,
                    std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError("config: section '" + section + "' must be a mapping");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.contains(key)) {
      throw ConfigError("config: unknown key '" + key + "' in section '" + section + "'");
    }
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& section) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError("config: bad value for '" + section + "." + key + "': " + e.what());
  }
}

// Accepts a scalar or a sequence.
void read_list(const YAML::Node& node, const char* key, std::vector<double>& out,
               const std::string& section) {
  if (!node[key]) return;
  try {
    const YAML::Node v = node[key];
    if (v.IsSequence()) {
      out = v.as<std::vector<double>>();
    } else {
      out = {v.as<double>()};
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError("config: bad value for '" + section + "." + key + "': " + e.what());
  }
}

void require_nonempty(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw ConfigError(std::string("config: grid '") + name + "' is empty");
}

}  // namespace

std::string to_string(ExperimentId id) {
  for (const auto& [k, name] : kExperimentNames) {
    if (k == id) return name;
  }
  return "unknown";
}

ExperimentId experiment_from_string(const std::string& s) {
  for (const auto& [k, name] : kExperimentNames) {
    if (s == name) return k;
  }
  throw ConfigError("config: unknown experiment '" + s + "'");
}

std::vector<RateSet> RateGrid::expand() const {
  if (!use_spread) return {fixed};
  std::vector<RateSet> out;
  out.reserve(spreads.size());
  for (const double s : spreads) out.push_back(RateSet::with_spread(r_cD, r_cE, s));
  return out;
}

void ExperimentConfig::validate() const {
  require_nonempty(mu, "market.mu");
  require_nonempty(sigma, "market.sigma");
  require_nonempty(theta0, "terms.theta0");
  require_nonempty(fee, "cost.fee");
  if (rates.use_spread) require_nonempty(rates.spreads, "rates.spread");
  if (steps_per_year == 0) throw ConfigError("config: market.steps_per_year must be >= 1");
  if (mc.n_train_paths == 0 || mc.n_eval_paths == 0 || mc.n_eval_repeats == 0) {
    throw ConfigError("config: mc path counts and repeats must be >= 1");
  }
  if (!(mc.error_floor > 0.0)) throw ConfigError("config: mc.error_floor must be positive");
  if (curve.n_points == 0 || !(curve.t_max > 0.0)) {
    throw ConfigError("config: curve needs n_points >= 1 and t_max > 0");
  }
  if (strategies.empty()) throw ConfigError("config: no strategies selected");
  for (const auto& s : strategies) {
    if (s != "deep" && s != "delta" && s != "none") {
      throw ConfigError("config: unknown strategy '" + s + "' (deep, delta, none)");
    }
  }
  try {
    for (const double s : sigma) GbmParams{0.0, s, scheme}.validate();
    for (const double t0 : theta0) LoanTerms{t0, theta, p0, horizon}.validate();
    for (const auto& r : rates.expand()) r.validate();
    for (const double f : fee) CostModel{f, epsilon, kappa}.validate();
    train.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: YAML parse error: ") + e.what());
  }
  ExperimentConfig c;
  if (!root || root.IsNull()) throw ConfigError("config: empty document");
  reject_unknown(root, "root",
                 {"experiment", "seed", "output_dir", "threads", "plot", "market", "terms", "rates",
                  "cost", "mc", "train", "strategies", "curve", "trace"});
  if (!root["experiment"]) throw ConfigError("config: missing 'experiment'");
  c.experiment = experiment_from_string(root["experiment"].as<std::string>());
  read(root, "seed", c.seed, "root");
  std::string out_dir = c.output_dir.string();
  read(root, "output_dir", out_dir, "root");
  c.output_dir = out_dir;
  read(root, "threads", c.threads, "root");
  read(root, "plot", c.plot, "root");

  if (const auto m = root["market"]) {
    reject_unknown(m, "market", {"mu", "sigma", "scheme", "steps_per_year"});
    read_list(m, "mu", c.mu, "market");
    read_list(m, "sigma", c.sigma, "market");
    read(m, "steps_per_year", c.steps_per_year, "market");
    if (m["scheme"]) {
      const auto s = m["scheme"].as<std::string>();
      if (s == "exact") c.scheme = Scheme::ExactLognormal;
      else if (s == "euler") c.scheme = Scheme::EulerMaruyama;
      else throw ConfigError("config: market.scheme must be 'exact' or 'euler'");
    }
  }
  if (const auto t = root["terms"]) {
    reject_unknown(t, "terms", {"theta", "theta0", "p0", "horizon"});
    read(t, "theta", c.theta, "terms");
    read_list(t, "theta0", c.theta0, "terms");
    read(t, "p0", c.p0, "terms");
    read(t, "horizon", c.horizon, "terms");
  }
  if (const auto r = root["rates"]) {
    reject_unknown(r, "rates", {"r_bD", "r_cD", "r_bE", "r_cE", "spread"});
    read(r, "r_bD", c.rates.fixed.r_bD, "rates");
    read(r, "r_cD", c.rates.fixed.r_cD, "rates");
    read(r, "r_bE", c.rates.fixed.r_bE, "rates");
    read(r, "r_cE", c.rates.fixed.r_cE, "rates");
    if (r["spread"]) {
      if (r["r_bD"] || r["r_bE"]) {
        throw ConfigError("config: give either borrow rates or a spread grid, not both");
      }
      c.rates.use_spread = true;
      c.rates.r_cD = c.rates.fixed.r_cD;
      c.rates.r_cE = c.rates.fixed.r_cE;
      read_list(r, "spread", c.rates.spreads, "rates");
    }
  }
  if (const auto k = root["cost"]) {
    reject_unknown(k, "cost", {"fee", "epsilon", "kappa"});
    read_list(k, "fee", c.fee, "cost");
    read(k, "epsilon", c.epsilon, "cost");
    read(k, "kappa", c.kappa, "cost");
  }
  if (const auto m = root["mc"]) {
    reject_unknown(m, "mc", {"n_train_paths", "n_eval_paths", "n_eval_repeats", "error_floor"});
    read(m, "n_train_paths", c.mc.n_train_paths, "mc");
    read(m, "n_eval_paths", c.mc.n_eval_paths, "mc");
    read(m, "n_eval_repeats", c.mc.n_eval_repeats, "mc");
    read(m, "error_floor", c.mc.error_floor, "mc");
  }
  if (const auto t = root["train"]) {
    reject_unknown(t, "train",
                   {"epochs", "batch_paths", "learning_rate", "lr_schedule", "grad_clip",
                    "hidden_width", "hidden_layers", "activation", "price_scale", "position_scale",
                    "seed", "v0_init", "kappa_start", "refit_v0", "check_gradient"});
    TrainConfig& tc = c.train;
    read(t, "epochs", tc.n_epochs, "train");
    read(t, "batch_paths", tc.batch_paths, "train");
    read(t, "learning_rate", tc.learning_rate, "train");
    read(t, "grad_clip", tc.grad_clip, "train");
    read(t, "hidden_width", tc.hidden_width, "train");
    read(t, "hidden_layers", tc.n_hidden_layers, "train");
    read(t, "price_scale", tc.price_scale, "train");
    read(t, "position_scale", tc.position_scale, "train");
    read(t, "seed", tc.seed, "train");
    read(t, "v0_init", tc.v0_init, "train");
    read(t, "kappa_start", tc.kappa_start, "train");
    read(t, "refit_v0", tc.refit_v0, "train");
    read(t, "check_gradient", tc.check_gradient, "train");
    if (t["lr_schedule"]) {
      const auto s = t["lr_schedule"].as<std::string>();
      if (s == "cosine") tc.lr_schedule = LrSchedule::Cosine;
      else if (s == "constant") tc.lr_schedule = LrSchedule::Constant;
      else throw ConfigError("config: train.lr_schedule must be 'cosine' or 'constant'");
    }
    if (t["activation"]) {
      try {
        tc.activation = activation_from_string(t["activation"].as<std::string>());
      } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
  }
  if (root["strategies"]) {
    try {
      c.strategies = root["strategies"].as<std::vector<std::string>>();
    } catch (const YAML::Exception& e) {
      throw ConfigError(std::string("config: bad strategies list: ") + e.what());
    }
  }
  if (const auto k = root["curve"]) {
    reject_unknown(k, "curve", {"n_points", "t_max"});
    read(k, "n_points", c.curve.n_points, "curve");
    read(k, "t_max", c.curve.t_max, "curve");
  }
  if (const auto k = root["trace"]) {
    reject_unknown(k, "trace", {"n_paths"});
    read(k, "n_paths", c.trace_paths, "trace");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  auto seq = [&](const std::vector<double>& v) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const double x : v) out << format_double(x);
    out << YAML::EndSeq;
  };
  out << YAML::BeginMap;
  out << YAML::Key << "experiment" << YAML::Value << to_string(c.experiment);
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir.string();
  out << YAML::Key << "threads" << YAML::Value << c.threads;
  out << YAML::Key << "plot" << YAML::Value << c.plot;
  out << YAML::Key << "market" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mu" << YAML::Value;
  seq(c.mu);
  out << YAML::Key << "sigma" << YAML::Value;
  seq(c.sigma);
  out << YAML::Key << "scheme" << YAML::Value
      << (c.scheme == Scheme::ExactLognormal ? "exact" : "euler");
  out << YAML::Key << "steps_per_year" << YAML::Value << c.steps_per_year;
  out << YAML::EndMap;
  out << YAML::Key << "terms" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "theta" << YAML::Value << format_double(c.theta);
  out << YAML::Key << "theta0" << YAML::Value;
  seq(c.theta0);
  out << YAML::Key << "p0" << YAML::Value << format_double(c.p0);
  out << YAML::Key << "horizon" << YAML::Value << format_double(c.horizon);
  out << YAML::EndMap;
  out << YAML::Key << "rates" << YAML::Value << YAML::BeginMap;
  if (c.rates.use_spread) {
    out << YAML::Key << "r_cD" << YAML::Value << format_double(c.rates.r_cD);
    out << YAML::Key << "r_cE" << YAML::Value << format_double(c.rates.r_cE);
    out << YAML::Key << "spread" << YAML::Value;
    seq(c.rates.spreads);
  } else {
    out << YAML::Key << "r_bD" << YAML::Value << format_double(c.rates.fixed.r_bD);
    out << YAML::Key << "r_cD" << YAML::Value << format_double(c.rates.fixed.r_cD);
    out << YAML::Key << "r_bE" << YAML::Value << format_double(c.rates.fixed.r_bE);
    out << YAML::Key << "r_cE" << YAML::Value << format_double(c.rates.fixed.r_cE);
  }
  out << YAML::EndMap;
  out << YAML::Key << "cost" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "fee" << YAML::Value;
  seq(c.fee);
  out << YAML::Key << "epsilon" << YAML::Value << format_double(c.epsilon);
  out << YAML::Key << "kappa" << YAML::Value << format_double(c.kappa);
  out << YAML::EndMap;
  out << YAML::Key << "mc" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_train_paths" << YAML::Value << c.mc.n_train_paths;
  out << YAML::Key << "n_eval_paths" << YAML::Value << c.mc.n_eval_paths;
  out << YAML::Key << "n_eval_repeats" << YAML::Value << c.mc.n_eval_repeats;
  out << YAML::Key << "error_floor" << YAML::Value << format_double(c.mc.error_floor);
  out << YAML::EndMap;
  const TrainConfig& t = c.train;
  out << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "epochs" << YAML::Value << t.n_epochs;
  out << YAML::Key << "batch_paths" << YAML::Value << t.batch_paths;
  out << YAML::Key << "learning_rate" << YAML::Value << format_double(t.learning_rate);
  out << YAML::Key << "lr_schedule" << YAML::Value
      << (t.lr_schedule == LrSchedule::Cosine ? "cosine" : "constant");
  out << YAML::Key << "grad_clip" << YAML::Value << format_double(t.grad_clip);
  out << YAML::Key << "hidden_width" << YAML::Value << t.hidden_width;
  out << YAML::Key << "hidden_layers" << YAML::Value << t.n_hidden_layers;
  out << YAML::Key << "activation" << YAML::Value << to_string(t.activation);
  out << YAML::Key << "price_scale" << YAML::Value << format_double(t.price_scale);
  out << YAML::Key << "position_scale" << YAML::Value << format_double(t.position_scale);
  out << YAML::Key << "seed" << YAML::Value << t.seed;
  out << YAML::Key << "v0_init" << YAML::Value << format_double(t.v0_init);
  out << YAML::Key << "kappa_start" << YAML::Value << format_double(t.kappa_start);
  out << YAML::Key << "refit_v0" << YAML::Value << t.refit_v0;
  out << YAML::Key << "check_gradient" << YAML::Value << t.check_gradient;
  out << YAML::EndMap;
  out << YAML::Key << "strategies" << YAML::Value << YAML::Flow << c.strategies;
  out << YAML::Key << "curve" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_points" << YAML::Value << c.curve.n_points;
  out << YAML::Key << "t_max" << YAML::Value << format_double(c.curve.t_max);
  out << YAML::EndMap;
  out << YAML::Key << "trace" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_paths" << YAML::Value << c.trace_paths;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace dlp
