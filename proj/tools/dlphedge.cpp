#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dlp/analytic_pricer.hpp"
#include "dlp/config.hpp"
#include "dlp/deep_hedge.hpp"
#include "dlp/errors.hpp"
#include "dlp/experiment.hpp"
#include "dlp/numerics.hpp"
#include "dlp/parallel.hpp"
#include "dlp/verification.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kCellFailure = 1;
constexpr int kConfigError = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "YAML experiment configuration");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override the master seed");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

dlp::ExperimentConfig load(const Common& c) {
  dlp::ExperimentConfig cfg = dlp::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.threads > 0) cfg.threads = c.threads;
  if (cfg.threads > 0) dlp::set_max_threads(cfg.threads);
  return cfg;
}

fs::path default_plot_script(const char* argv0) {
  const fs::path exe = fs::weakly_canonical(fs::path(argv0));
  for (const fs::path& candidate :
       {exe.parent_path() / "plot_results.py", exe.parent_path().parent_path() / "tools" / "plot_results.py",
        exe.parent_path().parent_path().parent_path() / "tools" / "plot_results.py",
        exe.parent_path().parent_path() / "share" / "dlphedge" / "plot_results.py"}) {
    if (fs::exists(candidate)) return candidate;
  }
  return {};
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

int cmd_price(double sigma, double theta0, double theta, double p0, double horizon) {
  const dlp::LoanTerms terms{theta0, theta, p0, horizon};
  const auto q = dlp::down_and_out_price(terms, sigma);
  std::cout << "european_price," << dlp::format_double(q.value) << '\n'
            << "european_price_reflection," << dlp::format_double(q.value_reflection) << '\n'
            << "premium," << dlp::format_double(terms.premium()) << '\n'
            << "barrier," << dlp::format_double(terms.barrier()) << '\n';
  return kOk;
}

int cmd_simulate(const Common& c, std::size_t n_paths, const std::string& format) {
  const auto cfg = load(c);
  const auto cells = dlp::expand_cells(cfg);
  dlp::ExperimentConfig one = cfg;
  one.mc.n_train_paths = n_paths;
  const dlp::PathBatch batch = dlp::training_paths(cells.front(), one);
  const fs::path dir = cfg.output_dir;
  if (format == "binary") {
    auto f = open_out(dir / "paths.bin", true);
    dlp::write_binary(f, batch);
  } else {
    auto f = open_out(dir / "paths.csv");
    dlp::write_csv(f, batch);
  }
  std::cout << "wrote " << n_paths << " paths to " << dir << '\n';
  return kOk;
}

int cmd_train(const Common& c) {
  auto cfg = load(c);
  cfg.experiment = dlp::ExperimentId::TrainCurve;
  cfg.strategies = {"deep"};
  cfg.plot = false;
  const auto outcome = dlp::run_experiment(cfg);
  outcome.table.write_csv(std::cout);
  return outcome.table.any_failed() ? kCellFailure : kOk;
}

int cmd_evaluate(const Common& c, const std::string& policy_dir) {
  const auto cfg = load(c);
  const auto cell = dlp::expand_cells(cfg).front();
  std::ifstream bin(fs::path(policy_dir) / "policy.bin", std::ios::binary);
  std::ifstream js(fs::path(policy_dir) / "policy.json");
  if (!bin || !js) throw dlp::ConfigError("evaluate: policy.bin/policy.json not found in " + policy_dir);
  std::stringstream shape;
  shape << js.rdbuf();
  const dlp::PolicyParams params = dlp::read_policy(bin, shape.str());
  dlp::ResultTable table;
  auto add = [&](const std::string& name, const dlp::Strategy& s, double v0) {
    dlp::ResultRow row;
    row.mu = cell.mu;
    row.sigma = cell.sigma;
    row.theta0 = cell.terms.theta0;
    row.spread = dlp::RateGrid::spread_of(cell.rates);
    row.fee = cell.cost.fee;
    row.strategy = name;
    row.v0 = v0;
    row.premium = cell.terms.premium();
    try {
      row.metrics = dlp::evaluate_strategy(s, v0, cell, cfg);
    } catch (const std::exception& e) {
      row.status = "failed";
      row.error = e.what();
    }
    table.rows.push_back(row);
  };
  add("deep", dlp::Strategy::neural(params), params.v0);
  add("delta", dlp::Strategy::delta(cell.rates), cell.terms.premium());
  table.write_csv(std::cout);
  if (!c.out.empty()) {
    auto f = open_out(fs::path(c.out) / "evaluation.csv");
    table.write_csv(f);
  }
  return table.any_failed() ? kCellFailure : kOk;
}

int cmd_experiment(const Common& c, const char* argv0, bool no_plot) {
  auto cfg = load(c);
  if (no_plot) cfg.plot = false;
  const auto outcome = dlp::run_experiment(cfg, default_plot_script(argv0));
  std::cout << "experiment " << dlp::to_string(cfg.experiment) << ": " << outcome.table.rows.size()
            << " rows, " << outcome.files.size() << " files in " << cfg.output_dir << '\n';
  for (const auto& row : outcome.table.rows) {
    if (row.status != "ok") std::cerr << "cell failed: " << row.strategy << ": " << row.error << '\n';
  }
  return outcome.table.any_failed() ? kCellFailure : kOk;
}

int cmd_verify(const Common& c, std::size_t oracle_paths) {
  if (c.threads > 0) dlp::set_max_threads(c.threads);
  dlp::VerifyOptions opts;
  opts.oracle_paths = oracle_paths;
  if (c.seed) opts.seed = *c.seed;
  bool all = true;
  for (const auto& r : dlp::run_verification(opts)) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " | " << r.detail << '\n';
    all = all && r.pass;
  }
  return all ? kOk : kCellFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pricing and hedging of collateralized crypto loans"};
  app.require_subcommand(1);

  double sigma = 0.5, theta0 = 0.83, theta = 0.9, p0 = 1.0, horizon = 0.2;
  auto* price = app.add_subcommand("price", "Closed-form held-to-horizon loan price");
  price->add_option("--sigma", sigma, "Volatility");
  price->add_option("--theta0", theta0, "Initial loan-to-value");
  price->add_option("--theta", theta, "Liquidation loan-to-value");
  price->add_option("--p0", p0, "Initial collateral price");
  price->add_option("--horizon", horizon, "Horizon in years");

  Common sim_c, train_c, eval_c, exp_c, verify_c;
  std::size_t n_paths = 1000;
  std::string format = "csv";
  auto* simulate = app.add_subcommand("simulate", "Simulate price paths for the first grid cell");
  add_common(simulate, sim_c, true);
  simulate->add_option("--paths", n_paths, "Number of paths");
  simulate->add_option("--format", format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));

  auto* train = app.add_subcommand("train", "Train the deep hedge on the first grid cell");
  add_common(train, train_c, true);

  std::string policy_dir;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a saved policy against the delta hedge");
  add_common(evaluate, eval_c, true);
  evaluate->add_option("--policy", policy_dir, "Directory with policy.bin and policy.json")->required();

  bool no_plot = false;
  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment");
  add_common(experiment, exp_c, true);
  experiment->add_flag("--no-plot", no_plot, "Skip the plotting step");

  std::size_t oracle_paths = 100000;
  auto* verify = app.add_subcommand("verify", "Run the pricing and replication checks");
  add_common(verify, verify_c, false);
  verify->add_option("--oracle-paths", oracle_paths, "Paths per bridge-oracle cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*price) return cmd_price(sigma, theta0, theta, p0, horizon);
    if (*simulate) return cmd_simulate(sim_c, n_paths, format);
    if (*train) return cmd_train(train_c);
    if (*evaluate) return cmd_evaluate(eval_c, policy_dir);
    if (*experiment) return cmd_experiment(exp_c, argv[0], no_plot);
    if (*verify) return cmd_verify(verify_c, oracle_paths);
  } catch (const dlp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const dlp::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCellFailure;
  }
  return kOk;
}
