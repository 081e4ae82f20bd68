#include "dlp/experiment.hpp"

#include <openssl/evp.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "dlp/analytic_pricer.hpp"
#include "dlp/errors.hpp"
#include "dlp/numerics.hpp"
#include "dlp/parallel.hpp"
#include "dlp/random.hpp"
#include "json.hpp"

namespace dlp {

namespace fs = std::filesystem;

std::vector<Cell> expand_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  const auto rate_sets = config.rates.expand();
  for (const double mu : config.mu) {
    for (const double sigma : config.sigma) {
      for (const double theta0 : config.theta0) {
        for (const auto& rates : rate_sets) {
          for (const double fee : config.fee) {
            Cell c;
            c.index = cells.size();
            c.mu = mu;
            c.sigma = sigma;
            c.terms = {theta0, config.theta, config.p0, config.horizon};
            c.rates = rates;
            c.cost = {fee, config.epsilon, config.kappa};
            c.seed = derive_seed(config.seed, {c.index});
            cells.push_back(c);
          }
        }
      }
    }
  }
  return cells;
}

TimeGrid cell_grid(const ExperimentConfig& config) {
  const double exact = config.horizon * static_cast<double>(config.steps_per_year);
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(exact - 1e-9)));
  return TimeGrid::uniform(config.horizon, n);
}

PathBatch training_paths(const Cell& cell, const ExperimentConfig& config) {
  return simulate_paths({cell.mu, cell.sigma, config.scheme}, cell_grid(config), cell.terms.p0,
                        config.mc.n_train_paths, derive_seed(cell.seed, {0}));
}

PathBatch evaluation_paths(const Cell& cell, const ExperimentConfig& config, std::size_t repeat) {
  return simulate_paths({cell.mu, cell.sigma, config.scheme}, cell_grid(config), cell.terms.p0,
                        config.mc.n_eval_paths, derive_seed(cell.seed, {1 + repeat}));
}

EvalMetrics evaluate_strategy(const Strategy& strategy, double v0, const Cell& cell,
                              const ExperimentConfig& config) {
  const std::size_t n = config.mc.n_eval_repeats;
  std::vector<double> mre(n), mse(n);
  double excluded = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const PathBatch paths = evaluation_paths(cell, config, r);
    const HedgeTrajectory traj =
        roll_forward(paths, strategy, v0, cell.terms, cell.rates, cell.cost, CostMode::Hard);
    const RelativeErrorReport rep = mean_relative_error(traj, config.mc.error_floor * cell.terms.p0);
    mre[r] = rep.value;
    mse[r] = mean_squared_error(traj);
    excluded += static_cast<double>(rep.excluded) / static_cast<double>(rep.included + rep.excluded);
  }
  const McEstimate a = sample_mean(mre);
  const McEstimate b = sample_mean(mse);
  const double scale = std::sqrt(static_cast<double>(n));
  return {a.mean, a.std_error * scale, b.mean, b.std_error * scale,
          excluded / static_cast<double>(n)};
}

bool ResultTable::any_failed() const {
  return std::ranges::any_of(rows, [](const ResultRow& r) { return r.status != "ok"; });
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out + "\"";
}

}  // namespace

void ResultTable::write_csv(std::ostream& out) const {
  out << "mu,sigma,theta0,spread,fee,strategy,mre_mean,mre_std,mse_mean,mse_std,"
         "excluded_fraction,v0,premium,status,error\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << format_double(r.mu) << ',' << format_double(r.sigma) << ',' << format_double(r.theta0)
        << ',' << format_double(r.spread) << ',' << format_double(r.fee) << ',' << r.strategy << ','
        << format_double(m.mre_mean) << ',' << format_double(m.mre_std) << ','
        << format_double(m.mse_mean) << ',' << format_double(m.mse_std) << ','
        << format_double(m.excluded_fraction) << ',' << format_double(r.v0) << ','
        << format_double(r.premium) << ',' << r.status << ',' << csv_escape(r.error) << '\n';
  }
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sha256: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

namespace {

struct CellOutput {
  std::vector<ResultRow> rows;
  std::optional<TrainResult> trained;
  double seconds = 0.0;
};

ResultRow base_row(const Cell& cell, const std::string& strategy) {
  ResultRow r;
  r.mu = cell.mu;
  r.sigma = cell.sigma;
  r.theta0 = cell.terms.theta0;
  r.spread = RateGrid::spread_of(cell.rates);
  r.fee = cell.cost.fee;
  r.strategy = strategy;
  r.premium = cell.terms.premium();
  return r;
}

CellOutput run_cell(const Cell& cell, const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  CellOutput out;
  for (const auto& name : config.strategies) {
    ResultRow row = base_row(cell, name);
    try {
      if (name == "deep") {
        TrainConfig tc = config.train;
        tc.seed = derive_seed(config.train.seed, {cell.index});
        out.trained = train_deep_hedge(training_paths(cell, config), cell.terms, cell.rates,
                                       cell.cost, tc);
        row.v0 = out.trained->params.v0;
        row.metrics = evaluate_strategy(Strategy::neural(out.trained->params), row.v0, cell, config);
      } else if (name == "delta") {
        row.v0 = cell.terms.premium();
        row.metrics = evaluate_strategy(Strategy::delta(cell.rates), row.v0, cell, config);
      } else {
        row.v0 = cell.terms.premium();
        row.metrics = evaluate_strategy(Strategy::constant(0.0), row.v0, cell, config);
      }
    } catch (const std::exception& e) {
      row.status = "failed";
      row.error = e.what();
    }
    out.rows.push_back(std::move(row));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  // Opens root/rel for writing and records it.
  std::ofstream open(const fs::path& rel, bool binary = false) {
    const fs::path full = root_ / rel;
    fs::create_directories(full.parent_path());
    std::ofstream f(full, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + full.string());
    files_.push_back(rel);
    return f;
  }
  const fs::path& root() const { return root_; }
  std::vector<fs::path>& files() { return files_; }

 private:
  fs::path root_;
  std::vector<fs::path> files_;
};

void write_fig1(const ExperimentConfig& config, OutputDir& dir) {
  std::vector<double> horizons(config.curve.n_points);
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    horizons[i] = config.curve.t_max * static_cast<double>(i + 1) /
                  static_cast<double>(config.curve.n_points);
  }
  auto f = dir.open("fig1_curve.csv");
  f << "sigma,theta0,T,european_price,premium\n";
  for (const double sigma : config.sigma) {
    for (const double theta0 : config.theta0) {
      const LoanTerms terms{theta0, config.theta, config.p0, config.horizon};
      for (const auto& pt : barrier_vs_premium_curve(terms, sigma, horizons)) {
        f << format_double(sigma) << ',' << format_double(theta0) << ','
          << format_double(pt.horizon) << ',' << format_double(pt.european_price) << ','
          << format_double(pt.premium) << '\n';
      }
    }
  }
}

void write_traces(const Cell& cell, const ExperimentConfig& config, const CellOutput& out,
                  OutputDir& dir) {
  const PathBatch paths = evaluation_paths(cell, config, 0);
  auto emit = [&](const std::string& name, const Strategy& s, double v0) {
    const HedgeTrajectory traj =
        roll_forward(paths, s, v0, cell.terms, cell.rates, cell.cost, CostMode::Hard);
    auto f = dir.open("trace_" + name + ".csv");
    write_trajectory_csv(f, traj, config.trace_paths);
    auto g = dir.open("trace_" + name + "_summary.csv");
    write_trajectory_summary_csv(g, traj);
  };
  if (out.trained) emit("deep", Strategy::neural(out.trained->params), out.trained->params.v0);
  emit("delta", Strategy::delta(cell.rates), cell.terms.premium());
}

void write_policy(const TrainResult& trained, OutputDir& dir) {
  {
    auto f = dir.open("policy.bin", true);
    write_policy_binary(f, trained.params);
  }
  auto g = dir.open("policy.json");
  g << policy_shape_json(trained.params) << '\n';
}

void write_price_vs_spread(const ResultTable& table, OutputDir& dir) {
  auto f = dir.open("price_vs_spread.csv");
  f << "mu,sigma,theta0,fee,spread,v0,premium,status\n";
  for (const auto& r : table.rows) {
    if (r.strategy != "deep") continue;
    f << format_double(r.mu) << ',' << format_double(r.sigma) << ',' << format_double(r.theta0)
      << ',' << format_double(r.fee) << ',' << format_double(r.spread) << ','
      << format_double(r.v0) << ',' << format_double(r.premium) << ',' << r.status << '\n';
  }
}

bool run_plot(const ExperimentConfig& config, const fs::path& script, OutputDir& dir) {
  if (!config.plot || script.empty()) return false;
  if (!fs::exists(script)) {
    std::cerr << "warning: plot script " << script << " not found; skipping plots\n";
    return false;
  }
  const std::string cmd = "python3 \"" + script.string() + "\" --experiment " +
                          to_string(config.experiment) + " --dir \"" + dir.root().string() +
                          "\" > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    std::cerr << "warning: plotting failed (exit " << rc << "); numeric outputs are unaffected\n";
    return false;
  }
  for (const auto& entry : fs::directory_iterator(dir.root())) {
    if (entry.path().extension() == ".png") {
      dir.files().push_back(fs::relative(entry.path(), dir.root()));
    }
  }
  return true;
}

void write_manifest(const ExperimentConfig& config, const ExperimentOutcome& outcome,
                    const fs::path& root) {
  nlohmann::json j;
  j["experiment"] = to_string(config.experiment);
  const std::string canonical = dump_config(config);
  j["config_sha256"] = sha256_hex(canonical);
  j["config"] = canonical;
  j["seed"] = config.seed;
  j["train_seed"] = config.train.seed;
  j["normal_generator"] = "mt19937_64 per path, Box-Muller";
  nlohmann::json cells = nlohmann::json::array();
  double total = 0.0;
  for (const auto& t : outcome.timings) {
    cells.push_back({{"index", t.index}, {"seed", t.seed}, {"seconds", t.seconds}});
    total += t.seconds;
  }
  j["cells"] = cells;
  j["total_cell_seconds"] = total;
  j["any_failed"] = outcome.table.any_failed();
  j["plot_ok"] = outcome.plot_ok;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& rel : outcome.files) {
    const fs::path full = root / rel;
    files.push_back({{"path", rel.generic_string()},
                     {"sha256", sha256_file(full)},
                     {"bytes", fs::file_size(full)}});
  }
  j["files"] = files;
  std::ofstream f(root / "manifest.json", std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write manifest.json");
  f << j.dump(2) << '\n';
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config, const fs::path& plot_script) {
  config.validate();
  if (config.threads > 0) set_max_threads(config.threads);
  OutputDir dir(config.output_dir);
  ExperimentOutcome outcome;

  if (config.experiment == ExperimentId::Fig1Curve) {
    write_fig1(config, dir);
  } else {
    std::vector<Cell> cells = expand_cells(config);
    const bool single = config.experiment == ExperimentId::HedgeTrace ||
                        config.experiment == ExperimentId::TrainCurve;
    if (single) cells.resize(1);
    std::vector<CellOutput> outputs(cells.size());
    tbb::parallel_for(std::size_t{0}, cells.size(), [&](std::size_t i) {
      outputs[i] = run_cell(cells[i], config);
    });

    for (std::size_t i = 0; i < cells.size(); ++i) {
      for (auto& row : outputs[i].rows) outcome.table.rows.push_back(row);
      outcome.timings.push_back({cells[i].index, cells[i].seed, outputs[i].seconds});
    }
    if (config.experiment == ExperimentId::HedgeTrace) {
      try {
        write_traces(cells[0], config, outputs[0], dir);
      } catch (const std::exception& e) {
        ResultRow row = base_row(cells[0], "trace");
        row.status = "failed";
        row.error = e.what();
        outcome.table.rows.push_back(row);
      }
    }
    {
      auto f = dir.open("results.csv");
      outcome.table.write_csv(f);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!outputs[i].trained) continue;
      char name[32];
      std::snprintf(name, sizeof name, "cell_%03zu.csv", cells[i].index);
      auto f = dir.open(single ? fs::path("train_log.csv") : fs::path("train_logs") / name);
      outputs[i].trained->log.write_csv(f);
    }
    if (single && outputs[0].trained) write_policy(*outputs[0].trained, dir);
    if (config.experiment == ExperimentId::PriceVsSpread ||
        config.experiment == ExperimentId::Exp2SpreadCost) {
      write_price_vs_spread(outcome.table, dir);
    }
  }

  outcome.plot_ok = run_plot(config, plot_script, dir);
  outcome.files = dir.files();
  write_manifest(config, outcome, dir.root());
  return outcome;
}

}  // namespace dlp
