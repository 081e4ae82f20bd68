#include "dlp/market_model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "dlp/errors.hpp"
#include "dlp/numerics.hpp"
#include "dlp/parallel.hpp"
#include "dlp/random.hpp"

namespace dlp {

void GbmParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("GbmParams: sigma must be positive and finite");
  }
  if (!std::isfinite(mu)) {
    throw ParameterError("GbmParams: mu must be finite");
  }
}

TimeGrid::TimeGrid(double dt, std::size_t n_steps) : dt_(dt), n_steps_(n_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ParameterError("TimeGrid: dt must be positive");
  }
  if (n_steps == 0) {
    throw ParameterError("TimeGrid: need at least one step");
  }
  times_.resize(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) {
    times_[k] = static_cast<double>(k) * dt;
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t n_steps) {
  if (!(horizon > 0.0) || n_steps == 0) {
    throw ParameterError("TimeGrid::uniform: horizon and step count must be positive");
  }
  return TimeGrid(horizon / static_cast<double>(n_steps), n_steps);
}

PathBatch::PathBatch(TimeGrid grid, std::size_t n_paths, std::vector<double> prices,
                     std::uint64_t seed)
    : grid_(std::move(grid)), n_paths_(n_paths), prices_(std::move(prices)), seed_(seed) {
  if (prices_.size() != n_paths_ * n_points()) {
    throw ParameterError("PathBatch: price matrix does not match n_paths x (n_steps + 1)");
  }
}

PathBatch simulate_paths(const GbmParams& params, const TimeGrid& grid, double p0,
                         std::size_t n_paths, std::uint64_t seed) {
  params.validate();
  if (!(p0 > 0.0)) throw ParameterError("simulate_paths: p0 must be positive");
  if (n_paths == 0) throw ParameterError("simulate_paths: n_paths must be >= 1");

  const std::size_t n_points = grid.n_steps() + 1;
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  const double log_drift = (params.mu - 0.5 * params.sigma * params.sigma) * dt;
  const double log_vol = params.sigma * sqrt_dt;
  std::vector<double> prices(n_paths * n_points);

  for_each_chunk(n_paths, 256, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      NormalStream normal(derive_seed(seed, {i}));
      double* row = prices.data() + i * n_points;
      row[0] = p0;
      double p = p0;
      if (params.scheme == Scheme::ExactLognormal) {
        for (std::size_t k = 1; k < n_points; ++k) {
          p *= std::exp(log_drift + log_vol * normal());
          row[k] = p;
        }
      } else {
        for (std::size_t k = 1; k < n_points; ++k) {
          p += params.mu * p * dt + params.sigma * p * sqrt_dt * normal();
          if (!(p > 0.0)) {
            throw NumericError("simulate_paths: Euler step produced a non-positive price", i, k);
          }
          row[k] = p;
        }
      }
    }
  });
  return PathBatch(grid, n_paths, std::move(prices), seed);
}

GbmParams risk_neutral_drift(const GbmParams& params, const RateSet& rates) {
  params.validate();
  GbmParams q = params;
  q.mu = rates.r_cD - rates.r_cE;
  return q;
}

MeasureChange market_price_of_risk(const GbmParams& params, const RateSet& rates) {
  params.validate();
  return {(params.mu + rates.r_cE - rates.r_cD) / params.sigma};
}

void write_csv(std::ostream& out, const PathBatch& batch) {
  out << "path";
  for (const double t : batch.grid().times()) out << ',' << format_double(t);
  out << '\n';
  for (std::size_t i = 0; i < batch.n_paths(); ++i) {
    out << i;
    for (const double p : batch.path(i)) out << ',' << format_double(p);
    out << '\n';
  }
}

namespace {

constexpr char kPathMagic[8] = {'D', 'L', 'P', 'P', 'A', 'T', 'H', '1'};

static_assert(std::endian::native == std::endian::little,
              "binary dumps assume a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ParameterError("read_binary: truncated stream");
  return v;
}

}  // namespace

void write_binary(std::ostream& out, const PathBatch& batch) {
  out.write(kPathMagic, sizeof(kPathMagic));
  put<std::uint64_t>(out, batch.n_paths());
  put<std::uint64_t>(out, batch.grid().n_steps());
  put<double>(out, batch.grid().dt());
  put<std::uint64_t>(out, batch.seed());
  const auto data = batch.data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

PathBatch read_binary(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kPathMagic, sizeof(magic)) != 0) {
    throw ParameterError("read_binary: not a path dump");
  }
  const auto n_paths = get<std::uint64_t>(in);
  const auto n_steps = get<std::uint64_t>(in);
  const auto dt = get<double>(in);
  const auto seed = get<std::uint64_t>(in);
  std::vector<double> prices(n_paths * (n_steps + 1));
  in.read(reinterpret_cast<char*>(prices.data()),
          static_cast<std::streamsize>(prices.size() * sizeof(double)));
  if (!in) throw ParameterError("read_binary: truncated price matrix");
  return PathBatch(TimeGrid(dt, n_steps), n_paths, std::move(prices), seed);
}

}  // namespace dlp
