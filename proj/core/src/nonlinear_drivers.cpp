#include "dlp/nonlinear_drivers.hpp"

#include <cmath>

#include "dlp/errors.hpp"
#include "dlp/numerics.hpp"

namespace dlp {

namespace {

void check(const DriverInput& in) {
  if (!(in.sigma_t > 0.0)) throw ParameterError("driver: sigma_t must be positive");
}

double spread_terms(const DriverInput& in) {
  const RateSet& r = in.rates;
  return (r.r_bD - r.r_cD) * negative_part(in.y - in.z / in.sigma_t) +
         (r.r_bE - r.r_cE) / in.sigma_t * negative_part(in.z);
}

}  // namespace

double driver_f(const DriverInput& in, double mu_t) {
  check(in);
  const RateSet& r = in.rates;
  return r.r_cD * in.y - (r.r_bD - r.r_cD) * negative_part(in.y - in.z / in.sigma_t) +
         (r.r_cE - r.r_cD + mu_t) / in.sigma_t * in.z -
         (r.r_bE - r.r_cE) / in.sigma_t * negative_part(in.z);
}

double driver_g(const DriverInput& in) {
  check(in);
  return -in.rates.r_cD * in.y + spread_terms(in);
}

double driver_g_bar(const DriverInput& in) {
  check(in);
  return (in.rates.r_bD - in.rates.r_cD) * in.y + spread_terms(in);
}

ScaledState scale_state(double p_t, double v, double z, double t, const LoanTerms& terms,
                        const RateSet& rates) {
  if (!(terms.p0 > 0.0)) throw ParameterError("scale_state: P0 must be positive");
  const double discount = std::exp(-rates.r_bD * t) / terms.p0;
  return {p_t * std::exp((rates.r_cE - rates.r_bD) * t) / terms.p0, v * discount, z * discount};
}

UnscaledState unscale_state(const ScaledState& s, double t, const LoanTerms& terms,
                            const RateSet& rates) {
  if (!(terms.p0 > 0.0)) throw ParameterError("unscale_state: P0 must be positive");
  const double growth = std::exp(rates.r_bD * t) * terms.p0;
  return {s.S * terms.p0 * std::exp((rates.r_bD - rates.r_cE) * t), s.V * growth, s.Z * growth};
}

bool scaled_barrier_breached(const ScaledState& s, const LoanTerms& terms) {
  return s.S <= terms.barrier();
}

}  // namespace dlp
