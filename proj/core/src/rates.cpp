#include "dlp/rates.hpp"

#include "dlp/errors.hpp"

namespace dlp {

void RateSet::validate() const {
  if (!(r_cD >= 0.0 && r_bD >= r_cD)) {
    throw ParameterError("RateSet: require r_bD >= r_cD >= 0");
  }
  if (!(r_cE >= 0.0 && r_bE >= r_cE)) {
    throw ParameterError("RateSet: require r_bE >= r_cE >= 0");
  }
}

RateSet RateSet::with_spread(double r_cD, double r_cE, double spread) {
  return RateSet{r_cD + spread, r_cD, r_cE + spread, r_cE};
}

RateSet RateSet::aave_2024_04() { return RateSet{0.12, 0.08, 0.025, 0.017}; }

}  // namespace dlp
