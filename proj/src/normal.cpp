#include "tailcouple/normal.hpp"

#include <boost/math/distributions/normal.hpp>

#include "tailcouple/error.hpp"

namespace tailcouple {

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<>(), x); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange,
                "normal quantile needs p in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<>(), p);
}

}  // namespace tailcouple
