#include "ptd/normal.hpp"

#include <boost/math/distributions/normal.hpp>

#include "ptd/error.hpp"

namespace ptd {

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -HUGE_VAL;
    if (p == 1.0) return HUGE_VAL;
    throw NumericError("norm_quantile: probability outside [0, 1]");
  }
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, p);
}

}  // namespace ptd
