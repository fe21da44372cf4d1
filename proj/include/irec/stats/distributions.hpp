#pragma once

#include "irec/common/error.hpp"

namespace irec::stats {

class InvalidParameter : public DataError {
 public:
  using DataError::DataError;
};

// Upper-tail probabilities. Degrees of freedom must be >= 1 and x finite,
// otherwise InvalidParameter.
double normal_sf(double x);
double chi2_sf(double x, double df);
double f_sf(double x, double d1, double d2);

// Q(a, x) = Gamma(a, x) / Gamma(a), for a > 0 and x >= 0.
double regularized_gamma_q(double a, double x);
// I_x(a, b), for a, b > 0 and 0 <= x <= 1.
double regularized_beta(double x, double a, double b);

}  // namespace irec::stats
