#pragma once

#include <limits>
#include <vector>

namespace nls {

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int samples = 0;
};

// Least squares of log(value) against log(t) over samples with t in [t_lo, t_hi].
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& value,
                   double t_lo = 0.0, double t_hi = std::numeric_limits<double>::infinity());

// n points log-spaced on [a, b], endpoints included.
std::vector<double> log_spaced(double a, double b, int n);

}  // namespace nls
