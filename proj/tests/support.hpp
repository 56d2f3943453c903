#pragma once

#include "nlslab/grid.hpp"

#include <cmath>
#include <random>

namespace nls::testing {

// Random smooth field: random Fourier coefficients below `kmax` (in units of
// the frequency spacing), times a wide Gaussian envelope so it is small at the box edge.
inline ComplexField random_smooth_field(const GridSpec& g, std::mt19937_64& rng, int kmax = 8) {
  std::normal_distribution<double> normal;
  ComplexField hat(g, Space::frequency);
  const Eigen::ArrayXd r2 = g.radius_squared(Space::frequency);
  const double cut = std::pow(kmax * g.dxi(), 2);
  for (Eigen::Index i = 0; i < hat.values.size(); ++i)
    if (r2[i] <= cut) hat.values[i] = Complex(normal(rng), normal(rng));
  ComplexField f = ifft(hat);
  const Eigen::ArrayXd x2 = g.radius_squared(Space::position);
  const double L = g.half_length();
  f.values *= (-x2 / (0.18 * L * L)).exp();
  return f;
}

inline ComplexField gaussian(const GridSpec& g, double width = 1.0) {
  ComplexField f(g, Space::position);
  f.values = (-g.radius_squared(Space::position) / (2.0 * width * width)).exp().cast<Complex>();
  return f;
}

inline double rel_l2(const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b) {
  return std::sqrt((a - b).abs2().sum() / b.abs2().sum());
}

}  // namespace nls::testing
