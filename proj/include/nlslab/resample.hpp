#pragma once

#include <Eigen/Core>

namespace nls {

// Band-limited trigonometric interpolation of samples living on src_origin +
// j*src_step (j < N, every axis) evaluated at dst_origin + m*dst_step.
// Separable chirp-z evaluation, O(N log N) per line. Targets falling outside
// the source period are set to zero.
Eigen::ArrayXcd resample_uniform(const Eigen::ArrayXcd& values, int n, int N, double src_origin,
                                 double src_step, double dst_origin, double dst_step);

}  // namespace nls
