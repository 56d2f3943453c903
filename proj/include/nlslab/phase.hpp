#pragma once

#include "nlslab/grid.hpp"

#include <vector>

namespace nls {

enum class PhaseKind { free, yafaev, dollard };

std::string to_string(PhaseKind k);

// Sampled phase at time t. gauge_residual holds d_t Psi + |grad Psi|^2/2 + V^L,
// which is what the commutator term needs besides grad/Laplacian.
struct PhaseField {
  GridSpec grid;
  double t = 1.0;
  PhaseKind kind = PhaseKind::free;
  Eigen::ArrayXd psi;
  std::vector<Eigen::ArrayXd> grad_psi;
  Eigen::ArrayXd laplacian_psi;
  std::vector<Eigen::ArrayXd> theta;
  Eigen::ArrayXd gauge_residual;
};

// |x|^2/(2t); gauge residual is left at zero (no long-range part assumed).
PhaseField free_phase(const GridSpec& g, double t);

// sup of |grad Psi - x/t| and |Lap Psi - n/t| over grid points with |x| >= r_min
struct PhaseDeviation {
  double gradient;
  double laplacian;
};
PhaseDeviation phase_deviation(const PhaseField& phase, double r_min);

}  // namespace nls
