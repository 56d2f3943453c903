#pragma once

#include "nlslab/grid.hpp"
#include "nlslab/potentials.hpp"

namespace nls {

// e^{-itH} u0 for the linear discrete Hamiltonian (same spectral Laplacian as
// the split-step scheme) by dense Hermitian eigendecomposition. Tiny grids only.
ComplexField dense_evolve(const ComplexField& u0, double t, const PotentialSpec& spec);

}  // namespace nls
