#pragma once

#include "nlslab/phase.hpp"
#include "nlslab/potentials.hpp"

namespace nls {

// Q(t,x) = int_0^t V^L(tau x) dtau and its x-derivatives, by adaptive
// Gauss-Kronrod to absolute tolerance `tol`.
double dollard_Q(const PotentialSpec& spec, double t, const Point& x, double tol = 1e-10);
Point dollard_gradQ(const PotentialSpec& spec, double t, const Point& x, double tol = 1e-10);
double dollard_laplacianQ(const PotentialSpec& spec, double t, const Point& x, double tol = 1e-10);

// Vtilde(t,x) = int_0^t (1/tau) {Q(tau,x) + x.grad Q(tau,x)} dtau, nested quadrature.
// The inner bracket equals tau V^L(tau x), so Vtilde = Q; this literal form is
// kept as a cross-check.
double dollard_Vtilde(const PotentialSpec& spec, double t, const Point& x, double tol = 1e-10);

// Psi_D = |x|^2/(2t) - Vtilde(t, x/t). gauge_residual holds the closed form
// d_t Psi_D + |grad Psi_D|^2/2 + V^L = |grad Vtilde(t,y)|^2/(2t^2).
PhaseField build_psi_dollard(const PotentialSpec& spec, double t, const GridSpec& g);

}  // namespace nls
