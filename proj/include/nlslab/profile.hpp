#pragma once

#include "nlslab/grid.hpp"
#include "nlslab/phase.hpp"
#include "nlslab/potentials.hpp"

namespace nls {

// Final-state datum: u_plus_hat lives on the frequency lattice.
struct ScatteringDatum {
  ComplexField u_plus_hat;
  double c0 = 1.0;
  double gamma = 1.0;
  double nu = 1.0;
  double amplitude = 0.0;  // sup |u_plus_hat|
};

// Throws UsageError on a support leak below c0 or gamma outside its window.
void validate(const ScatteringDatum& d);

// amplitude * exp(-(|xi| - xi0)^2 / (2 sigma^2)), switched off smoothly on
// |xi| < c0 + width and exactly zero on |xi| <= c0.
ScatteringDatum gaussian_ring(const GridSpec& g, double c0, double xi0, double sigma, double amplitude,
                              double gamma, double nu, double width = 1.0);
// smooth bump exp(1 - 1/(1 - s^2)) on r_in < |xi| < r_out, peak value = amplitude
ScatteringDatum bump_annulus(const GridSpec& g, double r_in, double r_out, double amplitude, double gamma,
                             double nu);

// H^gamma norm of a frequency-lattice field as a function of xi, i.e.
// ||<x>^gamma F^{-1} f||.
double hat_sobolev(const ComplexField& hat, double gamma);
// (1 + ||u_plus_hat||_{H^gamma}^{2a/n}) ||u_plus_hat||_{H^gamma}
double Gamma_a(const ScatteringDatum& d, int a);
// ||e^{i lambda |u|^{2/n}} u||_{H^gamma} / ((1 + lambda^k ||u||_{H^gamma}^{2k/n}) ||u||_{H^gamma}), k = ceil(gamma)
double nonlinear_estimate_ratio(const ComplexField& u, double lambda, double gamma);

// M(t) f = e^{i|x|^2/(2t)} f (position space)
ComplexField apply_M(const ComplexField& f, double t);
ComplexField apply_M_psi(const ComplexField& f, const PhaseField& phase);
// D(t) f(x) = (it)^{-n/2} f(x/t): f sampled on its own lattice (position or
// frequency), result on the position lattice. GridMismatch if more than a
// 1e-12 fraction of the mass of f falls outside the rescaled box.
ComplexField apply_D(const ComplexField& f, double t);

// e^{-it|xi|^2/2} multiplier; returns the input's space
ComplexField free_propagate(const ComplexField& f, double t);
// M(t) D(t) F M(t) f as a separate composition (test path)
ComplexField free_propagate_mdfm(const ComplexField& f, double t);

// W(t) = e^{-i nu |u_plus_hat|^{2/n} log t} u_plus_hat and its exact t-derivative
ComplexField ozawa_W(const ScatteringDatum& d, double t);
ComplexField ozawa_W_dt(const ScatteringDatum& d, double t);

// u_p = e^{i Psi} D(t) W(t); a Dollard phase gives u_D
ComplexField profile_up(const ScatteringDatum& d, const PhaseField& phase, double t);
// same without Ozawa's phase: e^{i Psi} D(t) u_plus_hat
ComplexField profile_without_ozawa(const ScatteringDatum& d, const PhaseField& phase, double t);

// U1 = M_Psi D F (1 - M) F^{-1}, U2 = chi(x/t) M_Psi D F M F^{-1}, U3 = (1 - chi(x/t)) M_Psi D F M F^{-1};
// f on the frequency lattice, results on the position lattice.
struct UParts {
  ComplexField u1, u2, u3;
};
UParts apply_U_all(const PhaseField& phase, const CutoffChi& chi, double t, const ComplexField& f);
ComplexField apply_U(int j, const PhaseField& phase, const CutoffChi& chi, double t, const ComplexField& f);

}  // namespace nls
