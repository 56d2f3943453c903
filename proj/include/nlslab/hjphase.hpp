#pragma once

#include "nlslab/phase.hpp"
#include "nlslab/potentials.hpp"

#include <cstdint>
#include <vector>

namespace nls {

struct FlowOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  bool jacobian = false;
  bool action = false;
};

// Trajectory of dX/dt = Xi, dXi/dt = -grad V_T1(t, X) started at (x, xi) at time s.
struct FlowState {
  Point X, Xi;
  double t = 0.0, s = 0.0;
  bool has_jacobian = false;
  SmallMatrix dX_dx, dX_dxi, dXi_dx, dXi_dxi;
  double action = 0.0;  // int_s^t (|Xi|^2/2 - V_T1) dtau
};

FlowState hamilton_flow(const PotentialSpec& spec, const CutoffChi& chi, double t, double s, const Point& x,
                        const Point& xi, bool with_jacobian);
FlowState integrate_flow(const PotentialSpec& spec, const CutoffChi& chi, double t, double s, const Point& x,
                         const Point& xi, const FlowOptions& opt);
// States at each of `times` (monotone away from s) along one trajectory.
std::vector<FlowState> integrate_flow_at(const PotentialSpec& spec, const CutoffChi& chi,
                                         const std::vector<double>& times, double s, const Point& x,
                                         const Point& xi, const FlowOptions& opt);

// y with X(0, t, y, xi) = x
Point inverse_y(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x, const Point& xi);

struct Eikonal {
  double S;
  Point gradS;
  SmallMatrix hessS;
};
Eikonal eikonal_S(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& xi);

// Theta with grad_xi S(t, Theta) = x
Point solve_theta(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x);

// The trajectory leaving the origin at time 0 and reaching x at time t:
// psi = its action, theta = its final momentum, grad_theta = dXi/dp (dX/dp)^{-1}.
struct Characteristic {
  double psi;
  Point theta;
  SmallMatrix grad_theta;
  int iterations;
};
Characteristic characteristic_through(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x);

// Point-by-point construction, blended to |x|^2/(2t) through chi(2x/t).
PhaseField build_psi(const PotentialSpec& spec, const CutoffChi& chi, double t, const GridSpec& g);

// For radial potentials the characteristics from the origin are rays. One
// forward sweep over a fan of initial speeds tabulates psi, theta and
// d theta/dr at every requested time; grid values come from quintic Hermite
// interpolation in r.
class RadialPhaseTable {
 public:
  RadialPhaseTable(const PotentialSpec& spec, const CutoffChi& chi, std::vector<double> times, double r_max,
                   double dr = 0.25);

  const std::vector<double>& times() const { return times_; }
  PhaseField field(size_t k, const GridSpec& g) const;
  PhaseField field_at(double t, const GridSpec& g) const;

  struct Sample {
    double r, psi, theta, dtheta;
  };
  // ray nodes at time index k, sorted by radius
  const std::vector<Sample>& nodes(size_t k) const { return nodes_[k]; }
  Sample evaluate(size_t k, double r) const;

 private:
  PotentialSpec spec_;
  CutoffChi chi_;
  std::vector<double> times_;
  std::vector<std::vector<Sample>> nodes_;
};

// Doubles T1 from 1 until the probe set passes; returns that T1.
double auto_T1(const PotentialSpec& spec, const CutoffChi& chi, std::uint64_t seed = 1);
bool probes_pass(const PotentialSpec& spec, const CutoffChi& chi, std::uint64_t seed = 1);

}  // namespace nls
