#pragma once

#include "nlslab/grid.hpp"
#include "nlslab/potentials.hpp"

#include <functional>
#include <vector>

namespace nls {

enum class Scheme { strang };

struct StepPlan {
  GridSpec grid;
  double dt = 0.01;
  Scheme scheme = Scheme::strang;
  Eigen::ArrayXcd kinetic_multiplier;  // e^{-i dt |xi|^2/2} on the frequency lattice
  bool include_nonlinearity = true;
  bool include_potential = true;
  double nu = 0.0;
};

StepPlan make_plan(const GridSpec& g, double dt, double nu, bool include_potential = true,
                   bool include_nonlinearity = true);

// One Strang step of i u_t = -Lap u/2 + V u + nu |u|^{2/n} u.
ComplexField step(const ComplexField& u, const StepPlan& plan, const PotentialSpec& spec);

struct EvolveOptions {
  double edge_tolerance = 1e-8;  // DomainEscape above this edge mass fraction
  int check_every = 50;          // steps between edge checks; the final state is always checked
};

// |t1 - t0| is split into equal steps no longer than plan.dt; t1 < t0 runs backward.
ComplexField evolve(const ComplexField& u0, double t0, double t1, const StepPlan& plan, const PotentialSpec& spec,
                    const EvolveOptions& opt = {});
// States at each of `times`, which must be monotone away from t0.
std::vector<ComplexField> evolve_to(const ComplexField& u0, double t0, const std::vector<double>& times,
                                    const StepPlan& plan, const PotentialSpec& spec, const EvolveOptions& opt = {});

// Observed order log2(|u_dt - u_{dt/2}| / |u_{dt/2} - u_{dt/4}|) over [t0, t0 + span].
double richardson_order(const ComplexField& u0, double t0, double span, const StepPlan& plan,
                        const PotentialSpec& spec);
// Halves plan.dt until the observed order is within 0.2 of 2, or the
// dt-to-dt/2 difference is below `floor` relative to |u0|.
StepPlan refine_plan(const ComplexField& u0, double t0, const StepPlan& plan, const PotentialSpec& spec,
                     double floor = 1e-12, int max_halvings = 8);

// Nodes t = s_0 < ... < s_m = T_max, equally spaced, spacing at most dt.
std::vector<double> duhamel_nodes(double t, double T_max, double dt);

struct DuhamelTail {
  ComplexField value;
  double tail_size;      // |G(T_max)| T_max
  double tail_estimate;  // int_{T_max}^inf |G| from the fitted decay of |G(s)|; inf if not integrable
  int nodes;
};

// Trapezoid rule for I(s_j) = int_{s_j}^{T_max} e^{-i(s_j - s)H} G(s) ds at every
// node of duhamel_nodes(t, T_max, plan.dt), H linear (nu ignored), in one
// backward sweep. G(j, s_j) is requested in order j = m, ..., 0; at(j, s_j, I)
// is called right after.
DuhamelTail duhamel_sweep(const std::function<ComplexField(int, double)>& G, double t, double T_max,
                          const StepPlan& plan, const PotentialSpec& spec,
                          const std::function<void(int, double, const ComplexField&)>& at = {});
DuhamelTail duhamel_tail(const std::function<ComplexField(double)>& G, double t, double T_max,
                         const StepPlan& plan, const PotentialSpec& spec);

}  // namespace nls
