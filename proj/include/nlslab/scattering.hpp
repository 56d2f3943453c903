#pragma once

#include "nlslab/phase.hpp"
#include "nlslab/potentials.hpp"
#include "nlslab/profile.hpp"
#include "nlslab/propagator.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace nls {

using PhaseFamily = std::function<PhaseField(double)>;

PhaseFamily free_family(const GridSpec& g);
PhaseFamily dollard_family(const PotentialSpec& spec, const GridSpec& g);
// Radial potentials only: one characteristic sweep tabulates every time in `times`.
PhaseFamily yafaev_family(const PotentialSpec& spec, const CutoffChi& chi, const GridSpec& g,
                          std::vector<double> times);

struct FinalStateProblem {
  ScatteringDatum datum;
  PotentialSpec spec;
  CutoffChi chi;
  PhaseFamily phase;
  StepPlan plan;
};

// F(u) = nu |u|^{2/n} u, pointwise in the field's own space
ComplexField nonlinearity(const ComplexField& u, double nu);

// C(s) f for the commutator of i d_s - H with U3(s); f on the frequency lattice.
ComplexField commutator_C(const PhaseField& phase, const CutoffChi& chi, const PotentialSpec& spec, double s,
                          const ComplexField& f);

struct Remainder {
  ComplexField value;
  DuhamelTail tail;
};
// -(U1+U2)W(t) + i int_t^{T_max} e^{-i(t-s)H} (U1+U2)(s) F(W(s))/s ds
Remainder remainder_E1(const FinalStateProblem& p, double t, double T_max);
// -i int_t^{T_max} e^{-i(t-s)H} C(s) W(s) ds
Remainder remainder_E2(const FinalStateProblem& p, double t, double T_max);
// E1 + E2 at every node of duhamel_nodes(T, T_max, plan.dt)
std::vector<ComplexField> remainder_E_trajectory(const FinalStateProblem& p, double T, double T_max,
                                                 DuhamelTail* tail = nullptr);

// L^2 norms of the remainder pieces at every node of duhamel_nodes(T, T_max, plan.dt)
struct RemainderSeries {
  std::vector<double> t, U1W, U2W, CW, E1, E2;
  DuhamelTail tail1, tail2;
};
RemainderSeries remainder_series(const FinalStateProblem& p, double T, double T_max);

// i int_t^{T_max} e^{-i(t-s)H} (F(u(s)) - F(u_p(s))) ds on the nodes of u
std::vector<ComplexField> apply_K(const FinalStateProblem& p, const std::vector<ComplexField>& u,
                                  const std::vector<ComplexField>& up);

// u(T_start) = u_p(T_start), evolved backward; states at `times` (descending, <= T_start).
std::vector<ComplexField> solve_final_state_backward(const FinalStateProblem& p, double T_start,
                                                     const std::vector<double>& times,
                                                     const EvolveOptions& opt = {});

struct XTNorm {
  double T = 1.0, b = 0.0, q = 2.0, r = 2.0;
  double sup_l2_term = 0.0, strichartz_term = 0.0, value = 0.0;
};
bool admissible(int n, double q, double r);
// (n/4, min{gamma/2, rho_L, rho_S - 1, 1})
std::pair<double, double> b_window(int n, double gamma, const PotentialSpec& spec);
// Strichartz pair used for the contraction: (4, inf), (4, 4), (2, 6) for n = 1, 2, 3
std::pair<double, double> contraction_pair(int n);
XTNorm xt_norm(const std::vector<ComplexField>& traj, double T, double b, double q, double r);
// same from per-checkpoint L^2 and L^r norms
XTNorm xt_norm_series(const std::vector<double>& t, const std::vector<double>& l2, const std::vector<double>& lr,
                      double T, double b, double q, double r);

struct PicardOptions {
  int iterations = 5;
  double b = 0.5;
  double q = 4.0, r = INFINITY;
  double checkpoint_every = 0.0;  // keep iterate states this far apart (0: only the first node)
};
struct PicardResult {
  std::vector<double> distances;  // d_k = |u^(k+1) - u^(k)|_{X_T}
  std::vector<double> ratios;     // d_{k+1} / d_k
  std::vector<ComplexField> final_iterate;  // at the checkpoints
  std::vector<double> nodes;
  DuhamelTail remainder_tail;
};
// u^(0) = u_p, u^(k+1) = u_p + K[u^(k)] + E on [T, T_max]. ContractionFailure
// after three consecutive increases of d_k.
PicardResult picard_iterate(const FinalStateProblem& p, double T, double T_max, const PicardOptions& opt = {});

}  // namespace nls
