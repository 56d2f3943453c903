#include "nlslab/scattering.hpp"

#include "nlslab/dollard.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/hjphase.hpp"

#include <cmath>
#include <memory>

namespace nls {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::Index;

namespace {

constexpr Complex I1(0.0, 1.0);

StepPlan problem_plan(const FinalStateProblem& p) {
  StepPlan plan = p.plan;
  plan.nu = p.datum.nu;
  return plan;
}

// (U1 + U2)(s) f
ComplexField u12(const PhaseField& ph, const CutoffChi& chi, double s, const ComplexField& f) {
  UParts u = apply_U_all(ph, chi, s, f);
  u.u1.values += u.u2.values;
  return u.u1;
}

}  // namespace

PhaseFamily free_family(const GridSpec& g) {
  return [g](double t) { return free_phase(g, t); };
}

PhaseFamily dollard_family(const PotentialSpec& spec, const GridSpec& g) {
  return [spec, g](double t) { return build_psi_dollard(spec, t, g); };
}

PhaseFamily yafaev_family(const PotentialSpec& spec, const CutoffChi& chi, const GridSpec& g,
                          std::vector<double> times) {
  if (!spec.has_long_range()) return free_family(g);
  const double r_max = 1.01 * std::sqrt(static_cast<double>(g.n())) * g.half_length();
  auto table = std::make_shared<const RadialPhaseTable>(spec, chi, std::move(times), r_max);
  return [table, g](double t) { return table->field_at(t, g); };
}

ComplexField nonlinearity(const ComplexField& u, double nu) {
  ComplexField out = u;
  const double p = 2.0 / u.grid.n();
  out.values = nu * u.values.abs().pow(p) * u.values;
  return out;
}

ComplexField commutator_C(const PhaseField& phase, const CutoffChi& chi, const PotentialSpec& spec, double s,
                          const ComplexField& f) {
  if (f.space != Space::frequency) throw UsageError("commutator_C takes frequency-lattice input");
  if (!(phase.grid == f.grid)) throw GridMismatch("phase and field grids differ");
  const GridSpec& g = f.grid;
  const int n = g.n();

  // v = D F M F^{-1} f carries no chirp, so its spectral gradient is well resolved
  const ComplexField v = apply_D(fft(apply_M(ifft(f), s)), s);
  const std::vector<ArrayXcd> grad_v = spectral_gradient(v);
  std::vector<ArrayXd> x;
  for (int d = 0; d < n; ++d) x.push_back(g.coordinate(Space::position, d));

  const ArrayXd gauge = phase.kind == PhaseKind::free ? sample_VL(spec, g) : phase.gauge_residual;
  const ArrayXd VS = sample_VS(spec, g);
  const ArrayXd r = g.radius_squared(Space::position).sqrt();

  ComplexField out(g, Space::position, s);
  for (Index i = 0; i < g.size(); ++i) {
    const Complex e = std::polar(1.0, phase.psi[i]);
    const Complex Z = e * v.values[i];
    const double y = r[i] / s;
    const CutoffChi::Radial c = chi.radial(y);

    Complex a = -gauge[i] * v.values[i] + 0.5 * I1 * (phase.laplacian_psi[i] - n / s) * v.values[i];
    for (int d = 0; d < n; ++d) a += I1 * (phase.grad_psi[d][i] - x[d][i] / s) * grad_v[d][i];
    Complex val = (1.0 - c.value) * (e * a - VS[i] * Z);

    if (c.d1 != 0.0 || c.d2 != 0.0) {
      // (grad chi)(x/s) = d1 y_hat, (Lap chi)(x/s) = d2 + (n-1) d1 / |y|
      const double lap = c.d2 + (n - 1) * c.d1 / y;
      Complex bracket = lap / (2 * s * s) * Z;
      for (int d = 0; d < n; ++d) {
        const double gchi = c.d1 * x[d][i] / r[i];
        const Complex grad_Z = e * (I1 * phase.grad_psi[d][i] * v.values[i] + grad_v[d][i]);
        bracket += -I1 * (x[d][i] / (s * s)) * gchi * Z + gchi / s * grad_Z;
      }
      val -= bracket;
    }
    out.values[i] = val;
  }
  return out;
}

Remainder remainder_E1(const FinalStateProblem& p, double t, double T_max) {
  const double nu = p.datum.nu;
  auto G = [&](double s) {
    const ComplexField fw = nonlinearity(ozawa_W(p.datum, s), nu);
    ComplexField src = u12(p.phase(s), p.chi, s, fw);
    src.values *= I1 / s;
    return src;
  };
  DuhamelTail tail = duhamel_tail(G, t, T_max, p.plan, p.spec);
  ComplexField value = tail.value;
  value.values -= u12(p.phase(t), p.chi, t, ozawa_W(p.datum, t)).values;
  return {value, tail};
}

Remainder remainder_E2(const FinalStateProblem& p, double t, double T_max) {
  auto G = [&](double s) {
    ComplexField src = commutator_C(p.phase(s), p.chi, p.spec, s, ozawa_W(p.datum, s));
    src.values *= -I1;
    return src;
  };
  DuhamelTail tail = duhamel_tail(G, t, T_max, p.plan, p.spec);
  return {tail.value, tail};
}

std::vector<ComplexField> remainder_E_trajectory(const FinalStateProblem& p, double T, double T_max,
                                                 DuhamelTail* tail) {
  std::vector<ComplexField> E(duhamel_nodes(T, T_max, p.plan.dt).size());
  ComplexField local;  // -(U1+U2)W at the node just requested
  auto G = [&](int, double s) {
    const PhaseField ph = p.phase(s);
    const ComplexField w = ozawa_W(p.datum, s);
    const UParts uw = apply_U_all(ph, p.chi, s, w);
    local = uw.u1;
    local.values = -(uw.u1.values + uw.u2.values);
    ComplexField src = u12(ph, p.chi, s, nonlinearity(w, p.datum.nu));
    src.values *= I1 / s;
    src.values -= I1 * commutator_C(ph, p.chi, p.spec, s, w).values;
    return src;
  };
  auto at = [&](int j, double s, const ComplexField& I) {
    E[j] = I;
    E[j].values += local.values;
    E[j].time = s;
  };
  const DuhamelTail t = duhamel_sweep(G, T, T_max, p.plan, p.spec, at);
  if (tail) *tail = t;
  return E;
}

RemainderSeries remainder_series(const FinalStateProblem& p, double T, double T_max) {
  RemainderSeries out;
  out.t = duhamel_nodes(T, T_max, p.plan.dt);
  const size_t m = out.t.size();
  out.U1W.resize(m);
  out.U2W.resize(m);
  out.CW.resize(m);
  out.E1.resize(m);
  out.E2.resize(m);
  ComplexField local;
  auto G1 = [&](int j, double s) {
    const PhaseField ph = p.phase(s);
    const ComplexField w = ozawa_W(p.datum, s);
    const UParts uw = apply_U_all(ph, p.chi, s, w);
    out.U1W[j] = norm_l2(uw.u1);
    out.U2W[j] = norm_l2(uw.u2);
    local = uw.u1;
    local.values = -(uw.u1.values + uw.u2.values);
    ComplexField src = u12(ph, p.chi, s, nonlinearity(w, p.datum.nu));
    src.values *= I1 / s;
    return src;
  };
  auto at1 = [&](int j, double, const ComplexField& I) { out.E1[j] = norm_l2(ComplexField(I.grid, I.values + local.values, I.space)); };
  out.tail1 = duhamel_sweep(G1, T, T_max, p.plan, p.spec, at1);
  auto G2 = [&](int j, double s) {
    ComplexField src = commutator_C(p.phase(s), p.chi, p.spec, s, ozawa_W(p.datum, s));
    out.CW[j] = norm_l2(src);
    src.values *= -I1;
    return src;
  };
  out.tail2 = duhamel_sweep(G2, T, T_max, p.plan, p.spec, [&](int j, double, const ComplexField& I) { out.E2[j] = norm_l2(I); });
  return out;
}

std::vector<ComplexField> apply_K(const FinalStateProblem& p, const std::vector<ComplexField>& u,
                                  const std::vector<ComplexField>& up) {
  if (u.size() < 2 || u.size() != up.size()) throw UsageError("apply_K needs matching node trajectories");
  const double T = u.front().time, T_max = u.back().time;
  if (duhamel_nodes(T, T_max, p.plan.dt).size() != u.size()) throw UsageError("trajectory is not on the Duhamel nodes");
  std::vector<ComplexField> K(u.size());
  auto G = [&](int j, double) {
    ComplexField src = nonlinearity(u[j], p.datum.nu);
    src.values = I1 * (src.values - nonlinearity(up[j], p.datum.nu).values);
    return src;
  };
  duhamel_sweep(G, T, T_max, p.plan, p.spec, [&](int j, double, const ComplexField& I) { K[j] = I; });
  return K;
}

std::vector<ComplexField> solve_final_state_backward(const FinalStateProblem& p, double T_start,
                                                     const std::vector<double>& times, const EvolveOptions& opt) {
  for (double t : times)
    if (t > T_start) throw UsageError("final-state times must not exceed T_start");
  const ComplexField u0 = profile_up(p.datum, p.phase(T_start), T_start);
  return evolve_to(u0, T_start, times, problem_plan(p), p.spec, opt);
}

bool admissible(int n, double q, double r) {
  if (!(q >= 2.0 && r >= 2.0)) return false;
  if (n == 2 && q == 2.0 && std::isinf(r)) return false;
  return std::abs(2.0 / q + n / r - 0.5 * n) <= 1e-12;
}

std::pair<double, double> b_window(int n, double gamma, const PotentialSpec& spec) {
  return {0.25 * n, std::min({0.5 * gamma, spec.rho_L(), spec.rho_S() - 1.0, 1.0})};
}

std::pair<double, double> contraction_pair(int n) {
  switch (n) {
    case 1: return {4.0, INFINITY};
    case 2: return {4.0, 4.0};
    case 3: return {2.0, 6.0};
  }
  throw UsageError("dimension must be 1, 2 or 3");
}

XTNorm xt_norm_series(const std::vector<double>& t, const std::vector<double>& l2, const std::vector<double>& lr,
                      double T, double b, double q, double r) {
  if (t.empty() || t.size() != l2.size() || t.size() != lr.size()) throw UsageError("xt_norm needs a non-empty trajectory");
  XTNorm x{T, b, q, r};
  // tail integrals of |u|_r^q from the horizon down
  double acc = 0.0, run_max = 0.0;
  for (size_t j = t.size(); j-- > 0;) {
    if (j + 1 < t.size()) {
      if (t[j + 1] <= t[j]) throw UsageError("xt_norm times must increase");
      if (!std::isinf(q)) acc += 0.5 * (t[j + 1] - t[j]) * (std::pow(lr[j], q) + std::pow(lr[j + 1], q));
    }
    run_max = std::max(run_max, lr[j]);
    if (t[j] < T) continue;
    const double w = std::pow(t[j], b);
    x.sup_l2_term = std::max(x.sup_l2_term, w * l2[j]);
    x.strichartz_term = std::max(x.strichartz_term, w * (std::isinf(q) ? run_max : std::pow(acc, 1.0 / q)));
  }
  x.value = x.sup_l2_term + x.strichartz_term;
  return x;
}

XTNorm xt_norm(const std::vector<ComplexField>& traj, double T, double b, double q, double r) {
  if (traj.empty()) throw UsageError("xt_norm needs a non-empty trajectory");
  if (!admissible(traj.front().grid.n(), q, r)) throw UsageError("(q, r) is not an admissible pair");
  std::vector<double> t, l2, lr;
  for (const ComplexField& u : traj) {
    t.push_back(u.time);
    l2.push_back(norm_l2(u));
    lr.push_back(norm_lp(u, r));
  }
  return xt_norm_series(t, l2, lr, T, b, q, r);
}

PicardResult picard_iterate(const FinalStateProblem& p, double T, double T_max, const PicardOptions& opt) {
  const int n = p.datum.u_plus_hat.grid.n();
  if (!admissible(n, opt.q, opt.r)) throw UsageError("(q, r) is not an admissible pair");
  const auto [b_lo, b_hi] = b_window(n, p.datum.gamma, p.spec);
  if (!(opt.b > b_lo && opt.b < b_hi)) throw UsageError("b outside (" + std::to_string(b_lo) + ", " + std::to_string(b_hi) + ")");

  PicardResult res;
  res.nodes = duhamel_nodes(T, T_max, p.plan.dt);
  const size_t m = res.nodes.size();
  std::vector<ComplexField> up(m);
  for (size_t j = 0; j < m; ++j) up[j] = profile_up(p.datum, p.phase(res.nodes[j]), res.nodes[j]);
  const std::vector<ComplexField> E = remainder_E_trajectory(p, T, T_max, &res.remainder_tail);
  std::vector<ComplexField> u = up;

  int rising = 0;
  std::vector<double> l2(m), lr(m);
  for (int k = 0; k < opt.iterations; ++k) {
    auto G = [&](int j, double) {
      ComplexField src = nonlinearity(u[j], p.datum.nu);
      src.values = I1 * (src.values - nonlinearity(up[j], p.datum.nu).values);
      return src;
    };
    auto at = [&](int j, double s, const ComplexField& K) {
      ComplexField next = up[j];
      next.values += K.values + E[j].values;
      next.time = s;
      ComplexField diff = next;
      diff.values -= u[j].values;
      l2[j] = norm_l2(diff);
      lr[j] = norm_lp(diff, opt.r);
      u[j] = std::move(next);
    };
    duhamel_sweep(G, T, T_max, p.plan, p.spec, at);
    res.distances.push_back(xt_norm_series(res.nodes, l2, lr, T, opt.b, opt.q, opt.r).value);
    if (k > 0) {
      const double prev = res.distances[k - 1], cur = res.distances[k];
      res.ratios.push_back(prev > 0.0 ? cur / prev : 0.0);
      rising = cur > prev ? rising + 1 : 0;
      if (rising >= 3)
        throw ContractionFailure("Picard iteration diverges (|u_plus_hat|_inf = " + std::to_string(p.datum.amplitude) +
                                     ", T = " + std::to_string(T) + ")",
                                 p.datum.amplitude, T);
    }
  }
  double next_keep = T;
  for (size_t j = 0; j < m; ++j)
    if (j == 0 || (opt.checkpoint_every > 0.0 && res.nodes[j] >= next_keep - 1e-9)) {
      res.final_iterate.push_back(u[j]);
      next_keep = res.nodes[j] + (opt.checkpoint_every > 0.0 ? opt.checkpoint_every : INFINITY);
    }
  return res;
}

}  // namespace nls
