#include "nlslab/propagator.hpp"

#include "nlslab/errors.hpp"
#include "nlslab/fit.hpp"

#include <cmath>

namespace nls {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::Index;

namespace {

// |xi|^2 in unshifted DFT order; the centred lattices only add phases that cancel
ArrayXd raw_symbol(const GridSpec& g) {
  const int N = g.points();
  ArrayXd k2(N);
  for (int k = 0; k < N; ++k) k2[k] = std::pow((k < N / 2 ? k : k - N) * g.step(Space::frequency), 2);
  ArrayXd out = ArrayXd::Zero(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const auto idx = g.multi_index(i);
    for (int d = 0; d < g.n(); ++d) out[i] += k2[idx[d]];
  }
  return out;
}

class Splitter {
 public:
  Splitter(const StepPlan& plan, const PotentialSpec& spec, double h)
      : g_(plan.grid), h_(h), nu_(plan.include_nonlinearity ? plan.nu : 0.0), p_(2.0 / plan.grid.n()) {
    const ArrayXd k2 = raw_symbol(g_);
    const double scale = 1.0 / static_cast<double>(g_.size());
    half_.resize(k2.size());
    full_.resize(k2.size());
    for (Index i = 0; i < k2.size(); ++i) {
      half_[i] = std::polar(scale, -0.25 * h * k2[i]);
      full_[i] = std::polar(scale, -0.5 * h * k2[i]);
    }
    if (plan.include_potential) V_ = sample_V(spec, g_);
  }

  void kinetic(ArrayXcd& u, bool half) const {
    detail::dft(u.data(), g_.n(), g_.points(), -1);
    u *= half ? half_ : full_;
    detail::dft(u.data(), g_.n(), g_.points(), +1);
  }

  void rotate(ArrayXcd& u) const {
    const bool pot = V_.size() > 0;
    if (!pot && nu_ == 0.0) return;
    for (Index i = 0; i < u.size(); ++i) {
      double w = pot ? V_[i] : 0.0;
      if (nu_ != 0.0) w += nu_ * std::pow(std::abs(u[i]), p_);
      u[i] *= std::polar(1.0, -h_ * w);
    }
  }

  // `steps` Strang steps with the inner half kinetics merged
  void run(ComplexField& u, int steps, const EvolveOptions& opt) const {
    ArrayXcd& v = u.values;
    kinetic(v, true);
    for (int s = 0; s < steps; ++s) {
      rotate(v);
      if (s + 1 < steps) {
        kinetic(v, false);
        if (opt.check_every > 0 && (s + 1) % opt.check_every == 0) check(u, u.time + (s + 1) * h_, opt);
      }
    }
    kinetic(v, true);
    u.time += steps * h_;
    check(u, u.time, opt);
  }

 private:
  // mid-run states are offset by half a kinetic step; close enough for an edge test
  void check(const ComplexField& u, double t, const EvolveOptions& opt) const {
    const double e = edge_mass_fraction(u);
    if (e > opt.edge_tolerance)
      throw DomainEscape("wave packet reached the box edge (edge mass " + std::to_string(e) + " at t = " +
                             std::to_string(t) + "); enlarge L",
                         e, t);
  }

  GridSpec g_;
  double h_, nu_, p_;
  ArrayXcd half_, full_;
  ArrayXd V_;
};

int step_count(double span, double dt) {
  return std::max(1, static_cast<int>(std::ceil(std::abs(span) / dt * (1.0 - 1e-12))));
}

void check_input(const ComplexField& u, const StepPlan& plan) {
  if (u.space != Space::position) throw UsageError("propagation expects a position-space field");
  if (!(u.grid == plan.grid)) throw GridMismatch("field and step plan grids differ");
}

}  // namespace

StepPlan make_plan(const GridSpec& g, double dt, double nu, bool include_potential, bool include_nonlinearity) {
  if (!(dt > 0.0)) throw UsageError("time step must be positive");
  StepPlan p;
  p.grid = g;
  p.dt = dt;
  p.nu = nu;
  p.include_potential = include_potential;
  p.include_nonlinearity = include_nonlinearity;
  const ArrayXd k2 = g.radius_squared(Space::frequency);
  p.kinetic_multiplier.resize(k2.size());
  for (Index i = 0; i < k2.size(); ++i) p.kinetic_multiplier[i] = std::polar(1.0, -0.5 * dt * k2[i]);
  return p;
}

ComplexField step(const ComplexField& u, const StepPlan& plan, const PotentialSpec& spec) {
  check_input(u, plan);
  const Splitter s(plan, spec, plan.dt);
  ComplexField out = u;
  s.kinetic(out.values, true);
  s.rotate(out.values);
  s.kinetic(out.values, true);
  out.time += plan.dt;
  return out;
}

ComplexField evolve(const ComplexField& u0, double t0, double t1, const StepPlan& plan, const PotentialSpec& spec,
                    const EvolveOptions& opt) {
  check_input(u0, plan);
  ComplexField u = u0;
  u.time = t0;
  if (t1 == t0) return u;
  const int m = step_count(t1 - t0, plan.dt);
  Splitter(plan, spec, (t1 - t0) / m).run(u, m, opt);
  u.time = t1;
  return u;
}

std::vector<ComplexField> evolve_to(const ComplexField& u0, double t0, const std::vector<double>& times,
                                    const StepPlan& plan, const PotentialSpec& spec, const EvolveOptions& opt) {
  std::vector<ComplexField> out;
  ComplexField u = u0;
  double t = t0;
  for (double target : times) {
    if (!out.empty() && (target - t) * (times.front() - t0) < 0.0)
      throw UsageError("evolve_to times must be monotone away from t0");
    u = evolve(u, t, target, plan, spec, opt);
    t = target;
    out.push_back(u);
  }
  return out;
}

double richardson_order(const ComplexField& u0, double t0, double span, const StepPlan& plan,
                        const PotentialSpec& spec) {
  StepPlan p = plan;
  std::vector<ComplexField> runs;
  for (int k = 0; k < 3; ++k) {
    runs.push_back(evolve(u0, t0, t0 + span, p, spec));
    p.dt /= 2;
  }
  const double a = (runs[0].values - runs[1].values).matrix().norm();
  const double b = (runs[1].values - runs[2].values).matrix().norm();
  return std::log2(a / b);
}

StepPlan refine_plan(const ComplexField& u0, double t0, const StepPlan& plan, const PotentialSpec& spec,
                     double floor, int max_halvings) {
  StepPlan p = plan;
  const double scale = u0.values.matrix().norm();
  for (int k = 0; k <= max_halvings; ++k) {
    const ComplexField a = evolve(u0, t0, t0 + 1.0, p, spec);
    StepPlan q = p;
    q.dt /= 2;
    const ComplexField b = evolve(u0, t0, t0 + 1.0, q, spec);
    if ((a.values - b.values).matrix().norm() <= floor * scale) return p;
    if (std::abs(richardson_order(u0, t0, 1.0, p, spec) - 2.0) <= 0.2) return p;
    p = make_plan(p.grid, q.dt, p.nu, p.include_potential, p.include_nonlinearity);
  }
  throw ConfigError("time step refinement did not reach second-order behaviour");
}

std::vector<double> duhamel_nodes(double t, double T_max, double dt) {
  if (!(T_max > t)) throw UsageError("Duhamel integrals need T_max > t");
  const int m = step_count(T_max - t, dt);
  std::vector<double> s(m + 1);
  for (int j = 0; j <= m; ++j) s[j] = j == m ? T_max : t + j * (T_max - t) / m;
  return s;
}

DuhamelTail duhamel_sweep(const std::function<ComplexField(int, double)>& G, double t, double T_max,
                          const StepPlan& plan, const PotentialSpec& spec,
                          const std::function<void(int, double, const ComplexField&)>& at) {
  const std::vector<double> s = duhamel_nodes(t, T_max, plan.dt);
  const int m = static_cast<int>(s.size()) - 1;
  const double ds = (T_max - t) / m;
  StepPlan linear = plan;
  linear.include_nonlinearity = false;
  const Splitter back(linear, spec, -ds);
  const EvolveOptions quiet{INFINITY, 0};

  // R_j = e^{i ds H} R_{j+1} + ds G_j, and I_j = R_j - ds G_j / 2
  std::vector<double> gnorm(m + 1);
  ComplexField g = G(m, T_max);
  check_input(g, plan);
  gnorm[m] = norm_l2(g);
  ComplexField R = g;
  R.values *= 0.5 * ds;
  ComplexField I(g.grid, Space::position, T_max);
  if (at) at(m, T_max, I);
  for (int j = m - 1; j >= 0; --j) {
    back.run(R, 1, quiet);
    g = G(j, s[j]);
    gnorm[j] = norm_l2(g);
    R.values += ds * g.values;
    if (at || j == 0) {
      I.values = R.values - (0.5 * ds) * g.values;
      I.time = s[j];
      if (at) at(j, s[j], I);
    }
  }
  R.values -= (0.5 * ds) * g.values;
  R.time = t;

  DuhamelTail out{R, gnorm[m] * T_max, INFINITY, m + 1};
  // power-law tail from the last eight nodes
  if (m >= 7 && gnorm[m] > 0.0) {
    std::vector<double> ts, gs;
    for (int j = m - 7; j <= m; ++j) {
      ts.push_back(s[j]);
      gs.push_back(gnorm[j]);
    }
    bool positive = true;
    for (double v : gs) positive = positive && v > 0.0;
    if (positive && ts.front() > 0.0) {
      const double alpha = -fit_decay(ts, gs).slope;
      if (alpha > 1.0) out.tail_estimate = gnorm[m] * T_max / (alpha - 1.0);
    }
  } else if (gnorm[m] == 0.0) {
    out.tail_estimate = 0.0;
  }
  return out;
}

DuhamelTail duhamel_tail(const std::function<ComplexField(double)>& G, double t, double T_max,
                         const StepPlan& plan, const PotentialSpec& spec) {
  return duhamel_sweep([&](int, double s) { return G(s); }, t, T_max, plan, spec);
}

}  // namespace nls
