#include "nlslab/hjphase.hpp"

#include "nlslab/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace nls {

namespace ode = boost::numeric::odeint;
using Eigen::ArrayXd;
using Eigen::Index;
using State = std::vector<double>;

namespace {

// State layout: X (n), Xi (n), Jacobian d(X,Xi)/d(x,xi) (2n x 2n, column major), action.
struct FlowSystem {
  const PotentialSpec& spec;
  const CutoffChi& chi;
  int n;
  bool jac;
  bool act;

  size_t size() const { return 2 * n + (jac ? 4 * n * n : 0) + (act ? 1 : 0); }

  void operator()(const State& y, State& dy, double t) const {
    Eigen::Map<const Eigen::VectorXd> X(y.data(), n), Xi(y.data() + n, n);
    const Point x = X;
    const Point g = grad_VT1(spec, chi, t, x);
    for (int d = 0; d < n; ++d) {
      dy[d] = Xi[d];
      dy[n + d] = -g[d];
    }
    size_t off = 2 * n;
    if (jac) {
      const int m = 2 * n;
      Eigen::Map<const Eigen::MatrixXd> J(y.data() + off, m, m);
      Eigen::Map<Eigen::MatrixXd> dJ(dy.data() + off, m, m);
      const SmallMatrix H = hess_VT1(spec, chi, t, x);
      dJ.topRows(n) = J.bottomRows(n);
      dJ.bottomRows(n) = -H * J.topRows(n);
      off += m * m;
    }
    if (act) dy[off] = 0.5 * Xi.squaredNorm() - eval_VT1(spec, chi, t, x);
  }
};

using Stepper = ode::runge_kutta_dopri5<State>;

class Integrator {
 public:
  Integrator(const FlowSystem& sys, const FlowOptions& opt)
      : sys_(sys), ctrl_(ode::make_controlled(opt.atol, opt.rtol, Stepper())) {}

  void advance(State& y, double& t, double target) {
    if (target == t) return;
    const double dir = target > t ? 1.0 : -1.0;
    if (dt_ == 0.0 || dt_ * dir < 0.0) dt_ = dir * std::min(1e-2, std::abs(target - t));
    while ((target - t) * dir > 0.0) {
      bool last = false;
      if ((t + dt_ - target) * dir >= 0.0) {
        saved_dt_ = dt_;
        dt_ = target - t;
        last = true;
      }
      double tt = t;
      const auto res = ctrl_.try_step(sys_, y, tt, dt_);
      if (res == ode::success) {
        t = last && std::abs(tt - target) < 1e-12 * std::max(1.0, std::abs(target)) ? target : tt;
        if (last && std::abs(dt_) < std::abs(saved_dt_)) dt_ = saved_dt_;
      } else if (std::abs(dt_) < 1e-13 * std::max(1.0, std::abs(t))) {
        throw IntegrationFailure("Hamilton flow step size underflow", t);
      }
    }
  }

 private:
  FlowSystem sys_;
  ode::controlled_runge_kutta<Stepper> ctrl_;
  double dt_ = 0.0;
  double saved_dt_ = 0.0;
};

State initial_state(const FlowSystem& sys, const Point& x, const Point& xi) {
  State y(sys.size(), 0.0);
  const int n = sys.n;
  for (int d = 0; d < n; ++d) {
    y[d] = x[d];
    y[n + d] = xi[d];
  }
  if (sys.jac) {
    Eigen::Map<Eigen::MatrixXd> J(y.data() + 2 * n, 2 * n, 2 * n);
    J.setIdentity();
  }
  return y;
}

FlowState unpack(const FlowSystem& sys, const State& y, double t, double s) {
  const int n = sys.n;
  FlowState f;
  f.t = t;
  f.s = s;
  f.X = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  f.Xi = Eigen::Map<const Eigen::VectorXd>(y.data() + n, n);
  size_t off = 2 * n;
  if (sys.jac) {
    Eigen::Map<const Eigen::MatrixXd> J(y.data() + off, 2 * n, 2 * n);
    f.has_jacobian = true;
    f.dX_dx = J.topLeftCorner(n, n);
    f.dX_dxi = J.topRightCorner(n, n);
    f.dXi_dx = J.bottomLeftCorner(n, n);
    f.dXi_dxi = J.bottomRightCorner(n, n);
    off += 4 * n * n;
  }
  if (sys.act) f.action = y[off];
  return f;
}

void check_point(const PotentialSpec& spec, const Point& p, const char* what) {
  if (p.size() != spec.n) throw UsageError(std::string(what) + " has the wrong dimension");
}

// Damped Newton: fn(z) -> {residual, Jacobian}.
template <class Fn>
Point newton(Fn&& fn, Point z, double tol, const char* what, int* iterations = nullptr) {
  auto [r, J] = fn(z);
  double rn = r.norm();
  for (int it = 0; it < 50; ++it) {
    if (rn <= tol) {
      if (iterations) *iterations = it;
      return z;
    }
    const Point step = J.fullPivLu().solve(r);
    double lambda = 1.0;
    for (;;) {
      const Point trial = z - lambda * step;
      auto [r2, J2] = fn(trial);
      const double rn2 = r2.norm();
      if (rn2 < rn || lambda < 1.0 / 1024.0) {
        z = trial;
        r = r2;
        J = J2;
        rn = rn2;
        break;
      }
      lambda *= 0.5;
    }
  }
  if (rn <= tol) {
    if (iterations) *iterations = 50;
    return z;
  }
  throw InversionFailure(std::string(what) + ": Newton did not converge in 50 steps (T1 too small?)");
}

// 1e-9 absolute, relative once the target point is far out (the flow itself
// is only accurate to ~rtol * |X|)
double newton_tol(const Point& target) { return 1e-9 * std::max(1.0, target.norm()); }

}  // namespace

FlowState integrate_flow(const PotentialSpec& spec, const CutoffChi& chi, double t, double s, const Point& x,
                         const Point& xi, const FlowOptions& opt) {
  return integrate_flow_at(spec, chi, {t}, s, x, xi, opt).front();
}

std::vector<FlowState> integrate_flow_at(const PotentialSpec& spec, const CutoffChi& chi,
                                         const std::vector<double>& times, double s, const Point& x,
                                         const Point& xi, const FlowOptions& opt) {
  check_point(spec, x, "flow start point");
  check_point(spec, xi, "flow start momentum");
  if (s < 0.0) throw DomainError("flow times must be non-negative");
  FlowSystem sys{spec, chi, spec.n, opt.jacobian, opt.action};
  State y = initial_state(sys, x, xi);
  Integrator integ(sys, opt);
  double tcur = s;
  std::vector<FlowState> out;
  out.reserve(times.size());
  for (double target : times) {
    if (target < 0.0) throw DomainError("flow times must be non-negative");
    integ.advance(y, tcur, target);
    out.push_back(unpack(sys, y, target, s));
  }
  return out;
}

FlowState hamilton_flow(const PotentialSpec& spec, const CutoffChi& chi, double t, double s, const Point& x,
                        const Point& xi, bool with_jacobian) {
  FlowOptions opt;
  opt.jacobian = with_jacobian;
  return integrate_flow(spec, chi, t, s, x, xi, opt);
}

Point inverse_y(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x, const Point& xi) {
  check_point(spec, x, "inverse_y point");
  FlowOptions opt;
  opt.jacobian = true;
  auto fn = [&](const Point& y) {
    const FlowState f = integrate_flow(spec, chi, 0.0, t, y, xi, opt);
    return std::pair<Point, SmallMatrix>(f.X - x, f.dX_dx);
  };
  return newton(fn, Point(x + t * xi), newton_tol(x), "inverse_y");
}

Eikonal eikonal_S(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& xi) {
  if (t < 0.0) throw DomainError("eikonal needs t >= 0");
  const Point origin = Point::Zero(spec.n);
  const Point y = inverse_y(spec, chi, t, origin, xi);
  FlowOptions opt;
  opt.jacobian = true;
  opt.action = true;
  const FlowState f = integrate_flow(spec, chi, 0.0, t, y, xi, opt);
  Eikonal e;
  e.S = y.dot(xi) + f.action;
  e.gradS = y;
  e.hessS = -f.dX_dx.fullPivLu().solve(f.dX_dxi);
  return e;
}

Point solve_theta(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x) {
  check_point(spec, x, "solve_theta point");
  if (!(t > 0.0)) throw DomainError("solve_theta needs t > 0");
  auto fn = [&](const Point& theta) {
    const Eikonal e = eikonal_S(spec, chi, t, theta);
    return std::pair<Point, SmallMatrix>(e.gradS - x, e.hessS);
  };
  return newton(fn, Point(x / t), newton_tol(x), "solve_theta");
}

Characteristic characteristic_through(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x) {
  check_point(spec, x, "characteristic end point");
  if (!(t > 0.0)) throw DomainError("characteristic needs t > 0");
  FlowOptions opt;
  opt.jacobian = true;
  opt.action = true;
  const Point origin = Point::Zero(spec.n);
  FlowState last;
  auto fn = [&](const Point& p) {
    last = integrate_flow(spec, chi, t, 0.0, origin, p, opt);
    return std::pair<Point, SmallMatrix>(last.X - x, last.dX_dxi);
  };
  Characteristic c;
  // the last evaluation is always at the accepted iterate
  newton(fn, Point(x / t), newton_tol(x), "characteristic", &c.iterations);
  // grad psi = theta carries the action from the accepted end point to x
  c.psi = last.action + last.Xi.dot(x - last.X);
  c.theta = last.Xi;
  c.grad_theta = last.dXi_dxi * last.dX_dxi.inverse();
  return c;
}

namespace {

PhaseField empty_phase(const GridSpec& g, double t, PhaseKind kind) {
  PhaseField ph;
  ph.grid = g;
  ph.t = t;
  ph.kind = kind;
  const Index m = g.size();
  ph.psi = ArrayXd::Zero(m);
  ph.laplacian_psi = ArrayXd::Zero(m);
  ph.gauge_residual = ArrayXd::Zero(m);
  ph.grad_psi.assign(g.n(), ArrayXd::Zero(m));
  ph.theta.assign(g.n(), ArrayXd::Zero(m));
  return ph;
}

// Store the characteristic values at flat index i, blending to the free
// phase with weight w = chi(2x/t).
void assemble(PhaseField& ph, Index i, const Point& x, const CutoffChi& chi, double psi, const Point& theta,
              double trace_grad_theta) {
  const double t = ph.t;
  const int n = ph.grid.n();
  const double F = x.squaredNorm() / (2.0 * t);
  const Point z = 2.0 * x / t;
  const double w = chi(z);
  const Point gw = (2.0 / t) * chi.gradient(z);
  const double lw = (4.0 / (t * t)) * chi.laplacian(z);
  const Point free_grad = x / t;
  ph.psi[i] = w * F + (1.0 - w) * psi;
  const Point grad = w * free_grad + (1.0 - w) * theta + (F - psi) * gw;
  for (int d = 0; d < n; ++d) {
    ph.grad_psi[d][i] = grad[d];
    ph.theta[d][i] = theta[d];
  }
  ph.laplacian_psi[i] =
      w * n / t + (1.0 - w) * trace_grad_theta + 2.0 * gw.dot(free_grad - theta) + (F - psi) * lw;
}

void fill_gauge_residual(PhaseField& ph, const PotentialSpec& spec, const CutoffChi& chi) {
  if (!spec.has_long_range()) return;
  for (Index i = 0; i < ph.grid.size(); ++i) {
    const Point x = ph.grid.point(Space::position, i);
    ph.gauge_residual[i] = eval_VL(spec, x) - eval_VT1(spec, chi, ph.t, x);
  }
}

}  // namespace

PhaseField build_psi(const PotentialSpec& spec, const CutoffChi& chi, double t, const GridSpec& g) {
  if (g.n() != spec.n) throw UsageError("grid and potential dimensions differ");
  if (spec.has_long_range() && t < std::max(1.0, 2.0 * spec.T1))
    throw DomainError("build_psi needs t >= max(1, 2 T1)");
  if (!spec.has_long_range()) {
    PhaseField ph = free_phase(g, t);
    ph.kind = PhaseKind::yafaev;
    return ph;
  }
  PhaseField ph = empty_phase(g, t, PhaseKind::yafaev);
  const double inner = chi.c0() * t / 8.0;
  for (Index i = 0; i < g.size(); ++i) {
    const Point x = g.point(Space::position, i);
    if (x.norm() <= inner) {
      assemble(ph, i, x, chi, x.squaredNorm() / (2 * t), x / t, g.n() / t);
      continue;
    }
    const Characteristic c = characteristic_through(spec, chi, t, x);
    assemble(ph, i, x, chi, c.psi, c.theta, c.grad_theta.trace());
  }
  fill_gauge_residual(ph, spec, chi);
  return ph;
}

// ---------------------------------------------------------------------------
// radial table

namespace {

struct Quintic {
  double v, d1, d2;
};

Quintic quintic_hermite(double u, double h, const RadialPhaseTable::Sample& a, const RadialPhaseTable::Sample& b) {
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  const double H[6] = {1 - 10 * u3 + 15 * u4 - 6 * u5,   u - 6 * u3 + 8 * u4 - 3 * u5,
                       0.5 * (u2 - 3 * u3 + 3 * u4 - u5), 10 * u3 - 15 * u4 + 6 * u5,
                       -4 * u3 + 7 * u4 - 3 * u5,         0.5 * (u3 - 2 * u4 + u5)};
  const double D[6] = {-30 * u2 + 60 * u3 - 30 * u4,         1 - 18 * u2 + 32 * u3 - 15 * u4,
                       0.5 * (2 * u - 9 * u2 + 12 * u3 - 5 * u4), 30 * u2 - 60 * u3 + 30 * u4,
                       -12 * u2 + 28 * u3 - 15 * u4,         0.5 * (3 * u2 - 8 * u3 + 5 * u4)};
  const double E[6] = {-60 * u + 180 * u2 - 120 * u3,       -36 * u + 96 * u2 - 60 * u3,
                       0.5 * (2 - 18 * u + 36 * u2 - 20 * u3), 60 * u - 180 * u2 + 120 * u3,
                       -24 * u + 84 * u2 - 60 * u3,         0.5 * (6 * u - 24 * u2 + 20 * u3)};
  const double c[6] = {a.psi, h * a.theta, h * h * a.dtheta, b.psi, h * b.theta, h * h * b.dtheta};
  Quintic q{0, 0, 0};
  for (int k = 0; k < 6; ++k) {
    q.v += c[k] * H[k];
    q.d1 += c[k] * D[k];
    q.d2 += c[k] * E[k];
  }
  q.d1 /= h;
  q.d2 /= h * h;
  return q;
}

}  // namespace

RadialPhaseTable::RadialPhaseTable(const PotentialSpec& spec, const CutoffChi& chi, std::vector<double> times,
                                   double r_max, double dr)
    : spec_(spec), chi_(chi), times_(std::move(times)) {
  if (times_.empty()) throw UsageError("radial phase table needs at least one time");
  if (!std::is_sorted(times_.begin(), times_.end()) || times_.front() <= 0.0)
    throw UsageError("radial phase table times must be positive and increasing");
  const double t_min = times_.front(), t_max = times_.back();
  nodes_.assign(times_.size(), {});
  FlowOptions opt;
  opt.jacobian = true;
  opt.action = true;
  // 1-D reduction: a ray along the first axis carries all the information
  PotentialSpec line = spec;
  line.n = 1;
  const Point origin = Point::Zero(1);
  double p = 0.0;
  for (;;) {
    Point xi(1);
    xi << p;
    const auto states = integrate_flow_at(line, chi, times_, 0.0, origin, xi, opt);
    bool covered = true;
    for (size_t k = 0; k < times_.size(); ++k) {
      const FlowState& f = states[k];
      Sample s{f.X[0], f.action, f.Xi[0], f.dXi_dxi(0, 0) / f.dX_dxi(0, 0)};
      // slow rays may cross inside |x| <= c0 t/8, where the table is never read;
      // keep the monotone outer branch only
      if (!nodes_[k].empty() && s.r <= nodes_[k].back().r) {
        if (s.r > chi.c0() * times_[k] / 8.0)
          throw InversionFailure("characteristics from the origin cross at r = " + std::to_string(s.r) +
                                 ", t = " + std::to_string(times_[k]) + " (caustic); radial table unusable");
        nodes_[k].clear();
      }
      nodes_[k].push_back(s);
      covered = covered && s.r > r_max;
    }
    if (covered) break;
    p += dr * std::max(1.0 / t_max, p / r_max);
    if (p > 10.0 * r_max / t_min + 10.0) throw InversionFailure("radial table could not reach r_max");
  }
  for (size_t k = 0; k < times_.size(); ++k)
    if (nodes_[k].front().r > chi.c0() * times_[k] / 8.0)
      throw InversionFailure("characteristics from the origin cross (caustic); radial table unusable");
}

RadialPhaseTable::Sample RadialPhaseTable::evaluate(size_t k, double r) const {
  const auto& nd = nodes_.at(k);
  if (r > nd.back().r) throw GridMismatch("radius beyond the radial phase table");
  auto it = std::upper_bound(nd.begin(), nd.end(), r, [](double v, const Sample& s) { return v < s.r; });
  if (it == nd.begin()) return nd.front();
  const Sample& a = *(it - 1);
  if (it == nd.end()) return a;
  const Sample& b = *it;
  const double h = b.r - a.r;
  const Quintic q = quintic_hermite((r - a.r) / h, h, a, b);
  return {r, q.v, q.d1, q.d2};
}

PhaseField RadialPhaseTable::field(size_t k, const GridSpec& g) const {
  if (g.n() != spec_.n) throw UsageError("grid and potential dimensions differ");
  const double t = times_.at(k);
  PhaseField ph = empty_phase(g, t, PhaseKind::yafaev);
  const double inner = chi_.c0() * t / 8.0;
  const int n = g.n();
  for (Index i = 0; i < g.size(); ++i) {
    const Point x = g.point(Space::position, i);
    const double r = x.norm();
    if (r <= inner || !spec_.has_long_range()) {
      assemble(ph, i, x, chi_, x.squaredNorm() / (2 * t), x / t, n / t);
      continue;
    }
    const Sample s = evaluate(k, r);
    assemble(ph, i, x, chi_, s.psi, (s.theta / r) * x, s.dtheta + (n - 1) * s.theta / r);
  }
  fill_gauge_residual(ph, spec_, chi_);
  return ph;
}

PhaseField RadialPhaseTable::field_at(double t, const GridSpec& g) const {
  for (size_t k = 0; k < times_.size(); ++k)
    if (std::abs(times_[k] - t) <= 1e-12 * std::max(1.0, t)) return field(k, g);
  throw UsageError("time not tabulated in the radial phase table");
}

// ---------------------------------------------------------------------------

bool probes_pass(const PotentialSpec& spec, const CutoffChi& chi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const int n = spec.n;
  auto direction = [&]() {
    Point d(n);
    for (;;) {
      for (int k = 0; k < n; ++k) d[k] = normal(rng);
      if (d.norm() > 1e-3) return Point(d / d.norm());
    }
  };
  const double t0 = std::max(1.0, 2.0 * spec.T1);
  const double c0 = spec.c0;
  try {
    for (int probe = 0; probe < 16; ++probe) {
      const double t = t0 * std::exp(unit(rng) * std::log(50.0));
      const Point xi = direction() * c0 * (1.0 + 2.0 * unit(rng));
      // odd probes sit on the slowest ray |x| = c0 t/4, where Newton is hardest
      const double speed = probe % 2 ? 0.25 : 0.25 + 2.75 * unit(rng);
      const Point x = direction() * t * c0 * speed;
      const Point y = inverse_y(spec, chi, t, x, xi);
      const FlowState f = hamilton_flow(spec, chi, 0.0, t, y, xi, true);
      const SmallMatrix dev = f.dX_dx - SmallMatrix::Identity(n, n);
      if (dev.cwiseAbs().rowwise().sum().maxCoeff() > 0.5) return false;
      const Point theta = solve_theta(spec, chi, t, x);
      const Characteristic c = characteristic_through(spec, chi, t, x);
      if ((c.theta - theta).norm() > 1e-6 * std::max(1.0, theta.norm())) return false;
    }
  } catch (const InversionFailure&) {
    return false;
  } catch (const IntegrationFailure&) {
    return false;
  }
  return true;
}

double auto_T1(const PotentialSpec& spec, const CutoffChi& chi, std::uint64_t seed) {
  if (!spec.has_long_range()) return 1.0;
  PotentialSpec trial = spec;
  for (double T1 = 1.0; T1 <= 65536.0; T1 *= 2.0) {
    trial.T1 = T1;
    if (probes_pass(trial, chi, seed)) return T1;
  }
  throw ConfigError("auto_T1: probe set still failing at T1 = 2^16");
}

}  // namespace nls
