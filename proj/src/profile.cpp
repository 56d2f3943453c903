#include "nlslab/profile.hpp"

#include "nlslab/errors.hpp"
#include "nlslab/resample.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nls {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::Index;

namespace {

constexpr double kDroppedMass = 1e-10;

Complex branch_factor(int n, double t) {
  return std::polar(std::pow(t, -0.5 * n), -n * std::numbers::pi / 4.0);
}

// fraction of the mass of f at source points outside [-a, a)^n
double mass_outside(const ComplexField& f, double a) {
  const GridSpec& g = f.grid;
  const ArrayXd ax = g.axis(f.space);
  double out = 0.0, total = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const double m = std::norm(f.values[i]);
    total += m;
    const auto idx = g.multi_index(i);
    for (int d = 0; d < g.n(); ++d)
      if (ax[idx[d]] < -a || ax[idx[d]] >= a) {
        out += m;
        break;
      }
  }
  return total > 0.0 ? out / total : 0.0;
}

// H^gamma of f viewed as a function on its own lattice
double own_sobolev(const ComplexField& f, double gamma) {
  return f.space == Space::position ? norm_sobolev(f, gamma) : hat_sobolev(f, gamma);
}

void check_phase(const PhaseField& phase, const GridSpec& g, double t) {
  if (!(phase.grid == g)) throw GridMismatch("phase and field grids differ");
  if (std::abs(phase.t - t) > 1e-12 * std::max(1.0, t)) throw UsageError("phase built at a different time");
}

ArrayXd chi_over_t(const CutoffChi& chi, const GridSpec& g, double t) {
  const ArrayXd r = g.radius_squared(Space::position).sqrt();
  ArrayXd c(g.size());
  for (Index i = 0; i < g.size(); ++i) c[i] = chi.radial(r[i] / t).value;
  return c;
}

ComplexField frequency_field(const GridSpec& g, const ArrayXd& v) {
  return ComplexField(g, v.cast<Complex>(), Space::frequency);
}

}  // namespace

void validate(const ScatteringDatum& d) {
  const ComplexField& u = d.u_plus_hat;
  if (u.space != Space::frequency) throw UsageError("u_plus_hat must live on the frequency lattice");
  if (!(d.c0 > 0.0)) throw UsageError("c0 must be positive");
  const int n = u.grid.n();
  const bool in_window = n == 1 ? (d.gamma >= 1.0 && d.gamma <= 2.0)
                                : (d.gamma > 0.5 * n && d.gamma < 1.0 + 2.0 / n);
  if (!in_window) throw UsageError("gamma outside the admissible window for n = " + std::to_string(n));
  const ArrayXd r2 = u.grid.radius_squared(Space::frequency);
  const double peak = u.values.abs().maxCoeff();
  for (Index i = 0; i < r2.size(); ++i)
    if (r2[i] < d.c0 * d.c0 && std::abs(u.values[i]) > 1e-14 * peak)
      throw UsageError("u_plus_hat is not supported in |xi| >= c0");
  if (!std::isfinite(hat_sobolev(u, d.gamma))) throw UsageError("weighted norm of u_plus is not finite");
}

ScatteringDatum gaussian_ring(const GridSpec& g, double c0, double xi0, double sigma, double amplitude,
                              double gamma, double nu, double width) {
  if (!(sigma > 0.0) || !(width > 0.0)) throw UsageError("ring width and switch width must be positive");
  const ArrayXd r = g.radius_squared(Space::frequency).sqrt();
  ArrayXd v(r.size());
  for (Index i = 0; i < r.size(); ++i)
    v[i] = amplitude * std::exp(-std::pow(r[i] - xi0, 2) / (2 * sigma * sigma)) *
           smoothstep((r[i] - c0) / width).value;
  ScatteringDatum d{frequency_field(g, v), c0, gamma, nu, v.abs().maxCoeff()};
  validate(d);
  return d;
}

ScatteringDatum bump_annulus(const GridSpec& g, double r_in, double r_out, double amplitude, double gamma,
                             double nu) {
  if (!(r_in > 0.0 && r_out > r_in)) throw UsageError("annulus needs 0 < r_in < r_out");
  const ArrayXd r = g.radius_squared(Space::frequency).sqrt();
  const double mid = 0.5 * (r_in + r_out), half = 0.5 * (r_out - r_in);
  ArrayXd v = ArrayXd::Zero(r.size());
  for (Index i = 0; i < r.size(); ++i) {
    const double s = (r[i] - mid) / half;
    if (std::abs(s) < 1.0) v[i] = amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  ScatteringDatum d{frequency_field(g, v), r_in, gamma, nu, v.abs().maxCoeff()};
  validate(d);
  return d;
}

double hat_sobolev(const ComplexField& hat, double gamma) {
  if (hat.space != Space::frequency) throw UsageError("hat_sobolev expects a frequency-lattice field");
  return norm_weighted(ifft(hat), gamma);
}

double Gamma_a(const ScatteringDatum& d, int a) {
  const double h = hat_sobolev(d.u_plus_hat, d.gamma);
  return (1.0 + std::pow(h, 2.0 * a / d.u_plus_hat.grid.n())) * h;
}

double nonlinear_estimate_ratio(const ComplexField& u, double lambda, double gamma) {
  const double p = 2.0 / u.grid.n();
  const int k = static_cast<int>(std::ceil(gamma));
  ComplexField v = u;
  for (Index i = 0; i < v.values.size(); ++i)
    v.values[i] *= std::polar(1.0, lambda * std::pow(std::abs(u.values[i]), p));
  const double h = own_sobolev(u, gamma);
  return own_sobolev(v, gamma) / ((1.0 + std::pow(lambda, k) * std::pow(h, 2.0 * k / u.grid.n())) * h);
}

ComplexField apply_M(const ComplexField& f, double t) {
  if (f.space != Space::position) throw UsageError("M(t) acts on position-space fields");
  if (t == 0.0) throw DomainError("M(t) needs t != 0");
  ComplexField out = f;
  const ArrayXd r2 = f.grid.radius_squared(Space::position);
  for (Index i = 0; i < r2.size(); ++i) out.values[i] *= std::polar(1.0, r2[i] / (2.0 * t));
  return out;
}

ComplexField apply_M_psi(const ComplexField& f, const PhaseField& phase) {
  if (f.space != Space::position) throw UsageError("M_Psi acts on position-space fields");
  if (!(phase.grid == f.grid)) throw GridMismatch("phase and field grids differ");
  ComplexField out = f;
  for (Index i = 0; i < phase.psi.size(); ++i) out.values[i] *= std::polar(1.0, phase.psi[i]);
  return out;
}

ComplexField apply_D(const ComplexField& f, double t) {
  if (!(t > 0.0)) throw DomainError("D(t) needs t > 0");
  const GridSpec& g = f.grid;
  const double reach = g.half_length() / t;
  const double lost = mass_outside(f, reach);
  if (lost > kDroppedMass)
  {
    std::ostringstream os;
    os << "D(t) at t = " << t << ": a fraction " << lost << " of the mass falls outside the rescaled box";
    throw GridMismatch(os.str());
  }
  ComplexField out(g, Space::position, f.time);
  out.values = resample_uniform(f.values, g.n(), g.points(), g.origin(f.space), g.step(f.space),
                                g.origin(Space::position) / t, g.step(Space::position) / t);
  out.values *= branch_factor(g.n(), t);
  return out;
}

ComplexField free_propagate(const ComplexField& f, double t) {
  if (t == 0.0) return f;
  ComplexField hat = f.space == Space::frequency ? f : fft(f);
  const ArrayXd k2 = f.grid.radius_squared(Space::frequency);
  for (Index i = 0; i < k2.size(); ++i) hat.values[i] *= std::polar(1.0, -0.5 * t * k2[i]);
  hat.time = f.time + t;
  return f.space == Space::frequency ? hat : ifft(hat);
}

ComplexField free_propagate_mdfm(const ComplexField& f, double t) {
  if (f.space != Space::position) throw UsageError("MDFM path expects a position-space field");
  if (t == 0.0) return f;
  ComplexField out = apply_M(apply_D(fft(apply_M(f, t)), t), t);
  out.time = f.time + t;
  return out;
}

ComplexField ozawa_W(const ScatteringDatum& d, double t) {
  if (!(t >= 1.0)) throw DomainError("W(t) needs t >= 1");
  ComplexField w = d.u_plus_hat;
  const double p = 2.0 / w.grid.n(), lt = std::log(t);
  for (Index i = 0; i < w.values.size(); ++i)
    w.values[i] *= std::polar(1.0, -d.nu * std::pow(std::abs(w.values[i]), p) * lt);
  w.time = t;
  return w;
}

ComplexField ozawa_W_dt(const ScatteringDatum& d, double t) {
  ComplexField w = ozawa_W(d, t);
  const double p = 2.0 / w.grid.n();
  for (Index i = 0; i < w.values.size(); ++i)
    w.values[i] *= Complex(0.0, -d.nu * std::pow(std::abs(d.u_plus_hat.values[i]), p) / t);
  return w;
}

ComplexField profile_up(const ScatteringDatum& d, const PhaseField& phase, double t) {
  check_phase(phase, d.u_plus_hat.grid, t);
  ComplexField u = apply_M_psi(apply_D(ozawa_W(d, t), t), phase);
  u.time = t;
  return u;
}

ComplexField profile_without_ozawa(const ScatteringDatum& d, const PhaseField& phase, double t) {
  check_phase(phase, d.u_plus_hat.grid, t);
  ComplexField u = apply_M_psi(apply_D(d.u_plus_hat, t), phase);
  u.time = t;
  return u;
}

UParts apply_U_all(const PhaseField& phase, const CutoffChi& chi, double t, const ComplexField& f) {
  if (f.space != Space::frequency) throw UsageError("U operators take frequency-lattice input");
  if (!(t >= 1.0)) throw DomainError("U operators need t >= 1");
  check_phase(phase, f.grid, t);
  const ComplexField whole = apply_M_psi(apply_D(f, t), phase);
  const ComplexField a = apply_M_psi(apply_D(fft(apply_M(ifft(f), t)), t), phase);
  const ArrayXd c = chi_over_t(chi, f.grid, t);
  UParts u{whole, a, a};
  u.u1.values -= a.values;
  u.u2.values *= c;
  u.u3.values *= 1.0 - c;
  return u;
}

ComplexField apply_U(int j, const PhaseField& phase, const CutoffChi& chi, double t, const ComplexField& f) {
  if (j < 1 || j > 3) throw UsageError("U index must be 1, 2 or 3");
  UParts u = apply_U_all(phase, chi, t, f);
  return j == 1 ? u.u1 : j == 2 ? u.u2 : u.u3;
}

}  // namespace nls
