#include "nlslab/potentials.hpp"

#include "nlslab/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nls {

using Eigen::ArrayXd;
using Eigen::Index;

double PotentialSpec::rho_L() const {
  return has_long_range() ? long_range->rho : std::numeric_limits<double>::infinity();
}

double PotentialSpec::rho_S() const {
  return has_short_range() ? short_range->rho : std::numeric_limits<double>::infinity();
}

void validate(const PotentialSpec& spec) {
  if (spec.n < 1 || spec.n > 3) throw ConfigError("potential dimension must be 1, 2 or 3");
  if (!(spec.c0 > 0.0)) throw ConfigError("c0 must be positive");
  if (spec.T1 < 0.0) throw ConfigError("T1 must be non-negative");
  if (spec.has_long_range() && spec.T1 < 1.0) throw ConfigError("T1 must be >= 1 with a long-range part");
  if (spec.short_range && !(spec.short_range->rho > 0.0)) throw ConfigError("rho_S must be positive");
  if (spec.long_range && !(spec.long_range->rho > 0.0)) throw ConfigError("rho_L must be positive");
  if (spec.has_long_range() && spec.long_range->form == LongRangeForm::inverse_power && !(spec.regularization > 0.0))
    throw ConfigError("inverse-power long-range part needs a positive regularization");
}

std::vector<std::string> hypothesis_warnings(const PotentialSpec& spec) {
  std::vector<std::string> out;
  const double n = spec.n;
  if (spec.has_short_range() && !(spec.rho_S() > 1.0 + n / 4.0)) {
    std::ostringstream os;
    os << "outside theorem hypotheses: rho_S = " << spec.rho_S() << " <= 1 + n/4";
    out.push_back(os.str());
  }
  if (spec.has_long_range()) {
    if (!(spec.rho_L() > n / 4.0 && spec.rho_L() <= 1.0 + n / 4.0)) {
      std::ostringstream os;
      os << "outside theorem hypotheses: rho_L = " << spec.rho_L() << " not in (n/4, 1 + n/4]";
      out.push_back(os.str());
    }
    if (spec.n == 1) out.push_back("outside theorem hypotheses: long-range potential in one dimension");
  }
  return out;
}

CutoffChi::Radial smoothstep(double u) {
  if (u <= 0.0) return {0.0, 0.0, 0.0};
  if (u >= 1.0) return {1.0, 0.0, 0.0};
  const double w = 1.0 - u;
  const double E = 1.0 / u - 1.0 / w;
  const double S = 1.0 / (1.0 + std::exp(E));
  const double T = 1.0 / (1.0 + std::exp(-E));  // 1 - S without cancellation
  const double G = 1.0 / (u * u) + 1.0 / (w * w);
  const double dG = -2.0 / (u * u * u) + 2.0 / (w * w * w);
  const double d1 = S * T * G;
  const double d2 = d1 * (T - S) * G + S * T * dG;
  return {S, d1, d2};
}

CutoffChi::CutoffChi(double c0) : c0_(c0) {
  if (!(c0 > 0.0)) throw ConfigError("cutoff radius c0 must be positive");
}

CutoffChi::Radial CutoffChi::radial(double r) const {
  const double q = c0_ / 4.0;
  const Radial s = smoothstep((c0_ / 2.0 - r) / q);
  return {s.value, -s.d1 / q, s.d2 / (q * q)};
}

double CutoffChi::operator()(const Point& x) const { return radial(x.norm()).value; }

Point CutoffChi::gradient(const Point& x) const {
  const double r = x.norm();
  const Radial c = radial(r);
  if (c.d1 == 0.0) return Point::Zero(x.size());
  return (c.d1 / r) * x;
}

SmallMatrix CutoffChi::hessian(const Point& x) const {
  const double r = x.norm();
  const Radial c = radial(r);
  const Index n = x.size();
  if (c.d1 == 0.0 && c.d2 == 0.0) return SmallMatrix::Zero(n, n);
  const Point e = x / r;
  return c.d2 * e * e.transpose() + (c.d1 / r) * (SmallMatrix::Identity(n, n) - e * e.transpose());
}

double CutoffChi::laplacian(const Point& x) const {
  const double r = x.norm();
  const Radial c = radial(r);
  if (c.d1 == 0.0 && c.d2 == 0.0) return 0.0;
  return c.d2 + (x.size() - 1) * c.d1 / r;
}

namespace {

// f(s) = Z (a^2 + s)^{-rho/2} as a function of s = |x|^2, with f', f''
struct SquaredForm {
  double f, f1, f2;
};

SquaredForm bracket(double Z, double rho, double a2, double s) {
  const double b = a2 + s;
  const double f = Z * std::pow(b, -rho / 2.0);
  const double f1 = -(rho / 2.0) * f / b;
  const double f2 = -(rho / 2.0 + 1.0) * f1 / b;
  return {f, f1, f2};
}

SquaredForm long_form(const PotentialSpec& spec, double s) {
  if (!spec.has_long_range()) return {0.0, 0.0, 0.0};
  const LongRange& lr = *spec.long_range;
  const double a2 = lr.form == LongRangeForm::inverse_bracket ? 1.0 : spec.regularization * spec.regularization;
  return bracket(lr.amplitude, lr.rho, a2, s);
}

}  // namespace

double eval_VS(const PotentialSpec& spec, const Point& x) {
  if (!spec.has_short_range()) return 0.0;
  return bracket(spec.short_range->amplitude, spec.short_range->rho, 1.0, x.squaredNorm()).f;
}

double eval_VL(const PotentialSpec& spec, const Point& x) { return long_form(spec, x.squaredNorm()).f; }

double eval_V(const PotentialSpec& spec, const Point& x) { return eval_VS(spec, x) + eval_VL(spec, x); }

Point grad_VL(const PotentialSpec& spec, const Point& x) {
  return 2.0 * long_form(spec, x.squaredNorm()).f1 * x;
}

SmallMatrix hess_VL(const PotentialSpec& spec, const Point& x) {
  const SquaredForm q = long_form(spec, x.squaredNorm());
  const Index n = x.size();
  return 2.0 * q.f1 * SmallMatrix::Identity(n, n) + 4.0 * q.f2 * x * x.transpose();
}

double laplacian_VL(const PotentialSpec& spec, const Point& x) {
  const double s = x.squaredNorm();
  const SquaredForm q = long_form(spec, s);
  return 2.0 * x.size() * q.f1 + 4.0 * q.f2 * s;
}

CutoffChi::Radial radial_VL(const PotentialSpec& spec, double r) {
  const SquaredForm q = long_form(spec, r * r);
  return {q.f, 2.0 * r * q.f1, 2.0 * q.f1 + 4.0 * r * r * q.f2};
}

namespace {

// h(x) = 1 - chi(a x), a = 2/(t+T1)
struct Damping {
  double h;
  Point grad;
  SmallMatrix hess;
};

Damping damping(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x, bool second) {
  const Index n = x.size();
  const double span = t + spec.T1;
  if (span <= 0.0) {
    const double h = x.squaredNorm() == 0.0 ? 0.0 : 1.0;
    return {h, Point::Zero(n), SmallMatrix::Zero(n, n)};
  }
  const double a = 2.0 / span;
  const Point z = a * x;
  Damping d{1.0 - chi(z), -a * chi.gradient(z), SmallMatrix::Zero(n, n)};
  if (second) d.hess = -a * a * chi.hessian(z);
  return d;
}

}  // namespace

double eval_VT1(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x) {
  if (!spec.has_long_range()) return 0.0;
  return eval_VL(spec, x) * damping(spec, chi, t, x, false).h;
}

Point grad_VT1(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x) {
  if (!spec.has_long_range()) return Point::Zero(x.size());
  const Damping d = damping(spec, chi, t, x, false);
  return d.h * grad_VL(spec, x) + eval_VL(spec, x) * d.grad;
}

SmallMatrix hess_VT1(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x) {
  const Index n = x.size();
  if (!spec.has_long_range()) return SmallMatrix::Zero(n, n);
  const Damping d = damping(spec, chi, t, x, true);
  const Point g = grad_VL(spec, x);
  return d.h * hess_VL(spec, x) + g * d.grad.transpose() + d.grad * g.transpose() + eval_VL(spec, x) * d.hess;
}

double laplacian_VT1(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x) {
  return hess_VT1(spec, chi, t, x).trace();
}

namespace {

template <class Fn>
ArrayXd sample(const GridSpec& g, Fn&& fn) {
  ArrayXd out(g.size());
  for (Index i = 0; i < out.size(); ++i) out[i] = fn(g.point(Space::position, i));
  return out;
}

}  // namespace

ArrayXd sample_V(const PotentialSpec& spec, const GridSpec& g) {
  return sample(g, [&](const Point& x) { return eval_V(spec, x); });
}

ArrayXd sample_VS(const PotentialSpec& spec, const GridSpec& g) {
  return sample(g, [&](const Point& x) { return eval_VS(spec, x); });
}

ArrayXd sample_VL(const PotentialSpec& spec, const GridSpec& g) {
  return sample(g, [&](const Point& x) { return eval_VL(spec, x); });
}

ChiTable sample_chi(const CutoffChi& chi, const GridSpec& g, double t) {
  ChiTable tab;
  const Index size = g.size();
  tab.value.resize(size);
  tab.laplacian.resize(size);
  tab.grad.assign(g.n(), ArrayXd(size));
  for (Index i = 0; i < size; ++i) {
    const Point z = g.point(Space::position, i) / t;
    tab.value[i] = chi(z);
    const Point gr = chi.gradient(z) / t;
    for (int d = 0; d < g.n(); ++d) tab.grad[d][i] = gr[d];
    tab.laplacian[i] = chi.laplacian(z) / (t * t);
  }
  return tab;
}

}  // namespace nls
