#include "nlslab/dollard.hpp"

#include "nlslab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>
#include <map>

namespace nls {

using Eigen::ArrayXd;
using Eigen::Index;

namespace {

// tau-scale on which V^L(tau y) changes: 1/|y| for the bracket, delta/|y| for
// the regularized power
double knee(const PotentialSpec& spec, const Point& y) {
  const double r = y.norm();
  const double a = spec.long_range->form == LongRangeForm::inverse_power ? spec.regularization : 1.0;
  return r > 0.0 ? a / r : std::numeric_limits<double>::infinity();
}

// adaptive Gauss-Kronrod on [0, t] split at knee * 10^k
template <class Fn>
double integrate(Fn&& f, double t, double knee, double tol, const char* what) {
  if (t == 0.0) return 0.0;
  if (t < 0.0) throw DomainError("Dollard quadratures need t >= 0");
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  std::vector<double> cuts{0.0};
  for (double c = knee; c < t; c *= 10.0) cuts.push_back(c);
  cuts.push_back(t);
  const double share = tol / (cuts.size() - 1);
  double v = 0.0, err = 0.0;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    double e = 0.0, l1 = 0.0;
    GK::integrate(f, cuts[k], cuts[k + 1], 0, 0.0, &e, &l1);
    // boost's tolerance is relative to the interval's own L1 norm
    const double rel = std::clamp(share / std::max(l1, 1e-300), 1e-12, 1e-3);
    v += GK::integrate(f, cuts[k], cuts[k + 1], 15, rel, &e);
    err += e;
  }
  if (!std::isfinite(v) || err > tol * std::max(1.0, std::abs(v)))
    throw QuadratureFailure(std::string(what) + ": quadrature did not reach tolerance");
  return v;
}

}  // namespace

double dollard_Q(const PotentialSpec& spec, double t, const Point& x, double tol) {
  if (!spec.has_long_range()) return 0.0;
  return integrate([&](double tau) { return eval_VL(spec, Point(tau * x)); }, t, knee(spec, x), tol, "Q");
}

Point dollard_gradQ(const PotentialSpec& spec, double t, const Point& x, double tol) {
  Point g = Point::Zero(x.size());
  if (!spec.has_long_range()) return g;
  for (Index d = 0; d < x.size(); ++d)
    g[d] = integrate([&](double tau) { return tau * grad_VL(spec, Point(tau * x))[d]; }, t, knee(spec, x), tol,
                     "grad Q");
  return g;
}

double dollard_laplacianQ(const PotentialSpec& spec, double t, const Point& x, double tol) {
  if (!spec.has_long_range()) return 0.0;
  return integrate([&](double tau) { return tau * tau * laplacian_VL(spec, Point(tau * x)); }, t, knee(spec, x),
                   tol, "Laplacian Q");
}

double dollard_Vtilde(const PotentialSpec& spec, double t, const Point& x, double tol) {
  if (!spec.has_long_range()) return 0.0;
  const double v0 = eval_VL(spec, Point::Zero(x.size()));
  auto bracket = [&](double tau) {
    if (tau < 1e-8) return v0;
    return (dollard_Q(spec, tau, x, 0.1 * tol) + x.dot(dollard_gradQ(spec, tau, x, 0.1 * tol))) / tau;
  };
  return integrate(bracket, t, knee(spec, x), tol, "Vtilde");
}

PhaseField build_psi_dollard(const PotentialSpec& spec, double t, const GridSpec& g) {
  if (g.n() != spec.n) throw UsageError("grid and potential dimensions differ");
  if (!(t >= 1.0)) throw DomainError("build_psi_dollard needs t >= 1");
  PhaseField ph = free_phase(g, t);
  ph.kind = PhaseKind::dollard;
  if (!spec.has_long_range()) return ph;
  const int n = g.n();
  // V^L is radial, so every quadrature depends on |y| only
  struct Radial {
    double q, dq, lap;
  };
  std::map<double, Radial> cache;
  for (Index i = 0; i < g.size(); ++i) {
    const Point x = g.point(Space::position, i);
    const Point y = x / t;
    const double r2 = x.squaredNorm();
    auto it = cache.find(r2);
    if (it == cache.end()) {
      Point e = Point::Zero(n);
      e[0] = y.norm();
      it = cache.emplace(r2, Radial{dollard_Q(spec, t, e), dollard_gradQ(spec, t, e)[0], dollard_laplacianQ(spec, t, e)})
               .first;
    }
    const Radial& q = it->second;
    const double r = y.norm();
    const Point grad = r > 0.0 ? Point(q.dq / r * y) : Point::Zero(n);
    ph.psi[i] -= q.q;
    for (int d = 0; d < n; ++d) {
      ph.grad_psi[d][i] -= grad[d] / t;
      ph.theta[d][i] = ph.grad_psi[d][i];
    }
    ph.laplacian_psi[i] -= q.lap / (t * t);
    ph.gauge_residual[i] = grad.squaredNorm() / (2 * t * t);
  }
  return ph;
}

}  // namespace nls
