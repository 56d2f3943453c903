#include "nlslab/phase.hpp"

#include "nlslab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nls {

using Eigen::ArrayXd;
using Eigen::Index;

std::string to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::free: return "free";
    case PhaseKind::yafaev: return "yafaev";
    case PhaseKind::dollard: return "dollard";
  }
  return "?";
}

PhaseField free_phase(const GridSpec& g, double t) {
  if (!(t > 0.0)) throw DomainError("free phase needs t > 0");
  PhaseField ph;
  ph.grid = g;
  ph.t = t;
  ph.kind = PhaseKind::free;
  const ArrayXd r2 = g.radius_squared(Space::position);
  ph.psi = r2 / (2.0 * t);
  for (int d = 0; d < g.n(); ++d) {
    ph.grad_psi.push_back(g.coordinate(Space::position, d) / t);
    ph.theta.push_back(ph.grad_psi.back());
  }
  ph.laplacian_psi = ArrayXd::Constant(g.size(), g.n() / t);
  ph.gauge_residual = ArrayXd::Zero(g.size());
  return ph;
}

PhaseDeviation phase_deviation(const PhaseField& phase, double r_min) {
  const GridSpec& g = phase.grid;
  const double t = phase.t;
  const ArrayXd r2 = g.radius_squared(Space::position);
  std::vector<ArrayXd> coord;
  for (int d = 0; d < g.n(); ++d) coord.push_back(g.coordinate(Space::position, d));
  PhaseDeviation dev{0.0, 0.0};
  for (Index i = 0; i < g.size(); ++i) {
    if (r2[i] < r_min * r_min) continue;
    double s = 0.0;
    for (int d = 0; d < g.n(); ++d) {
      const double e = phase.grad_psi[d][i] - coord[d][i] / t;
      s += e * e;
    }
    dev.gradient = std::max(dev.gradient, std::sqrt(s));
    dev.laplacian = std::max(dev.laplacian, std::abs(phase.laplacian_psi[i] - g.n() / t));
  }
  return dev;
}

}  // namespace nls
