#include "nlslab/fit.hpp"

#include "nlslab/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace nls {

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& value, double t_lo, double t_hi) {
  if (t.size() != value.size()) throw UsageError("fit_decay: series length mismatch");
  std::vector<double> lx, ly;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(value[i] > 0.0) || !(t[i] > 0.0)) throw UsageError("fit_decay: non-positive sample");
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(value[i]));
  }
  if (lx.size() < 8) throw UsageError("fit_decay: fewer than 8 samples in window");
  const Eigen::Index m = static_cast<Eigen::Index>(lx.size());
  Eigen::MatrixX2d A(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = lx[i];
    y[i] = ly[i];
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd res = y - A * c;
  const double ss_tot = (y.array() - y.mean()).square().sum();
  DecayFit f;
  f.intercept = c[0];
  f.slope = c[1];
  f.r2 = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
  f.samples = static_cast<int>(m);
  return f;
}

std::vector<double> log_spaced(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a * std::pow(b / a, double(i) / (n - 1));
  if (n > 1) out.back() = b;
  return out;
}

}  // namespace nls
