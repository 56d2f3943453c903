#include "nlslab/grid.hpp"

#include "nlslab/errors.hpp"

#include <cmath>
#include <numbers>

namespace nls {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::Index;

std::string to_string(Space s) { return s == Space::position ? "position" : "frequency"; }

GridSpec::GridSpec(int n, int points_per_axis, double half_length)
    : n_(n), N_(points_per_axis), L_(half_length) {
  if (n < 1 || n > 3) throw UsageError("grid dimension must be 1, 2 or 3");
  if (points_per_axis < 2 || points_per_axis % 2 != 0)
    throw UsageError("points per axis must be a positive even integer");
  if (!(half_length > 0.0)) throw UsageError("box half-length must be positive");
}

double GridSpec::dxi() const { return std::numbers::pi / L_; }
double GridSpec::xi_max() const { return std::numbers::pi / dx(); }

Index GridSpec::size() const {
  Index s = 1;
  for (int d = 0; d < n_; ++d) s *= N_;
  return s;
}

double GridSpec::origin(Space s) const { return s == Space::position ? -L_ : -xi_max(); }
double GridSpec::step(Space s) const { return s == Space::position ? dx() : dxi(); }
double GridSpec::cell_volume(Space s) const { return std::pow(step(s), n_); }

ArrayXd GridSpec::axis(Space s) const {
  ArrayXd a(N_);
  const double o = origin(s), h = step(s);
  for (int j = 0; j < N_; ++j) a[j] = o + j * h;
  return a;
}

std::array<int, 3> GridSpec::multi_index(Index flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int d = n_ - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % N_);
    flat /= N_;
  }
  return idx;
}

Point GridSpec::point(Space s, Index flat) const {
  auto idx = multi_index(flat);
  Point p(n_);
  for (int d = 0; d < n_; ++d) p[d] = origin(s) + idx[d] * step(s);
  return p;
}

ArrayXd GridSpec::coordinate(Space s, int d) const {
  ArrayXd c(size());
  Index stride = 1;
  for (int k = d + 1; k < n_; ++k) stride *= N_;
  const double o = origin(s), h = step(s);
  for (Index i = 0; i < c.size(); ++i) c[i] = o + static_cast<double>((i / stride) % N_) * h;
  return c;
}

ArrayXd GridSpec::radius_squared(Space s) const {
  ArrayXd r2 = ArrayXd::Zero(size());
  for (int d = 0; d < n_; ++d) r2 += coordinate(s, d).square();
  return r2;
}

ComplexField::ComplexField(const GridSpec& g, Space s, double t)
    : grid(g), values(ArrayXcd::Zero(g.size())), time(t), space(s) {}

ComplexField::ComplexField(const GridSpec& g, ArrayXcd v, Space s, double t)
    : grid(g), values(std::move(v)), time(t), space(s) {
  if (values.size() != grid.size()) throw UsageError("field length does not match grid");
}

namespace {

// multiply by scale * (-1)^(i0+i1+i2)
void checkerboard(ArrayXcd& a, const GridSpec& g, double scale) {
  const Index N = g.points();
  for (Index i = 0; i < a.size(); ++i) {
    Index parity = 0, rest = i;
    for (int d = 0; d < g.n(); ++d) {
      parity += rest % N;
      rest /= N;
    }
    a[i] *= (parity & 1) ? -scale : scale;
  }
}

double transform_scale(const GridSpec& g, Space from) {
  double c = std::pow(g.step(from) / std::sqrt(2.0 * std::numbers::pi), g.n());
  if ((g.n() * (g.points() / 2)) % 2 != 0) c = -c;
  return c;
}

// raw-DFT wavenumber for bin k (FFT ordering), Nyquist dropped
double dft_wavenumber(const GridSpec& g, Index k) {
  const Index N = g.points();
  if (k == N / 2) return 0.0;
  return (k < N / 2 ? k : k - N) * g.dxi();
}

}  // namespace

ComplexField fft(const ComplexField& f) {
  if (f.space != Space::position) throw UsageError("fft expects a position-space field");
  ComplexField out(f.grid, f.values, Space::frequency, f.time);
  checkerboard(out.values, f.grid, 1.0);
  detail::dft(out.values.data(), f.grid.n(), f.grid.points(), -1);
  checkerboard(out.values, f.grid, transform_scale(f.grid, Space::position));
  return out;
}

ComplexField ifft(const ComplexField& f) {
  if (f.space != Space::frequency) throw UsageError("ifft expects a frequency-space field");
  ComplexField out(f.grid, f.values, Space::position, f.time);
  checkerboard(out.values, f.grid, 1.0);
  detail::dft(out.values.data(), f.grid.n(), f.grid.points(), +1);
  checkerboard(out.values, f.grid, transform_scale(f.grid, Space::frequency));
  return out;
}

double norm_lp(const ComplexField& f, double p) {
  if (!(p >= 1.0)) throw DomainError("norm_lp requires p >= 1");
  if (std::isinf(p)) return f.values.abs().maxCoeff();
  const double vol = f.grid.cell_volume(f.space);
  if (p == 2.0) return std::sqrt(f.values.abs2().sum() * vol);
  return std::pow(f.values.abs().pow(p).sum() * vol, 1.0 / p);
}

double norm_l2(const ComplexField& f) { return norm_lp(f, 2.0); }

double norm_sobolev(const ComplexField& f, double gamma) {
  if (gamma < 0.0) throw DomainError("Sobolev index must be non-negative");
  const ComplexField fh = f.space == Space::position ? fft(f) : f;
  const ArrayXd w = (1.0 + f.grid.radius_squared(Space::frequency)).pow(gamma);
  return std::sqrt((w * fh.values.abs2()).sum() * f.grid.cell_volume(Space::frequency));
}

double norm_weighted(const ComplexField& f, double gamma) {
  if (f.space != Space::position) throw UsageError("weighted norm expects a position-space field");
  if (gamma < 0.0) throw DomainError("weight index must be non-negative");
  const ArrayXd w = (1.0 + f.grid.radius_squared(Space::position)).pow(gamma);
  return std::sqrt((w * f.values.abs2()).sum() * f.grid.cell_volume(Space::position));
}

std::vector<ArrayXcd> spectral_gradient(const ComplexField& f) {
  if (f.space != Space::position) throw UsageError("spectral gradient expects a position-space field");
  const GridSpec& g = f.grid;
  const Index N = g.points();
  ArrayXcd hat = f.values;
  detail::dft(hat.data(), g.n(), g.points(), -1);
  std::vector<ArrayXcd> out;
  for (int d = 0; d < g.n(); ++d) {
    Index stride = 1;
    for (int k = d + 1; k < g.n(); ++k) stride *= N;
    ArrayXcd comp(hat.size());
    for (Index i = 0; i < hat.size(); ++i)
      comp[i] = hat[i] * Complex(0.0, dft_wavenumber(g, (i / stride) % N));
    detail::dft(comp.data(), g.n(), g.points(), +1);
    comp /= static_cast<double>(g.size());
    out.push_back(std::move(comp));
  }
  return out;
}

ArrayXcd spectral_laplacian(const ComplexField& f) {
  if (f.space != Space::position) throw UsageError("spectral laplacian expects a position-space field");
  const GridSpec& g = f.grid;
  const Index N = g.points();
  ArrayXcd hat = f.values;
  detail::dft(hat.data(), g.n(), g.points(), -1);
  for (Index i = 0; i < hat.size(); ++i) {
    double k2 = 0.0;
    Index rest = i;
    for (int d = 0; d < g.n(); ++d) {
      const Index k = rest % N;
      rest /= N;
      const double q = (k < N / 2 ? k : k - N) * g.dxi();
      k2 += q * q;
    }
    hat[i] *= -k2;
  }
  detail::dft(hat.data(), g.n(), g.points(), +1);
  return hat / static_cast<double>(g.size());
}

double edge_mass_fraction(const ComplexField& f) {
  const GridSpec& g = f.grid;
  const double total = f.values.abs2().sum();
  if (total == 0.0) return 0.0;
  const double lo = g.origin(f.space), width = g.step(f.space) * g.points();
  const double band = 0.1 * width / 2.0;
  const ArrayXd ax = g.axis(f.space);
  std::vector<bool> edge(g.points());
  for (int j = 0; j < g.points(); ++j) edge[j] = ax[j] - lo < band || lo + width - ax[j] <= band;
  double outer = 0.0;
  const Index N = g.points();
  for (Index i = 0; i < f.values.size(); ++i) {
    Index rest = i;
    bool near = false;
    for (int d = 0; d < g.n() && !near; ++d) {
      near = edge[rest % N];
      rest /= N;
    }
    if (near) outer += std::norm(f.values[i]);
  }
  return outer / total;
}

}  // namespace nls
