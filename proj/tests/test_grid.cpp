#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/resample.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>
#include <sstream>

using namespace nls;
using nls::testing::gaussian;
using nls::testing::random_smooth_field;
using nls::testing::rel_l2;

TEST_CASE("grid spacing and symmetric wavenumbers") {
  GridSpec g(2, 64, 10.0);
  CHECK(g.dx() * g.points() == doctest::Approx(20.0).epsilon(1e-15));
  const Eigen::ArrayXd xi = g.wavenumbers();
  CHECK(xi[0] == doctest::Approx(-g.xi_max()));
  for (int k = 1; k < g.points(); ++k) CHECK(xi[k] == doctest::Approx(-xi[g.points() - k]));
  CHECK(xi[g.points() / 2] == 0.0);
  CHECK_THROWS_AS(GridSpec(1, 63, 1.0), UsageError);
  CHECK_THROWS_AS(GridSpec(4, 64, 1.0), UsageError);
}

TEST_CASE("fft of zero and of a Gaussian") {
  GridSpec g(1, 1024, 40.0);
  ComplexField zero(g, Space::position);
  CHECK(fft(zero).values.abs().maxCoeff() == 0.0);

  const ComplexField fh = fft(gaussian(g));
  CHECK(fh.space == Space::frequency);
  const Eigen::ArrayXd xi = g.wavenumbers();
  double err = 0.0;
  for (int k = 0; k < g.points(); ++k) err = std::max(err, std::abs(fh.values[k] - std::exp(-xi[k] * xi[k] / 2)));
  CHECK(err <= 1e-10);
  CHECK_THROWS_AS(ifft(gaussian(g)), UsageError);
  CHECK_THROWS_AS(fft(fh), UsageError);
}

TEST_CASE("fft of a 2-D and 3-D Gaussian matches the closed form") {
  for (int n : {2, 3}) {
    GridSpec g(n, 64, 12.0);
    const ComplexField fh = fft(gaussian(g));
    const Eigen::ArrayXd expect = (-g.radius_squared(Space::frequency) / 2).exp();
    CHECK((fh.values - expect.cast<Complex>()).abs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("inversion and Plancherel on random fields") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    GridSpec g(n, n == 3 ? 16 : 64, 5.0 + trial);
    const ComplexField f = random_smooth_field(g, rng, 4);
    const ComplexField fh = fft(f);
    CHECK(rel_l2(ifft(fh).values, f.values) <= 1e-12);
    CHECK(std::abs(norm_lp(f, 2) - norm_lp(fh, 2)) <= 1e-12 * norm_lp(f, 2));
  }
}

TEST_CASE("shift by one cell multiplies the transform by exp(-i xi dx)") {
  std::mt19937_64 rng(11);
  GridSpec g(1, 256, 20.0);
  const ComplexField f = random_smooth_field(g, rng, 10);
  ComplexField shifted(g, Space::position);
  for (int j = 0; j < g.points(); ++j) shifted.values[(j + 1) % g.points()] = f.values[j];
  const ComplexField a = fft(shifted), b = fft(f);
  const Eigen::ArrayXd xi = g.wavenumbers();
  double err = 0.0;
  for (int k = 0; k < g.points(); ++k)
    err = std::max(err, std::abs(a.values[k] - std::exp(Complex(0, -xi[k] * g.dx())) * b.values[k]));
  CHECK(err <= 1e-10);
}

TEST_CASE("Lebesgue norms") {
  GridSpec g(2, 32, 4.0);
  ComplexField ind(g, Space::position);
  for (int i = 0; i < 7; ++i) ind.values[3 * i + 40] = 1.0;
  CHECK(norm_lp(ind, 1) == doctest::Approx(7 * g.cell_volume(Space::position)));

  GridSpec g1(1, 1024, 40.0);
  CHECK(std::abs(norm_lp(gaussian(g1), 2) - std::pow(std::numbers::pi, 0.25)) <= 1e-8);

  ComplexField peak(g1, Space::position);
  peak.values[100] = Complex(0.0, -3.5);
  peak.values[101] = 1.0;
  CHECK(norm_lp(peak, INFINITY) == 3.5);
  CHECK_THROWS_AS(norm_lp(peak, 0.5), DomainError);
}

TEST_CASE("Sobolev and weighted norms") {
  GridSpec g(1, 1024, 40.0);
  const ComplexField f = gaussian(g);
  CHECK(norm_sobolev(f, 0.0) == doctest::Approx(norm_lp(f, 2)).epsilon(1e-12));
  // int (1 + xi^2) e^{-xi^2} = 3 sqrt(pi) / 2
  CHECK(norm_sobolev(f, 1.0) == doctest::Approx(std::sqrt(1.5 * std::sqrt(std::numbers::pi))).epsilon(1e-10));
  // int (1 + x^2)^2 e^{-x^2} = (1 + 1 + 3/4) sqrt(pi)
  CHECK(norm_weighted(f, 2.0) == doctest::Approx(std::sqrt(2.75 * std::sqrt(std::numbers::pi))).epsilon(1e-10));
  CHECK(norm_weighted(f, 0.0) == doctest::Approx(norm_lp(f, 2)).epsilon(1e-14));

  ComplexField delta(g, Space::position);
  delta.values[g.points() / 2] = 2.0;
  CHECK(norm_weighted(delta, 1.5) == doctest::Approx(norm_lp(delta, 2)).epsilon(1e-14));

  // plane wave of unit L2 norm sitting on lattice mode xi0
  const int m = 37;
  const double xi0 = m * g.dxi();
  ComplexField wave(g, Space::position);
  const Eigen::ArrayXd x = g.axis(Space::position);
  for (int j = 0; j < g.points(); ++j) wave.values[j] = std::exp(Complex(0, xi0 * x[j])) / std::sqrt(2 * g.half_length());
  for (double gam : {0.5, 1.0, 2.0})
    CHECK(norm_sobolev(wave, gam) == doctest::Approx(std::pow(1 + xi0 * xi0, gam / 2)).epsilon(1e-12));
}

TEST_CASE("Sobolev norm is monotone in the index") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    GridSpec g(1 + trial % 2, 64, 8.0);
    const ComplexField f = random_smooth_field(g, rng, 6);
    double prev = 0.0;
    for (double gam = 0.0; gam <= 3.0; gam += 0.25) {
      const double v = norm_sobolev(f, gam);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("spectral derivatives of a Gaussian") {
  GridSpec g(2, 64, 12.0);
  const ComplexField f = gaussian(g);
  const auto grad = spectral_gradient(f);
  const Eigen::ArrayXd x0 = g.coordinate(Space::position, 0), x1 = g.coordinate(Space::position, 1);
  const Eigen::ArrayXd r2 = g.radius_squared(Space::position);
  CHECK((grad[0] + (x0 * f.values.real()).cast<Complex>()).abs().maxCoeff() <= 1e-9);
  CHECK((grad[1] + (x1 * f.values.real()).cast<Complex>()).abs().maxCoeff() <= 1e-9);
  const Eigen::ArrayXd lap = (r2 - 2.0) * f.values.real();
  CHECK((spectral_laplacian(f) - lap.cast<Complex>()).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("edge mass fraction") {
  GridSpec g(1, 200, 10.0);
  ComplexField f(g, Space::position);
  f.values[100] = 1.0;
  CHECK(edge_mass_fraction(f) == 0.0);
  f.values[2] = 1.0;
  CHECK(edge_mass_fraction(f) == doctest::Approx(0.5));
}

TEST_CASE("binary container and CSV round trip") {
  std::mt19937_64 rng(5);
  GridSpec g(2, 16, 3.0);
  ComplexField f = random_smooth_field(g, rng, 3);
  f.time = 12.5;
  std::stringstream ss;
  write_field(ss, f);
  const ComplexField back = read_field(ss);
  CHECK(back.grid == g);
  CHECK(back.time == 12.5);
  CHECK(back.space == Space::position);
  CHECK((back.values - f.values).abs().maxCoeff() <= 1e-6 * f.values.abs().maxCoeff());
  std::stringstream bad("XXXX");
  CHECK_THROWS_AS(read_field(bad), UsageError);
}

TEST_CASE("chirp resampling reproduces trigonometric polynomials") {
  const int N = 64;
  const double a = -3.0, h = 0.1, P = N * h;
  auto poly = [&](double p) {
    Complex v = 0.3;
    for (int k = 1; k < 10; ++k)
      v += std::exp(Complex(0, 2 * std::numbers::pi * k * (p - a) / P)) / double(k * k) +
           Complex(0, 0.5) * std::exp(Complex(0, -2 * std::numbers::pi * k * (p - a) / P)) / double(k);
    return v;
  };
  Eigen::ArrayXcd src(N);
  for (int j = 0; j < N; ++j) src[j] = poly(a + j * h);
  for (double s : {0.01, 0.037, 0.1, 0.2}) {
    const double b = -1.7;
    const Eigen::ArrayXcd dst = resample_uniform(src, 1, N, a, h, b, s);
    for (int m = 0; m < N; ++m) {
      const double p = b + m * s;
      if (p >= a && p < a + (N - 1) * h) CHECK(std::abs(dst[m] - poly(p)) <= 1e-11);
      else if (p >= a + (N - 0.5) * h) CHECK(dst[m] == Complex(0.0));
    }
  }
}

TEST_CASE("chirp resampling is separable in two dimensions") {
  const int N = 48;
  GridSpec g(2, N, 7.0);
  const ComplexField f = gaussian(g, 0.9);
  const double s = g.dx() / 2.5, b = -g.half_length() / 2.5;
  const Eigen::ArrayXcd dst = resample_uniform(f.values, 2, N, -g.half_length(), g.dx(), b, s);
  double err = 0.0;
  for (Eigen::Index i = 0; i < dst.size(); ++i) {
    const auto idx = g.multi_index(i);
    const double x = b + idx[0] * s, y = b + idx[1] * s;
    err = std::max(err, std::abs(dst[i] - std::exp(-(x * x + y * y) / (2 * 0.81))));
  }
  CHECK(err <= 1e-10);
}
