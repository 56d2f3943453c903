#include "nlslab/dollard.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/fit.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace nls;

namespace {

PotentialSpec tail(int n, double Z, double rho, LongRangeForm form = LongRangeForm::inverse_bracket) {
  PotentialSpec s;
  s.n = n;
  s.long_range = LongRange{Z, rho, form};
  s.regularization = 1e-3;
  return s;
}

Point ray(int n, double r) {
  Point p = Point::Zero(n);
  p[0] = r;
  return p;
}

}  // namespace

TEST_CASE("Q quadrature") {
  const PotentialSpec s = tail(2, 0.7, 0.9);
  CHECK(dollard_Q(s, 0.0, ray(2, 3.0)) == 0.0);
  CHECK(dollard_Q(s, 12.5, Point::Zero(2)) == doctest::Approx(0.7 * 12.5).epsilon(1e-14));
  const PotentialSpec coul = tail(3, 1.3, 1.0);
  for (double r : {0.1, 1.0, 2.5, 10.0})
    for (double t : {0.5, 3.0, 40.0, 2000.0}) {
      Point x(3);
      x << r * 0.6, 0.0, r * 0.8;
      CHECK(std::abs(dollard_Q(coul, t, x) - 1.3 / r * std::asinh(r * t)) <= 1e-9);
    }
  PotentialSpec none;
  none.n = 2;
  CHECK(dollard_Q(none, 5.0, ray(2, 1.0)) == 0.0);
  CHECK_THROWS_AS(dollard_Q(s, -1.0, ray(2, 1.0)), DomainError);
}

TEST_CASE("Vtilde") {
  const PotentialSpec s = tail(2, 0.5, 0.9);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  SUBCASE("vanishes without a tail and at t = 0") {
    PotentialSpec none;
    none.n = 2;
    CHECK(dollard_Vtilde(none, 3.0, ray(2, 2.0)) == 0.0);
    CHECK(dollard_Vtilde(s, 0.0, ray(2, 2.0)) == 0.0);
  }
  SUBCASE("nested form reduces to Q") {
    for (int k = 0; k < 4; ++k) {
      Point y(2);
      y << 3 * u(rng) - 1.5, 3 * u(rng) - 1.5;
      const double t = 1 + 60 * u(rng);
      CHECK(std::abs(dollard_Vtilde(s, t, y) - dollard_Q(s, t, y)) <= 1e-8);
    }
  }
  SUBCASE("refined quadrature agrees") {
    Point y(2);
    y << 0.8, -1.1;
    for (double t : {2.0, 30.0, 300.0})
      CHECK(std::abs(dollard_Vtilde(s, t, y, 1e-10) - dollard_Vtilde(s, t, y, 1e-11)) <= 1e-8);
  }
  SUBCASE("growth bound with a stable constant") {
    auto fitted = [&](std::uint64_t seed) {
      std::mt19937_64 g(seed);
      double C = 0;
      for (int k = 0; k < 40; ++k) {
        const double t = std::exp(std::log(1.0) + u(g) * std::log(1e4));
        const Point y = ray(2, 1.0 + 4 * u(g));
        C = std::max(C, std::abs(dollard_Q(s, t, y)) / (t * std::pow(1 + t * t, -0.45)));
      }
      return C;
    };
    const double c1 = fitted(1), c2 = fitted(2);
    CHECK(c2 <= 1.5 * c1);
    CHECK(c1 < 10.0);
  }
}

TEST_CASE("derivatives of Q") {
  const PotentialSpec s = tail(3, 0.5, 0.9);
  Point y(3);
  y << 0.7, -0.3, 1.2;
  const double t = 25.0, h = 1e-4;
  const Point g = dollard_gradQ(s, t, y);
  double lap = 0;
  for (int d = 0; d < 3; ++d) {
    Point e = Point::Zero(3);
    e[d] = h;
    const double qp = dollard_Q(s, t, y + e), qm = dollard_Q(s, t, y - e), q0 = dollard_Q(s, t, y);
    CHECK(std::abs((qp - qm) / (2 * h) - g[d]) <= 1e-6);
    lap += (qp - 2 * q0 + qm) / (h * h);
  }
  CHECK(std::abs(lap - dollard_laplacianQ(s, t, y)) <= 1e-4);
}

TEST_CASE("averaging identity") {
  const PotentialSpec s = tail(2, 0.5, 0.9);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 20; ++k) {
    const double t = 1 + 100 * u(rng);
    Point x(2);
    x << 200 * u(rng) - 100, 200 * u(rng) - 100;
    const Point y = x / t;
    const double avg = (dollard_Q(s, t, y) + y.dot(dollard_gradQ(s, t, y))) / t;
    CHECK(std::abs(avg - eval_VL(s, x)) <= 1e-10);
  }
}

TEST_CASE("Dollard phase on a grid") {
  SUBCASE("free") {
    PotentialSpec none;
    none.n = 2;
    const GridSpec g(2, 16, 8.0);
    const PhaseField ph = build_psi_dollard(none, 2.0, g);
    CHECK((ph.psi - free_phase(g, 2.0).psi).abs().maxCoeff() == 0.0);
    CHECK(ph.kind == PhaseKind::dollard);
  }
  const PotentialSpec s = tail(2, 0.5, 0.9);
  const GridSpec g(2, 32, 40.0);
  const double t = 6.0;
  const PhaseField ph = build_psi_dollard(s, t, g);
  SUBCASE("even in x") {
    // x -> -x maps flat index i to the mirrored index on the centred lattice
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const Point x = g.point(Space::position, i);
      if (std::abs(x[0]) >= g.half_length() - 1e-9 || std::abs(x[1]) >= g.half_length() - 1e-9) continue;
      const auto j = [&] {
        const int N = g.points();
        const int a = static_cast<int>(i / N), b = static_cast<int>(i % N);
        return static_cast<Eigen::Index>((N - a) % N) * N + (N - b) % N;
      }();
      CHECK(ph.psi[j] == doctest::Approx(ph.psi[i]).epsilon(1e-13));
    }
  }
  SUBCASE("matches pointwise quadratures") {
    for (Eigen::Index i = 0; i < g.size(); i += 37) {
      const Point x = g.point(Space::position, i);
      const Point y = x / t;
      CHECK(std::abs(ph.psi[i] - (x.squaredNorm() / (2 * t) - dollard_Vtilde(s, t, y))) <= 1e-8);
      const Point gr = x / t - dollard_gradQ(s, t, y) / t;
      CHECK(std::abs(ph.grad_psi[0][i] - gr[0]) <= 1e-10);
      CHECK(std::abs(ph.grad_psi[1][i] - gr[1]) <= 1e-10);
      CHECK(std::abs(ph.laplacian_psi[i] - (2 / t - dollard_laplacianQ(s, t, y) / (t * t))) <= 1e-10);
    }
  }
  SUBCASE("gauge residual matches a time difference") {
    const double h = 1e-2;
    const PhaseField p2 = build_psi_dollard(s, t + 2 * h, g), p = build_psi_dollard(s, t + h, g),
                     m = build_psi_dollard(s, t - h, g), m2 = build_psi_dollard(s, t - 2 * h, g);
    const Eigen::ArrayXd VL = sample_VL(s, g);
    for (Eigen::Index i = 0; i < g.size(); i += 11) {
      const double dt = (-p2.psi[i] + 8 * p.psi[i] - 8 * m.psi[i] + m2.psi[i]) / (12 * h);
      const double g2 = ph.grad_psi[0][i] * ph.grad_psi[0][i] + ph.grad_psi[1][i] * ph.grad_psi[1][i];
      CHECK(std::abs(dt + 0.5 * g2 + VL[i] - ph.gauge_residual[i]) <= 1e-7);
    }
  }
}

TEST_CASE("Dollard phase decay") {
  // regularized |x|^{-rho}: the radial sup is a clean power law
  const double rho = 0.9, c0 = 1.0;
  const PotentialSpec s = tail(2, 0.5, rho, LongRangeForm::inverse_power);
  const std::vector<double> ts = log_spaced(10, 1000, 10);
  std::vector<double> grad, lap, gauge;
  for (double t : ts) {
    double a = 0, b = 0, c = 0;
    for (double r = c0; r <= 20 * c0; r *= 1.05) {
      const Point y = ray(2, r);
      const Point gq = dollard_gradQ(s, t, y);
      a = std::max(a, gq.norm() / t);
      b = std::max(b, std::abs(dollard_laplacianQ(s, t, y)) / (t * t));
      c = std::max(c, gq.squaredNorm() / (2 * t * t));
    }
    grad.push_back(a);
    lap.push_back(b);
    gauge.push_back(c);
  }
  const DecayFit fg = fit_decay(ts, grad), fl = fit_decay(ts, lap), fr = fit_decay(ts, gauge);
  MESSAGE("slopes: " << fg.slope << " " << fl.slope << " " << fr.slope);
  CHECK(std::abs(fg.slope + rho) <= 0.15);
  CHECK(std::abs(fl.slope + 1 + rho) <= 0.2);
  CHECK(std::abs(fr.slope + 2 * rho) <= 0.2);
}
