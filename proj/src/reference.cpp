#include "nlslab/reference.hpp"

#include "nlslab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <numbers>

namespace nls {

ComplexField dense_evolve(const ComplexField& u0, double t, const PotentialSpec& spec) {
  if (u0.space != Space::position) throw UsageError("dense_evolve expects a position-space field");
  const GridSpec& g = u0.grid;
  if (g.size() > 4096) throw UsageError("dense_evolve is limited to 4096 grid points");
  const Eigen::Index M = g.size();
  const int N = g.points();

  // unitary 1-D DFT and its Kronecker powers
  Eigen::MatrixXcd F1(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      F1(k, j) = std::polar(1.0 / std::sqrt(N), -2.0 * std::numbers::pi * j * k / N);
  Eigen::MatrixXcd F = F1;
  for (int d = 1; d < g.n(); ++d) {
    Eigen::MatrixXcd K(F.rows() * N, F.cols() * N);
    for (Eigen::Index a = 0; a < F.rows(); ++a)
      for (Eigen::Index b = 0; b < F.cols(); ++b) K.block(a * N, b * N, N, N) = F(a, b) * F1;
    F = K;
  }
  Eigen::VectorXd k2 = Eigen::VectorXd::Zero(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    const auto idx = g.multi_index(i);
    for (int d = 0; d < g.n(); ++d) {
      const int k = idx[d] < N / 2 ? idx[d] : idx[d] - N;
      k2[i] += std::pow(k * g.step(Space::frequency), 2);
    }
  }
  Eigen::MatrixXcd H = F.adjoint() * (0.5 * k2).cast<Complex>().asDiagonal() * F;
  H.diagonal() += sample_V(spec, g).matrix().cast<Complex>();
  H = 0.5 * (H + H.adjoint()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigendecomposition failed");
  Eigen::VectorXcd phase(M);
  for (Eigen::Index i = 0; i < M; ++i) phase[i] = std::polar(1.0, -t * es.eigenvalues()[i]);
  const Eigen::VectorXcd c = es.eigenvectors().adjoint() * u0.values.matrix();
  ComplexField out = u0;
  out.values = (es.eigenvectors() * phase.cwiseProduct(c)).array();
  out.time = u0.time + t;
  return out;
}

}  // namespace nls
