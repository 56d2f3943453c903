#include "nlslab/resample.hpp"

#include "nlslab/grid.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace nls {

using Eigen::ArrayXcd;
using Eigen::Index;

namespace {

Complex cis_turns(long double turns) {
  const long double frac = turns - std::floor(turns);
  const double ang = static_cast<double>(2.0L * std::numbers::pi_v<long double> * frac);
  return {std::cos(ang), std::sin(ang)};
}

struct Chirp {
  int N;
  ArrayXcd pre;         // e^{2 pi i k beta} w^{k^2/2}, k = -N/2..N/2
  ArrayXcd kernel_hat;  // DFT of w^{-(d - N/2)^2 / 2}, length 2N
  ArrayXcd post;        // w^{m^2/2}
  std::vector<bool> inside;
};

Chirp make_chirp(int N, double a, double h, double b, double s) {
  const long double P = static_cast<long double>(N) * h;
  const long double alpha = s / P, beta = (b - a) / P;
  Chirp c;
  c.N = N;
  c.pre.resize(N + 1);
  for (int kk = 0; kk <= N; ++kk) {
    const long double k = kk - N / 2;
    c.pre[kk] = cis_turns(k * beta + 0.5L * alpha * k * k);
  }
  c.kernel_hat = ArrayXcd::Zero(2 * N);
  for (int d = 0; d < 2 * N; ++d) {
    const long double q = d - N / 2;
    c.kernel_hat[d] = cis_turns(-0.5L * alpha * q * q);
  }
  detail::dft(c.kernel_hat.data(), 1, 2 * N, -1);
  c.post.resize(N);
  c.inside.resize(N);
  for (int m = 0; m < N; ++m) {
    c.post[m] = cis_turns(0.5L * alpha * static_cast<long double>(m) * m);
    const double p = b + m * s;
    c.inside[m] = p >= a - 0.5 * h && p < a + (N - 0.5) * h;
  }
  return c;
}

// lines: howmany contiguous rows of length N, transformed in place
void chirp_lines(Complex* lines, Index howmany, const Chirp& c) {
  const int N = c.N;
  std::vector<Complex> coef(N), work(2 * N);
  for (Index l = 0; l < howmany; ++l) {
    Complex* g = lines + l * N;
    std::copy(g, g + N, coef.begin());
    detail::dft(coef.data(), 1, N, -1);
    std::fill(work.begin(), work.end(), Complex(0.0));
    const double inv = 1.0 / N;
    for (int kk = 0; kk <= N; ++kk) {
      const int k = kk - N / 2;
      Complex ck = coef[(k % N + N) % N] * inv;
      if (kk == 0 || kk == N) ck *= 0.5;
      work[kk] = ck * c.pre[kk];
    }
    detail::dft(work.data(), 1, 2 * N, -1);
    for (int j = 0; j < 2 * N; ++j) work[j] *= c.kernel_hat[j];
    detail::dft(work.data(), 1, 2 * N, +1);
    const double norm = 1.0 / (2.0 * N);
    for (int m = 0; m < N; ++m) g[m] = c.inside[m] ? work[m + N] * norm * c.post[m] : Complex(0.0);
  }
}

}  // namespace

ArrayXcd resample_uniform(const ArrayXcd& values, int n, int N, double src_origin, double src_step,
                          double dst_origin, double dst_step) {
  const Chirp c = make_chirp(N, src_origin, src_step, dst_origin, dst_step);
  ArrayXcd out = values;
  const Index total = out.size();
  std::vector<Complex> line_block;
  for (int d = 0; d < n; ++d) {
    Index stride = 1;
    for (int k = d + 1; k < n; ++k) stride *= N;
    if (stride == 1) {
      chirp_lines(out.data(), total / N, c);
      continue;
    }
    // gather strided lines into rows, transform, scatter back
    const Index outer = total / (stride * N);
    line_block.resize(static_cast<size_t>(stride) * N);
    for (Index o = 0; o < outer; ++o) {
      Complex* base = out.data() + o * stride * N;
      for (Index j = 0; j < N; ++j)
        for (Index i = 0; i < stride; ++i) line_block[i * N + j] = base[j * stride + i];
      chirp_lines(line_block.data(), stride, c);
      for (Index j = 0; j < N; ++j)
        for (Index i = 0; i < stride; ++i) base[j * stride + i] = line_block[i * N + j];
    }
  }
  return out;
}

}  // namespace nls
