#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace nls {

using Complex = std::complex<double>;

// Points and small matrices live in at most three dimensions.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

enum class Space { position, frequency };

std::string to_string(Space s);

// Periodic box [-L, L)^n with N points per axis. Frequencies live on the
// dual lattice xi_k = -pi/dx + k*pi/L, so both spaces are plain uniform grids
// and flat index ((i0*N)+i1)*N+i2 addresses either one.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int n, int points_per_axis, double half_length);

  int n() const { return n_; }
  int points() const { return N_; }
  double half_length() const { return L_; }
  double dx() const { return 2.0 * L_ / N_; }
  double dxi() const;
  double xi_max() const;  // |Nyquist|
  Eigen::Index size() const;

  double origin(Space s) const;
  double step(Space s) const;
  double cell_volume(Space s) const;

  Eigen::ArrayXd axis(Space s) const;
  Eigen::ArrayXd wavenumbers() const { return axis(Space::frequency); }

  std::array<int, 3> multi_index(Eigen::Index flat) const;
  Point point(Space s, Eigen::Index flat) const;
  // component `d` of the coordinate at every flat index
  Eigen::ArrayXd coordinate(Space s, int d) const;
  Eigen::ArrayXd radius_squared(Space s) const;

  bool operator==(const GridSpec&) const = default;

 private:
  int n_ = 1;
  int N_ = 2;
  double L_ = 1.0;
};

struct ComplexField {
  GridSpec grid;
  Eigen::ArrayXcd values;
  double time = 0.0;
  Space space = Space::position;

  ComplexField() = default;
  ComplexField(const GridSpec& g, Space s, double t = 0.0);
  ComplexField(const GridSpec& g, Eigen::ArrayXcd v, Space s, double t = 0.0);
};

ComplexField fft(const ComplexField& f);
ComplexField ifft(const ComplexField& f);

// Riemann sums with the cell volume of the field's own space.
double norm_lp(const ComplexField& f, double p);
double norm_l2(const ComplexField& f);
double norm_sobolev(const ComplexField& f, double gamma);
double norm_weighted(const ComplexField& f, double gamma);

// d/dx_j by Fourier multiplier; Nyquist mode dropped.
std::vector<Eigen::ArrayXcd> spectral_gradient(const ComplexField& f);
Eigen::ArrayXcd spectral_laplacian(const ComplexField& f);

// Fraction of the mass sitting within 0.1 L of the box boundary.
double edge_mass_fraction(const ComplexField& f);

namespace detail {
// Unnormalized in-place DFT over the n-dimensional N^n array. sign = -1 forward.
void dft(Complex* data, int n, int N, int sign);
// Batch of contiguous 1-D transforms of length len.
void dft_batch(Complex* data, int len, int howmany, int sign);
}  // namespace detail

// binary container and CSV slices
void write_field(std::ostream& os, const ComplexField& f);
void write_field(const std::string& path, const ComplexField& f);
ComplexField read_field(std::istream& is);
ComplexField read_field(const std::string& path);
// Line through the box centre along the first axis.
void write_slice_csv(const std::string& path, const ComplexField& f);

}  // namespace nls
