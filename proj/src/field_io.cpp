#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

namespace nls {

static_assert(std::endian::native == std::endian::little, "field container assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'N', 'L', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw UsageError("truncated field container");
  return v;
}

}  // namespace

void write_field(std::ostream& os, const ComplexField& f) {
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.n()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.points()));
  put<double>(os, f.grid.half_length());
  put<double>(os, f.time);
  put<std::uint8_t>(os, f.space == Space::position ? 0 : 1);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    put<float>(os, static_cast<float>(f.values[i].real()));
    put<float>(os, static_cast<float>(f.values[i].imag()));
  }
}

void write_field(const std::string& path, const ComplexField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open " + path + " for writing");
  write_field(os, f);
}

ComplexField read_field(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw UsageError("not a field container");
  if (get<std::uint32_t>(is) != kVersion) throw UsageError("unsupported field container version");
  const int n = static_cast<int>(get<std::uint32_t>(is));
  const int N = static_cast<int>(get<std::uint32_t>(is));
  const double L = get<double>(is);
  const double t = get<double>(is);
  const Space s = get<std::uint8_t>(is) == 0 ? Space::position : Space::frequency;
  ComplexField f(GridSpec(n, N, L), s, t);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    const float re = get<float>(is);
    const float im = get<float>(is);
    f.values[i] = Complex(re, im);
  }
  return f;
}

ComplexField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot open " + path);
  return read_field(is);
}

void write_slice_csv(const std::string& path, const ComplexField& f) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot open " + path + " for writing");
  const GridSpec& g = f.grid;
  const Eigen::Index N = g.points();
  Eigen::Index offset = 0, stride = 1;
  for (int d = g.n() - 1; d >= 1; --d) {
    offset += (N / 2) * stride;
    stride *= N;
  }
  const Eigen::ArrayXd ax = g.axis(f.space);
  os << (f.space == Space::position ? "x" : "xi") << ",re,im,abs\n" << std::setprecision(12);
  for (Eigen::Index j = 0; j < N; ++j) {
    const Complex v = f.values[offset + j * stride];
    os << ax[j] << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
  }
}

}  // namespace nls
