#pragma once

#include "nlslab/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nls {

enum class LongRangeForm { inverse_bracket, inverse_power };

struct ShortRange {
  double amplitude = 0.0;
  double rho = 2.0;
};

struct LongRange {
  double amplitude = 0.0;
  double rho = 1.0;
  LongRangeForm form = LongRangeForm::inverse_bracket;
};

// V = V^S + V^L with Z<x>^{-rho} pieces; the |x|^{-rho} form is smoothed to
// Z(delta^2 + |x|^2)^{-rho/2}.
struct PotentialSpec {
  int n = 1;
  std::optional<ShortRange> short_range;
  std::optional<LongRange> long_range;
  double c0 = 1.0;
  double T1 = 1.0;
  double regularization = 0.0;

  bool has_long_range() const { return long_range && long_range->amplitude != 0.0; }
  bool has_short_range() const { return short_range && short_range->amplitude != 0.0; }
  double rho_L() const;  // +inf without a long-range part
  double rho_S() const;  // +inf without a short-range part
};

// Throws ConfigError for specs that cannot be evaluated at all.
void validate(const PotentialSpec& spec);
// Exponent windows of the scattering theory; empty when all hold.
std::vector<std::string> hypothesis_warnings(const PotentialSpec& spec);

// Radial smoothstep: 1 on |x| <= c0/4, 0 on |x| >= c0/2.
class CutoffChi {
 public:
  explicit CutoffChi(double c0 = 1.0);

  struct Radial {
    double value, d1, d2;
  };

  double c0() const { return c0_; }
  Radial radial(double r) const;
  double operator()(const Point& x) const;
  Point gradient(const Point& x) const;
  SmallMatrix hessian(const Point& x) const;
  double laplacian(const Point& x) const;

 private:
  double c0_;
};

// e^{-1/s} mollifier step: 0 for u <= 0, 1 for u >= 1, with two derivatives.
CutoffChi::Radial smoothstep(double u);

double eval_V(const PotentialSpec& spec, const Point& x);
double eval_VS(const PotentialSpec& spec, const Point& x);
double eval_VL(const PotentialSpec& spec, const Point& x);
Point grad_VL(const PotentialSpec& spec, const Point& x);
SmallMatrix hess_VL(const PotentialSpec& spec, const Point& x);
double laplacian_VL(const PotentialSpec& spec, const Point& x);

// Long-range part as a function of the radius: value, d/dr, d2/dr2.
CutoffChi::Radial radial_VL(const PotentialSpec& spec, double r);

// V_{T1}(t,x) = V^L(x) (1 - chi(2x/(t+T1)))
double eval_VT1(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x);
Point grad_VT1(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x);
SmallMatrix hess_VT1(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x);
double laplacian_VT1(const PotentialSpec& spec, const CutoffChi& chi, double t, const Point& x);

// Grid tables.
Eigen::ArrayXd sample_V(const PotentialSpec& spec, const GridSpec& g);
Eigen::ArrayXd sample_VS(const PotentialSpec& spec, const GridSpec& g);
Eigen::ArrayXd sample_VL(const PotentialSpec& spec, const GridSpec& g);

// x -> chi(x/t) on the grid, with gradient and Laplacian of that composite map.
struct ChiTable {
  Eigen::ArrayXd value;
  std::vector<Eigen::ArrayXd> grad;
  Eigen::ArrayXd laplacian;
};
ChiTable sample_chi(const CutoffChi& chi, const GridSpec& g, double t);

}  // namespace nls
