#include "nlslab/grid.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace nls::detail {

namespace {

// Plans are made once per shape/alignment and kept for the process lifetime.
// FFTW_ESTIMATE keeps plan choice (and thus rounding) deterministic.
struct PlanKey {
  int rank;
  int len;
  int howmany;
  int sign;
  int align;
  auto operator<=>(const PlanKey&) const = default;
};

std::mutex planner_mutex;
std::map<PlanKey, fftw_plan>& plans() {
  static std::map<PlanKey, fftw_plan> table;
  return table;
}

fftw_plan plan_for(const PlanKey& key, Complex* data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  std::lock_guard<std::mutex> lock(planner_mutex);
  auto it = plans().find(key);
  if (it != plans().end()) return it->second;
  fftw_plan p;
  if (key.howmany == 0) {
    int dims[3] = {key.len, key.len, key.len};
    p = fftw_plan_dft(key.rank, dims, buf, buf, key.sign, FFTW_ESTIMATE);
  } else {
    int dims[1] = {key.len};
    p = fftw_plan_many_dft(1, dims, key.howmany, buf, nullptr, 1, key.len, buf, nullptr, 1,
                           key.len, key.sign, FFTW_ESTIMATE);
  }
  plans().emplace(key, p);
  return p;
}

}  // namespace

void dft(Complex* data, int n, int N, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  PlanKey key{n, N, 0, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, fftw_alignment_of(reinterpret_cast<double*>(data))};
  fftw_execute_dft(plan_for(key, data), buf, buf);
}

void dft_batch(Complex* data, int len, int howmany, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  PlanKey key{1, len, howmany, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, fftw_alignment_of(reinterpret_cast<double*>(data))};
  fftw_execute_dft(plan_for(key, data), buf, buf);
}

}  // namespace nls::detail
