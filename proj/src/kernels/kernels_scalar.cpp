#include "cebp/kernels.hpp"

namespace cebp::kernels::scalar {
namespace {

MinMax minmax_impl(const double* x, std::size_t n) {
  double lo = x[0];
  double hi = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    lo = x[i] < lo ? x[i] : lo;
    hi = x[i] > hi ? x[i] : hi;
  }
  // -0.0 and +0.0 compare equal; pick one so every variant agrees bitwise.
  if (lo == 0.0) lo = 0.0;
  if (hi == 0.0) hi = 0.0;
  return {lo, hi};
}

std::size_t count_less_impl(const double* x, std::size_t n, double threshold) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += x[i] < threshold;
  return c;
}

std::size_t count_greater_impl(const double* x, std::size_t n, double threshold) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += x[i] > threshold;
  return c;
}

void scale_impl(double* x, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= factor;
}

}  // namespace

const Table kTable{minmax_impl, count_less_impl, count_greater_impl, scale_impl};

}  // namespace cebp::kernels::scalar
