// Compiled with -mavx2; only reached through the dispatcher after a CPUID check.
#include <immintrin.h>

#include "cebp/kernels.hpp"

namespace cebp::kernels::avx2 {
namespace {

MinMax minmax_impl(const double* x, std::size_t n) {
  std::size_t i = 0;
  double lo = x[0];
  double hi = x[0];
  if (n >= 8) {
    __m256d vlo0 = _mm256_loadu_pd(x);
    __m256d vhi0 = vlo0;
    __m256d vlo1 = _mm256_loadu_pd(x + 4);
    __m256d vhi1 = vlo1;
    for (i = 8; i + 8 <= n; i += 8) {
      const __m256d a = _mm256_loadu_pd(x + i);
      const __m256d b = _mm256_loadu_pd(x + i + 4);
      vlo0 = _mm256_min_pd(vlo0, a);
      vhi0 = _mm256_max_pd(vhi0, a);
      vlo1 = _mm256_min_pd(vlo1, b);
      vhi1 = _mm256_max_pd(vhi1, b);
    }
    alignas(32) double l[4];
    alignas(32) double h[4];
    _mm256_store_pd(l, _mm256_min_pd(vlo0, vlo1));
    _mm256_store_pd(h, _mm256_max_pd(vhi0, vhi1));
    lo = l[0];
    hi = h[0];
    for (int k = 1; k < 4; ++k) {
      lo = l[k] < lo ? l[k] : lo;
      hi = h[k] > hi ? h[k] : hi;
    }
  }
  for (; i < n; ++i) {
    lo = x[i] < lo ? x[i] : lo;
    hi = x[i] > hi ? x[i] : hi;
  }
  if (lo == 0.0) lo = 0.0;
  if (hi == 0.0) hi = 0.0;
  return {lo, hi};
}

template <int Cmp>
std::size_t count_cmp(const double* x, std::size_t n, double threshold) {
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m = _mm256_cmp_pd(_mm256_loadu_pd(x + i), t, Cmp);
    c += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(m)));
  }
  for (; i < n; ++i) {
    if constexpr (Cmp == _CMP_LT_OQ) {
      c += x[i] < threshold;
    } else {
      c += x[i] > threshold;
    }
  }
  return c;
}

std::size_t count_less_impl(const double* x, std::size_t n, double threshold) {
  return count_cmp<_CMP_LT_OQ>(x, n, threshold);
}

std::size_t count_greater_impl(const double* x, std::size_t n, double threshold) {
  return count_cmp<_CMP_GT_OQ>(x, n, threshold);
}

void scale_impl(double* x, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
  for (; i < n; ++i) x[i] *= factor;
}

}  // namespace

const Table kTable{minmax_impl, count_less_impl, count_greater_impl, scale_impl};

}  // namespace cebp::kernels::avx2
