// AArch64 only; Advanced SIMD is mandatory there so no runtime probe is needed.
#include <arm_neon.h>

#include "cebp/kernels.hpp"

namespace cebp::kernels::neon {
namespace {

MinMax minmax_impl(const double* x, std::size_t n) {
  std::size_t i = 0;
  double lo = x[0];
  double hi = x[0];
  if (n >= 4) {
    float64x2_t vlo0 = vld1q_f64(x);
    float64x2_t vhi0 = vlo0;
    float64x2_t vlo1 = vld1q_f64(x + 2);
    float64x2_t vhi1 = vlo1;
    for (i = 4; i + 4 <= n; i += 4) {
      const float64x2_t a = vld1q_f64(x + i);
      const float64x2_t b = vld1q_f64(x + i + 2);
      vlo0 = vminq_f64(vlo0, a);
      vhi0 = vmaxq_f64(vhi0, a);
      vlo1 = vminq_f64(vlo1, b);
      vhi1 = vmaxq_f64(vhi1, b);
    }
    lo = vminvq_f64(vminq_f64(vlo0, vlo1));
    hi = vmaxvq_f64(vmaxq_f64(vhi0, vhi1));
  }
  for (; i < n; ++i) {
    lo = x[i] < lo ? x[i] : lo;
    hi = x[i] > hi ? x[i] : hi;
  }
  if (lo == 0.0) lo = 0.0;
  if (hi == 0.0) hi = 0.0;
  return {lo, hi};
}

std::size_t count_less_impl(const double* x, std::size_t n, double threshold) {
  const float64x2_t t = vdupq_n_f64(threshold);
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // Lanes are all-ones on match; shift down to 0/1 before accumulating.
    acc = vaddq_u64(acc, vshrq_n_u64(vcltq_f64(vld1q_f64(x + i), t), 63));
  }
  std::size_t c = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) c += x[i] < threshold;
  return c;
}

std::size_t count_greater_impl(const double* x, std::size_t n, double threshold) {
  const float64x2_t t = vdupq_n_f64(threshold);
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vaddq_u64(acc, vshrq_n_u64(vcgtq_f64(vld1q_f64(x + i), t), 63));
  }
  std::size_t c = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) c += x[i] > threshold;
  return c;
}

void scale_impl(double* x, std::size_t n, double factor) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_n_f64(vld1q_f64(x + i), factor));
  for (; i < n; ++i) x[i] *= factor;
}

}  // namespace

const Table kTable{minmax_impl, count_less_impl, count_greater_impl, scale_impl};

}  // namespace cebp::kernels::neon
