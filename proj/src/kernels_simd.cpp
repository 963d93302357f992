// SPDX-License-Identifier: Apache-2.0
//
// SIMD kernel lanes. Elementwise kernels use unfused multiply+add so the
// results match the scalar lane bit for bit. Reductions keep four partial
// sums in fixed lane positions and fold them in a fixed order, then append
// the tail sequentially.

#include <cmath>
#include <cstddef>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace fsi::kernels::avx2 {

__attribute__((target("avx2"))) void axpy(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(_mm256_mul_pd(va, vx), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = a * x[i] + y[i];
}

__attribute__((target("avx2"))) void scal(std::size_t n, double a, double* x) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] = a * x[i];
}

__attribute__((target("avx2"))) void axpby(std::size_t n, double a, const double* x, double b,
                                           double* y) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(vx, vy));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

__attribute__((target("avx2"))) double dot(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

__attribute__((target("avx2"))) double norm2(std::size_t n, const double* x) {
  return std::sqrt(dot(n, x, x));
}

}  // namespace fsi::kernels::avx2

#endif  // x86-64

#if defined(__aarch64__)
#include <arm_neon.h>

namespace fsi::kernels::neon {

void axpy(std::size_t n, double a, const double* x, double* y) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vaddq_f64(vmulq_f64(va, vld1q_f64(x + i)), vy);
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] = a * x[i] + y[i];
}

void scal(std::size_t n, double a, double* x) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] = a * x[i];
}

void axpby(std::size_t n, double a, const double* x, double b, double* y) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vx = vmulq_f64(va, vld1q_f64(x + i));
    float64x2_t vy = vmulq_f64(vb, vld1q_f64(y + i));
    vst1q_f64(y + i, vaddq_f64(vx, vy));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  }
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::size_t n, const double* x) { return std::sqrt(dot(n, x, x)); }

}  // namespace fsi::kernels::neon

#endif  // aarch64
