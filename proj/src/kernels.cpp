// SPDX-License-Identifier: Apache-2.0

#include "fsi/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>

namespace fsi::kernels {

namespace scalar {

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + y[i];
}

void scal(std::size_t n, double a, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] = a * x[i];
}

void axpby(std::size_t n, double a, const double* x, double b, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::size_t n, const double* x) {
  return std::sqrt(dot(n, x, x));
}

}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define FSI_HAVE_AVX2_LANE 1
namespace avx2 {
void axpy(std::size_t n, double a, const double* x, double* y);
void scal(std::size_t n, double a, double* x);
void axpby(std::size_t n, double a, const double* x, double b, double* y);
double dot(std::size_t n, const double* x, const double* y);
double norm2(std::size_t n, const double* x);
}  // namespace avx2
#else
#define FSI_HAVE_AVX2_LANE 0
#endif

#if defined(__aarch64__)
#define FSI_HAVE_NEON_LANE 1
namespace neon {
void axpy(std::size_t n, double a, const double* x, double* y);
void scal(std::size_t n, double a, double* x);
void axpby(std::size_t n, double a, const double* x, double b, double* y);
double dot(std::size_t n, const double* x, const double* y);
double norm2(std::size_t n, const double* x);
}  // namespace neon
#else
#define FSI_HAVE_NEON_LANE 0
#endif

namespace {

struct Dispatch {
  void (*axpy)(std::size_t, double, const double*, double*) = scalar::axpy;
  void (*scal)(std::size_t, double, double*) = scalar::scal;
  void (*axpby)(std::size_t, double, const double*, double, double*) = scalar::axpby;
  double (*dot)(std::size_t, const double*, const double*) = scalar::dot;
  double (*norm2)(std::size_t, const double*) = scalar::norm2;
  Lane lane = Lane::Scalar;
};

Dispatch g_dispatch;
std::once_flag g_init_flag;

Lane best_lane() {
#if FSI_HAVE_AVX2_LANE
  if (__builtin_cpu_supports("avx2")) return Lane::Avx2;
#endif
#if FSI_HAVE_NEON_LANE
  return Lane::Neon;
#endif
  return Lane::Scalar;
}

void install(Lane lane) {
  Dispatch d;
  d.lane = lane;
  switch (lane) {
    case Lane::Scalar:
      break;
#if FSI_HAVE_AVX2_LANE
    case Lane::Avx2:
      d.axpy = avx2::axpy;
      d.scal = avx2::scal;
      d.axpby = avx2::axpby;
      d.dot = avx2::dot;
      d.norm2 = avx2::norm2;
      break;
#endif
#if FSI_HAVE_NEON_LANE
    case Lane::Neon:
      d.axpy = neon::axpy;
      d.scal = neon::scal;
      d.axpby = neon::axpby;
      d.dot = neon::dot;
      d.norm2 = neon::norm2;
      break;
#endif
    default:
      throw std::runtime_error("kernel lane not supported on this CPU");
  }
  g_dispatch = d;
}

void init_from_env() {
  Lane lane = best_lane();
  if (const char* env = std::getenv("FSISOLVE_SIMD")) {
    std::string v(env);
    if (v == "scalar") lane = Lane::Scalar;
    else if (v == "avx2") lane = lane_supported(Lane::Avx2) ? Lane::Avx2 : lane;
    else if (v == "neon") lane = lane_supported(Lane::Neon) ? Lane::Neon : lane;
    // anything else, including "auto": keep the detected lane
  }
  install(lane);
}

void ensure_init() { std::call_once(g_init_flag, init_from_env); }

}  // namespace

bool lane_supported(Lane lane) {
  switch (lane) {
    case Lane::Scalar:
      return true;
    case Lane::Avx2:
#if FSI_HAVE_AVX2_LANE
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Lane::Neon:
      return FSI_HAVE_NEON_LANE != 0;
  }
  return false;
}

const char* lane_name(Lane lane) {
  switch (lane) {
    case Lane::Scalar: return "scalar";
    case Lane::Avx2: return "avx2";
    case Lane::Neon: return "neon";
  }
  return "?";
}

Lane active_lane() {
  ensure_init();
  return g_dispatch.lane;
}

void set_lane(Lane lane) {
  ensure_init();
  if (!lane_supported(lane)) throw std::runtime_error("kernel lane not supported on this CPU");
  install(lane);
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  ensure_init();
  g_dispatch.axpy(n, a, x, y);
}

void scal(std::size_t n, double a, double* x) {
  ensure_init();
  g_dispatch.scal(n, a, x);
}

void axpby(std::size_t n, double a, const double* x, double b, double* y) {
  ensure_init();
  g_dispatch.axpby(n, a, x, b, y);
}

double dot(std::size_t n, const double* x, const double* y) {
  ensure_init();
  return g_dispatch.dot(n, x, y);
}

double norm2(std::size_t n, const double* x) {
  ensure_init();
  return g_dispatch.norm2(n, x);
}

}  // namespace fsi::kernels
