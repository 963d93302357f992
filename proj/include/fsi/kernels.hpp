// SPDX-License-Identifier: Apache-2.0
//
// Dense vector kernels used by the Krylov and smoother inner loops.
//
// Each kernel exists as a portable scalar reference implementation and,
// where the hardware supports it, as a SIMD variant (AVX2 on x86-64, NEON
// on aarch64). The active lane is resolved once at startup from the CPU
// and may be overridden with the FSISOLVE_SIMD environment variable
// ("scalar", "avx2", "neon", "auto") or programmatically via set_lane().
//
// Elementwise kernels (axpy, scal, axpby) are bit-identical across lanes:
// both lanes use unfused multiply+add and the build disables FP
// contraction. Reductions (dot, norm2) accumulate in a fixed lane order,
// so they are deterministic per lane but may differ from the scalar sum
// by rounding; the equivalence tests bound that difference.

#pragma once

#include <cstddef>
#include <string>

namespace fsi::kernels {

enum class Lane { Scalar, Avx2, Neon };

// Lane chosen for this process (env override applied on first query).
Lane active_lane();

// Force a lane; throws std::runtime_error if unsupported on this CPU.
void set_lane(Lane lane);

bool lane_supported(Lane lane);
const char* lane_name(Lane lane);

// y += a*x
void axpy(std::size_t n, double a, const double* x, double* y);
// x *= a
void scal(std::size_t n, double a, double* x);
// y = a*x + b*y
void axpby(std::size_t n, double a, const double* x, double b, double* y);
double dot(std::size_t n, const double* x, const double* y);
double norm2(std::size_t n, const double* x);

// Scalar reference implementations, always available. The dispatched
// kernels above are tested against these.
namespace scalar {
void axpy(std::size_t n, double a, const double* x, double* y);
void scal(std::size_t n, double a, double* x);
void axpby(std::size_t n, double a, const double* x, double b, double* y);
double dot(std::size_t n, const double* x, const double* y);
double norm2(std::size_t n, const double* x);
}  // namespace scalar

}  // namespace fsi::kernels
