#pragma once

#include <cstddef>

// Data-parallel inner loops of the PDE integrator, provided as a scalar
// reference implementation and an AVX2+FMA variant selected at runtime.
// Selection: env TURING_ONE_SIMD = scalar | avx2 | auto (default auto).
// The AVX2 path uses fused multiply-add, so results may differ from the
// scalar path in the last bits; equivalence is tested to 1e-13 relative.

namespace turing1::kernels {

struct GSRates {
  double gamma, k_rate, eta1, eta2;
};

struct KernelTable {
  const char* name;
  // dst[i] += a * src[i]
  void (*scaled_add)(double* dst, const double* src, double a, std::size_t n);
  // dst[i] = y[i] + a * k[i]   (Runge-Kutta stage seed)
  void (*copy_scaled_add)(double* dst, const double* y, const double* k, double a,
                          std::size_t n);
  // elementwise extended Gray-Scott reaction terms
  void (*gs_reaction)(const double* x, const double* y, const double* z, double* dx,
                      double* dy, double* dz, std::size_t n, const GSRates& r);
  // dst[i] += c * (u[i-1] - 2 u[i] + u[i+1]) with reflecting (Neumann ghost)
  // closure at both ends: lap_0 = 2(u_1 - u_0), lap_{n-1} = 2(u_{n-2} - u_{n-1})
  void (*laplacian_neumann_add)(double* dst, const double* u, double c, std::size_t n);
  // sqrt(mean( (err_i / (atol + rtol * max(|y0_i|, |y1_i|)))^2 ))
  double (*wrms)(const double* err, const double* y0, const double* y1, double atol,
                 double rtol, std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when the binary lacks the AVX2 translation unit or the CPU lacks
// AVX2/FMA support.
const KernelTable* avx2_kernels();
// Cached selection honoring TURING_ONE_SIMD; falls back to scalar (with a
// stderr note) when avx2 is requested but unavailable.
const KernelTable& active_kernels();

}  // namespace turing1::kernels
