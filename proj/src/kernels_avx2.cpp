// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; callers must check CPU support first (kernels_dispatch.cpp
// does). Each loop processes 4 doubles per iteration with a scalar tail.

#include "turing1/kernels.hpp"

#if defined(TURING1_BUILD_AVX2)

#include <cmath>
#include <immintrin.h>

namespace turing1::kernels {

namespace {

void scaled_add_v(double* dst, const double* src, double a, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_loadu_pd(dst + i);
    d = _mm256_fmadd_pd(va, _mm256_loadu_pd(src + i), d);
    _mm256_storeu_pd(dst + i, d);
  }
  for (; i < n; ++i) dst[i] += a * src[i];
}

void copy_scaled_add_v(double* dst, const double* y, const double* k, double a,
                       std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(k + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(dst + i, r);
  }
  for (; i < n; ++i) dst[i] = y[i] + a * k[i];
}

void gs_reaction_v(const double* x, const double* y, const double* z, double* dx,
                   double* dy, double* dz, std::size_t n, const GSRates& r) {
  const __m256d vgamma = _mm256_set1_pd(r.gamma);
  const __m256d vk = _mm256_set1_pd(r.k_rate);
  const __m256d veta1 = _mm256_set1_pd(r.eta1);
  const __m256d veta2 = _mm256_set1_pd(r.eta2);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    const __m256d zi = _mm256_loadu_pd(z + i);
    const __m256d y2 = _mm256_mul_pd(yi, yi);
    // flux = x*y^2 - eta1*y^3
    const __m256d flux =
        _mm256_fmsub_pd(xi, y2, _mm256_mul_pd(veta1, _mm256_mul_pd(y2, yi)));
    // inter = k*(y - eta2*z)
    const __m256d inter = _mm256_mul_pd(vk, _mm256_fnmadd_pd(veta2, zi, yi));
    const __m256d dxv =
        _mm256_fmadd_pd(vgamma, _mm256_sub_pd(one, xi), _mm256_sub_pd(_mm256_setzero_pd(), flux));
    const __m256d dyv =
        _mm256_fnmadd_pd(vgamma, yi, _mm256_sub_pd(flux, inter));
    const __m256d dzv = _mm256_fnmadd_pd(vgamma, zi, inter);
    _mm256_storeu_pd(dx + i, dxv);
    _mm256_storeu_pd(dy + i, dyv);
    _mm256_storeu_pd(dz + i, dzv);
  }
  for (; i < n; ++i) {
    const double y2 = y[i] * y[i];
    const double flux = x[i] * y2 - r.eta1 * y2 * y[i];
    const double inter = r.k_rate * (y[i] - r.eta2 * z[i]);
    dx[i] = -flux + r.gamma * (1.0 - x[i]);
    dy[i] = flux - inter - r.gamma * y[i];
    dz[i] = inter - r.gamma * z[i];
  }
}

void laplacian_neumann_add_v(double* dst, const double* u, double c, std::size_t n) {
  if (n < 2) return;
  dst[0] += c * 2.0 * (u[1] - u[0]);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d um = _mm256_loadu_pd(u + i - 1);
    const __m256d uc = _mm256_loadu_pd(u + i);
    const __m256d up = _mm256_loadu_pd(u + i + 1);
    const __m256d lap = _mm256_fnmadd_pd(two, uc, _mm256_add_pd(um, up));
    __m256d d = _mm256_loadu_pd(dst + i);
    d = _mm256_fmadd_pd(vc, lap, d);
    _mm256_storeu_pd(dst + i, d);
  }
  for (; i + 1 < n; ++i) dst[i] += c * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
  dst[n - 1] += c * 2.0 * (u[n - 2] - u[n - 1]);
}

double wrms_v(const double* err, const double* y0, const double* y1, double atol,
              double rtol, std::size_t n) {
  const __m256d vatol = _mm256_set1_pd(atol);
  const __m256d vrtol = _mm256_set1_pd(rtol);
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a0 = _mm256_andnot_pd(signmask, _mm256_loadu_pd(y0 + i));
    const __m256d a1 = _mm256_andnot_pd(signmask, _mm256_loadu_pd(y1 + i));
    const __m256d w = _mm256_fmadd_pd(vrtol, _mm256_max_pd(a0, a1), vatol);
    const __m256d q = _mm256_div_pd(_mm256_loadu_pd(err + i), w);
    acc = _mm256_fmadd_pd(q, q, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) {
    const double w = atol + rtol * std::fmax(std::fabs(y0[i]), std::fabs(y1[i]));
    const double q = err[i] / w;
    sum += q * q;
  }
  return std::sqrt(sum / double(n));
}

const KernelTable table = {
    "avx2",          scaled_add_v, copy_scaled_add_v,
    gs_reaction_v,   laplacian_neumann_add_v,
    wrms_v,
};

}  // namespace

// Raw table accessor; kernels_dispatch.cpp adds the CPU capability check.
const KernelTable* avx2_table_unchecked() { return &table; }

}  // namespace turing1::kernels

#endif  // TURING1_BUILD_AVX2
