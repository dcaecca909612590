#include "turing1/kernels.hpp"

#include <cmath>

namespace turing1::kernels {

namespace {

void scaled_add_s(double* dst, const double* src, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a * src[i];
}

void copy_scaled_add_s(double* dst, const double* y, const double* k, double a,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = y[i] + a * k[i];
}

void gs_reaction_s(const double* x, const double* y, const double* z, double* dx,
                   double* dy, double* dz, std::size_t n, const GSRates& r) {
  for (std::size_t i = 0; i < n; ++i) {
    const double y2 = y[i] * y[i];
    const double flux = x[i] * y2 - r.eta1 * y2 * y[i];
    const double inter = r.k_rate * (y[i] - r.eta2 * z[i]);
    dx[i] = -flux + r.gamma * (1.0 - x[i]);
    dy[i] = flux - inter - r.gamma * y[i];
    dz[i] = inter - r.gamma * z[i];
  }
}

void laplacian_neumann_add_s(double* dst, const double* u, double c, std::size_t n) {
  if (n < 2) return;
  dst[0] += c * 2.0 * (u[1] - u[0]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    dst[i] += c * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
  dst[n - 1] += c * 2.0 * (u[n - 2] - u[n - 1]);
}

double wrms_s(const double* err, const double* y0, const double* y1, double atol,
              double rtol, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = atol + rtol * std::fmax(std::fabs(y0[i]), std::fabs(y1[i]));
    const double q = err[i] / w;
    acc += q * q;
  }
  return std::sqrt(acc / double(n));
}

const KernelTable table = {
    "scalar",          scaled_add_s, copy_scaled_add_s,
    gs_reaction_s,     laplacian_neumann_add_s,
    wrms_s,
};

}  // namespace

const KernelTable& scalar_kernels() { return table; }

}  // namespace turing1::kernels
