#include <cmath>

#include "proxmc/kernels.hpp"

namespace proxmc::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

double sq_norm(const double* a, std::size_t n) { return dot(a, a, n); }

void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(m + r * cols, x, cols);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += a * x[k];
}

void soft_threshold(const double* x, double tau, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double mag = std::fabs(x[k]) - tau;
    out[k] = mag > 0.0 ? std::copysign(mag, x[k]) : 0.0;
  }
}

void intensity(const double* r, const double* w, const double* o, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = r[k] * w[k] + o[k];
}

void kl_slope(const double* z, const double* i, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = z[k] > 0.0 ? 1.0 - z[k] / i[k] : 1.0;
}

}  // namespace

const Table& table() {
  static const Table t{dot, sq_norm, gemv, axpy, soft_threshold, intensity, kl_slope};
  return t;
}

}  // namespace proxmc::kernels::scalar
