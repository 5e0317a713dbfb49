#include <immintrin.h>

#include <cmath>

#include "proxmc/kernels.hpp"

namespace proxmc::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  if (k + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    k += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

double sq_norm(const double* a, std::size_t n) { return dot(a, a, n); }

void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
  std::size_t r = 0;
  // Four rows at a time share the loads of x.
  for (; r + 4 <= rows; r += 4) {
    const double* m0 = m + r * cols;
    const double* m1 = m0 + cols;
    const double* m2 = m1 + cols;
    const double* m3 = m2 + cols;
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= cols; k += 4) {
      const __m256d xv = _mm256_loadu_pd(x + k);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(m0 + k), xv, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(m1 + k), xv, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(m2 + k), xv, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(m3 + k), xv, a3);
    }
    double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
    for (; k < cols; ++k) {
      s0 += m0[k] * x[k];
      s1 += m1[k] * x[k];
      s2 += m2[k] * x[k];
      s3 += m3[k] * x[k];
    }
    y[r] = s0;
    y[r + 1] = s1;
    y[r + 2] = s2;
    y[r + 3] = s3;
  }
  for (; r < rows; ++r) y[r] = dot(m + r * cols, x, cols);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + k));
    _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_loadu_pd(y + k), prod));
  }
  for (; k < n; ++k) y[k] += a * x[k];
}

void soft_threshold(const double* x, double tau, double* out, std::size_t n) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d tv = _mm256_set1_pd(tau);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d v = _mm256_loadu_pd(x + k);
    const __m256d mag = _mm256_sub_pd(_mm256_andnot_pd(sign_bit, v), tv);
    const __m256d keep = _mm256_cmp_pd(mag, zero, _CMP_GT_OQ);
    const __m256d signed_mag = _mm256_or_pd(mag, _mm256_and_pd(sign_bit, v));
    _mm256_storeu_pd(out + k, _mm256_and_pd(keep, signed_mag));
  }
  for (; k < n; ++k) {
    const double mag = std::fabs(x[k]) - tau;
    out[k] = mag > 0.0 ? std::copysign(mag, x[k]) : 0.0;
  }
}

void intensity(const double* r, const double* w, const double* o, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(r + k), _mm256_loadu_pd(w + k));
    _mm256_storeu_pd(out + k, _mm256_add_pd(prod, _mm256_loadu_pd(o + k)));
  }
  for (; k < n; ++k) out[k] = r[k] * w[k] + o[k];
}

void kl_slope(const double* z, const double* i, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d zv = _mm256_loadu_pd(z + k);
    const __m256d slope = _mm256_sub_pd(one, _mm256_div_pd(zv, _mm256_loadu_pd(i + k)));
    const __m256d positive = _mm256_cmp_pd(zv, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + k, _mm256_blendv_pd(one, slope, positive));
  }
  for (; k < n; ++k) out[k] = z[k] > 0.0 ? 1.0 - z[k] / i[k] : 1.0;
}

}  // namespace

const Table& table() {
  static const Table t{dot, sq_norm, gemv, axpy, soft_threshold, intensity, kl_slope};
  return t;
}

}  // namespace proxmc::kernels::avx2
