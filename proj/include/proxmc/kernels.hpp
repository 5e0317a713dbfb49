#pragma once

// Data-parallel inner loops used on the sampling hot path. Every kernel has a
// scalar reference implementation; an AVX2/FMA variant is selected at runtime
// when the CPU supports it. Results agree with the scalar path up to
// floating-point reassociation (see tests/unit/test_kernels.cpp).

#include <cstddef>
#include <span>
#include <string_view>

namespace proxmc::kernels {

enum class Isa { Scalar, Avx2 };

struct Table {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sq_norm)(const double* a, std::size_t n);
  // y = M x with M row-major rows x cols.
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*soft_threshold)(const double* x, double tau, double* out, std::size_t n);
  // out = r * w + o
  void (*intensity)(const double* r, const double* w, const double* o, double* out, std::size_t n);
  // out_t = 1 - z_t / i_t, or 1 where z_t == 0.
  void (*kl_slope)(const double* z, const double* i, double* out, std::size_t n);
};

const Table& table(Isa isa);
bool available(Isa isa);

/// Kernel table in use. Chosen once from CPU features; PROXMC_SIMD=scalar in
/// the environment pins the scalar path.
const Table& active();
Isa active_isa();
std::string_view name(Isa isa);

/// Test hook. Not thread-safe with concurrent kernel use.
void force(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sq_norm(std::span<const double> a) { return active().sq_norm(a.data(), a.size()); }
inline void gemv(std::span<const double> m, std::size_t rows, std::size_t cols,
                 std::span<const double> x, std::span<double> y) {
  active().gemv(m.data(), rows, cols, x.data(), y.data());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline void soft_threshold(std::span<const double> x, double tau, std::span<double> out) {
  active().soft_threshold(x.data(), tau, out.data(), x.size());
}
inline void intensity(std::span<const double> r, std::span<const double> w,
                      std::span<const double> o, std::span<double> out) {
  active().intensity(r.data(), w.data(), o.data(), out.data(), r.size());
}
inline void kl_slope(std::span<const double> z, std::span<const double> i, std::span<double> out) {
  active().kl_slope(z.data(), i.data(), out.data(), z.size());
}

namespace scalar {
const Table& table();
}
namespace avx2 {
const Table& table();
}

}  // namespace proxmc::kernels
