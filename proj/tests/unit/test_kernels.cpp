#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "proxmc/kernels.hpp"

using namespace proxmc::kernels;

namespace {

std::vector<double> randn(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// Sizes straddling the 4-wide vector body and its tail.
constexpr std::size_t kSizes[] = {0, 1, 3, 4, 5, 7, 8, 9, 16, 33, 35, 70, 257};

}  // namespace

TEST_CASE("scalar and avx2 kernels agree") {
  if (!available(Isa::Avx2)) {
    MESSAGE("AVX2 not available on this CPU; equivalence not exercised");
    return;
  }
  const Table& s = table(Isa::Scalar);
  const Table& v = table(Isa::Avx2);
  std::mt19937_64 rng(11);

  for (std::size_t n : kSizes) {
    CAPTURE(n);
    auto a = randn(n, rng), b = randn(n, rng);
    const double scale = 1e-14 * (1.0 + n);

    SUBCASE("dot and norm") {
      double ref = 0.0;
      for (std::size_t i = 0; i < n; ++i) ref += std::abs(a[i] * b[i]);
      CHECK(std::abs(s.dot(a.data(), b.data(), n) - v.dot(a.data(), b.data(), n)) <= scale * (ref + 1.0));
      const double sq = s.sq_norm(a.data(), n);
      CHECK(std::abs(sq - v.sq_norm(a.data(), n)) <= scale * (sq + 1.0));
    }

    SUBCASE("elementwise kernels are bit-identical") {
      std::vector<double> y1 = b, y2 = b;
      s.axpy(0.37, a.data(), y1.data(), n);
      v.axpy(0.37, a.data(), y2.data(), n);
      CHECK(y1 == y2);

      std::vector<double> o1(n), o2(n);
      s.soft_threshold(a.data(), 0.5, o1.data(), n);
      v.soft_threshold(a.data(), 0.5, o2.data(), n);
      CHECK(o1 == o2);

      s.intensity(a.data(), b.data(), y1.data(), o1.data(), n);
      v.intensity(a.data(), b.data(), y1.data(), o2.data(), n);
      CHECK(o1 == o2);

      std::vector<double> z(n), i(n);
      for (std::size_t k = 0; k < n; ++k) {
        z[k] = k % 5 == 0 ? 0.0 : std::floor(std::abs(a[k]) * 100.0);
        i[k] = 1.0 + std::abs(b[k]) * 50.0;
      }
      s.kl_slope(z.data(), i.data(), o1.data(), n);
      v.kl_slope(z.data(), i.data(), o2.data(), n);
      CHECK(o1 == o2);
    }

    SUBCASE("gemv") {
      for (std::size_t rows : {std::size_t{1}, std::size_t{2}, n}) {
        auto m = randn(rows * n, rng);
        std::vector<double> y1(rows), y2(rows);
        s.gemv(m.data(), rows, n, a.data(), y1.data());
        v.gemv(m.data(), rows, n, a.data(), y2.data());
        for (std::size_t r = 0; r < rows; ++r) {
          double ref = 0.0;
          for (std::size_t c = 0; c < n; ++c) ref += std::abs(m[r * n + c] * a[c]);
          CHECK(std::abs(y1[r] - y2[r]) <= scale * (ref + 1.0));
        }
      }
    }
  }
}

TEST_CASE("soft threshold ties map to zero on both paths") {
  const std::vector<double> x{0.5, -0.5, 0.5000001, -0.75, 0.0, 2.0, -2.0, 0.25};
  for (Isa isa : {Isa::Scalar, Isa::Avx2}) {
    if (!available(isa)) continue;
    std::vector<double> out(x.size());
    table(isa).soft_threshold(x.data(), 0.5, out.data(), x.size());
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
    CHECK(out[3] == doctest::Approx(-0.25));
    CHECK(out[5] == 1.5);
    CHECK(out[6] == -1.5);
    CHECK(out[7] == 0.0);
  }
}

TEST_CASE("kl slope is 1 where the count is zero") {
  const std::vector<double> z{0.0, 4.0, 0.0, 10.0, 3.0};
  const std::vector<double> i{0.0, 2.0, 5.0, 10.0, 6.0};
  std::vector<double> out(z.size());
  for (Isa isa : {Isa::Scalar, Isa::Avx2}) {
    if (!available(isa)) continue;
    table(isa).kl_slope(z.data(), i.data(), out.data(), z.size());
    CHECK(out == std::vector<double>{1.0, -1.0, 1.0, 0.0, 0.5});
  }
}

TEST_CASE("dispatch can be pinned to the scalar path") {
  const Isa before = active_isa();
  force(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  CHECK(name(active_isa()) == "scalar");
  force(before);
  CHECK(active_isa() == before);
}
