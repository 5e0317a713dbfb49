#include <atomic>
#include <cstdlib>
#include <string_view>

#include "proxmc/kernels.hpp"

namespace proxmc::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(PROXMC_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("PROXMC_SIMD"); env != nullptr && std::string_view(env) == "scalar")
    return Isa::Scalar;
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

const Table& table(Isa isa) {
#if defined(PROXMC_WITH_AVX2)
  if (isa == Isa::Avx2 && cpu_has_avx2()) return avx2::table();
#endif
  (void)isa;
  return scalar::table();
}

const Table& active() { return table(current().load(std::memory_order_relaxed)); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

std::string_view name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void force(Isa isa) { current().store(available(isa) ? isa : Isa::Scalar); }

}  // namespace proxmc::kernels
