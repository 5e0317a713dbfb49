#include "proxmc/prox.hpp"

#include <algorithm>
#include <cmath>

#include "proxmc/kernels.hpp"
#include "proxmc/linops.hpp"

namespace proxmc {

void soft_threshold(std::span<const double> x, double tau, std::span<double> out) {
  kernels::soft_threshold(x, tau, out);
}

std::vector<double> soft_threshold(std::span<const double> x, double tau) {
  std::vector<double> out(x.size());
  soft_threshold(x, tau, out);
  return out;
}

void prox_l1_partial(std::span<const double> x, double tau, std::size_t keep, std::span<double> out) {
  keep = std::min(keep, x.size());
  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(keep), out.begin());
  kernels::soft_threshold(x.subspan(keep), tau, out.subspan(keep));
}

std::vector<double> prox_l1_partial(std::span<const double> x, double tau, std::size_t keep) {
  std::vector<double> out(x.size());
  prox_l1_partial(x, tau, keep, out);
  return out;
}

void prox_l1_semiorthogonal(std::span<const double> x, const DecimatedDiffOp& a, double tau,
                            std::span<double> out, std::span<double> scratch) {
  const std::size_t c = a.rows();
  auto ax = scratch.first(c);
  a.apply(x, ax);
  // ax <- A x - soft(A x); only coordinates inside the dead zone survive
  // with their full value, the rest are clipped to +-tau.
  for (std::size_t m = 0; m < c; ++m) {
    const double v = ax[m];
    const double mag = std::fabs(v) - tau;
    const double shrunk = mag > 0.0 ? std::copysign(mag, v) : 0.0;
    ax[m] = v - shrunk;
  }
  // out = x - A^T ax; rows of A have disjoint supports.
  std::copy(x.begin(), x.end(), out.begin());
  const auto rows = a.row_indices();
  for (std::size_t m = 0; m < c; ++m) {
    const std::size_t k = rows[m];
    const double v = ax[m] / kSqrt6;
    out[k] -= v;
    out[k + 1] += 2.0 * v;
    out[k + 2] -= v;
  }
}

std::vector<double> prox_l1_semiorthogonal(std::span<const double> x, const DecimatedDiffOp& a,
                                           double tau) {
  std::vector<double> out(x.size()), scratch(a.rows());
  prox_l1_semiorthogonal(x, a, tau, out, scratch);
  return out;
}

double prox_poisson_kl(double x, double z, double gamma) {
  if (z <= 0.0) return std::max(x - gamma, 0.0);
  const double half = 0.5 * (x - gamma);
  const double root = std::sqrt(half * half + gamma * z);
  // Positive root of p^2 + (gamma - x) p - gamma z = 0 without cancellation
  // when x << gamma.
  return half >= 0.0 ? half + root : gamma * z / (root - half);
}

}  // namespace proxmc
