#pragma once

// Closed-form proximity operators, prox_{tau h}(x) = argmin_y tau h(y) + |y - x|^2 / 2.

#include <cstdint>
#include <span>
#include <vector>

namespace proxmc {

class DecimatedDiffOp;

/// Componentwise sign(x) max(|x| - tau, 0). Ties |x| = tau map to 0.
void soft_threshold(std::span<const double> x, double tau, std::span<double> out);
std::vector<double> soft_threshold(std::span<const double> x, double tau);

/// First `keep` components unchanged, the rest soft-thresholded.
void prox_l1_partial(std::span<const double> x, double tau, std::size_t keep, std::span<double> out);
std::vector<double> prox_l1_partial(std::span<const double> x, double tau, std::size_t keep = 2);

/// prox of tau ||A .||_1 for A A^T = I: x - A^T (A x - soft(A x, tau)).
/// `scratch` needs a.rows() entries.
void prox_l1_semiorthogonal(std::span<const double> x, const DecimatedDiffOp& a, double tau,
                            std::span<double> out, std::span<double> scratch);
std::vector<double> prox_l1_semiorthogonal(std::span<const double> x, const DecimatedDiffOp& a,
                                           double tau);

/// prox of gamma * d_KL(z | .) at x (scalar).
double prox_poisson_kl(double x, double z, double gamma);

}  // namespace proxmc
