#pragma once

// MAP estimation,
//   min_{R >= 0, O} sum_t d_KL(Z_t | R_t Phi^Z_t + O_t) + lambda_R ||D R||_1 + lambda_O ||O||_1,
// by the Chambolle-Pock primal-dual algorithm, and the kernel criterion for
// uniqueness of the minimizer.

#include <cstddef>
#include <string>
#include <vector>

#include "proxmc/linops.hpp"
#include "proxmc/model.hpp"

namespace proxmc {

struct MapOptions {
  std::size_t max_iters = 500000;
  /// Stop when the objective changes by less than tol (relative) over
  /// `record_every` iterations.
  double tol = 1e-12;
  std::size_t record_every = 100;
  /// sigma = tau = step_scale / ||K||; values >= 1 void the convergence
  /// guarantee.
  double step_scale = 0.99;
};

struct MapResult {
  Theta theta;
  /// KL-form objective (nonnegative), every record_every iterations.
  std::vector<double> objective;
  double objective_value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Subgradient of ||.||_1 at D R_map, in [-1, 1].
  std::vector<double> subgrad_R;
  /// Operator norm of the (rescaled) stacked operator.
  double op_norm = 0.0;
  /// Count rescaling applied internally (1 for small counts).
  double scale = 1.0;
  std::vector<std::string> warnings;
};

/// Objective of the MAP problem in KL form; +inf off the domain.
double map_objective(const Theta& theta, const EpiModel& model, const SecondDiffOp& diffop);

/// Throws DivergenceError on non-finite iterates.
MapResult solve_map(const EpiModel& model, const SecondDiffOp& diffop, const MapOptions& options = {});

enum class Uniqueness { Unique, PossiblyNonunique };

struct UniquenessReport {
  Uniqueness verdict = Uniqueness::PossiblyNonunique;
  std::size_t active_R = 0;  // rows of D R with |subgradient| < 1 - tol
  std::size_t active_O = 0;
  std::size_t rank = 0;      // of the stacked constraint matrix, out of 2T
};

std::string to_string(Uniqueness u);

/// K1 = ker(U_I), K2 = ker([diag(Phi^Z) I]); unique iff K1 ∩ K2 = {0}.
/// `subgrad_R` is the ||.||_1 subgradient at D R_map (MapResult::subgrad_R).
UniquenessReport map_uniqueness_check(const Theta& theta_map, std::span<const double> subgrad_R,
                                      const EpiModel& model, const SecondDiffOp& diffop,
                                      double tol = 1e-6);

}  // namespace proxmc
