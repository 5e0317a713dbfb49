#pragma once

// Helpers and independent oracles shared by the unit tests and the
// acceptance suite. Nothing here calls into the code under test except to
// build problem instances.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "proxmc/model.hpp"

namespace proxmc::testing {

std::filesystem::path fixture_dir();
std::filesystem::path fixture_csv();

/// Consecutive dates starting 2021-01-01.
std::vector<Date> dates_from(Date first, std::size_t n);

/// Renewal-model counts: history of length tau growing geometrically from
/// `level`, then Z_t ~ Poisson(R_t Phi^Z_t) (or rounded means when
/// `noise_free`).
CountSeries simulate_counts(const std::vector<double>& R, double level, double growth,
                            std::uint64_t seed, bool noise_free = false, int tau = 26);

/// The UK window of the bundled fixture (2021-12-06, 35 days).
EpiModel uk_fixture_model();
/// T = 35 model with UK-like magnitudes simulated from a smooth R path.
EpiModel uk_like_model(std::uint64_t seed = 7);

/// Small instances for the grid oracles.
EpiModel toy_model(std::size_t T, Hyperparams hyper, std::uint64_t seed = 3);

/// Random point of the domain: R around 1, O small relative to Phi^Z.
Theta random_feasible(const EpiModel& model, std::mt19937_64& rng, double o_scale = 0.05);

/// Minimizer of a unimodal function on [a, b].
double golden_section(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

Eigen::MatrixXd dense_D(std::size_t T);

double kl(double z, double i);  // d_KL(z | i), +inf for i <= 0 < z

/// MAP objective in KL form written out directly.
double kl_objective(const Theta& theta, const EpiModel& model);

/// Minimum over O_t in [lo, hi] of d_KL(Z_t | r Phi^Z_t + O_t) + lambda_O |O_t|.
double profile_day(double r, double phiz, double z, double lambda_O, double lo, double hi);

struct GridMap {
  Theta theta;
  double objective;
};
/// Exhaustive search over R in [0, 3]^3 (step 0.01) with O_t profiled out on
/// [-2, 2], then zoomed grid refinement around the best point. T = 3 only.
GridMap grid_map_t3(const EpiModel& model);

struct GridPosterior {
  std::vector<double> mean_R;
  std::vector<double> lower_R;  // 2.5 % marginal quantiles
  std::vector<double> upper_R;  // 97.5 %
};
/// Posterior of R with O integrated out by quadrature, on a regular R grid
/// over [0, r_max]^3. T = 3 only.
GridPosterior grid_posterior_t3(const EpiModel& model, double r_max = 4.0, double step = 0.01);

/// argmin_y tau ||A y||_1 + |y - x|^2 / 2 for a general A, by projected
/// gradient on the dual.
Eigen::VectorXd l1_composite_prox(const Eigen::MatrixXd& A, const Eigen::VectorXd& x, double tau);

/// Row-major buffer -> matrix.
Eigen::MatrixXd to_matrix(std::span<const double> rowmajor, std::size_t rows, std::size_t cols);

/// Batch-means Monte Carlo standard error of the mean.
double batch_means_se(const std::vector<double>& x, std::size_t batches = 50);

}  // namespace proxmc::testing
