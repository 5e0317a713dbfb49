#include "proxmc/map_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "proxmc/error.hpp"
#include "proxmc/prox.hpp"

namespace proxmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// K (R, O) = (phi R + O, D R) and its adjoint.
struct StackedOp {
  std::span<const double> phi;
  const SecondDiffOp& D;

  void apply(std::span<const double> R, std::span<const double> O, std::span<double> y1,
             std::span<double> y2) const {
    for (std::size_t t = 0; t < R.size(); ++t) y1[t] = phi[t] * R[t] + O[t];
    D.apply(R, y2);
  }
  void adjoint(std::span<const double> y1, std::span<const double> y2, std::span<double> R,
               std::span<double> O) const {
    D.apply_transpose(y2, R);
    for (std::size_t t = 0; t < R.size(); ++t) {
      R[t] += phi[t] * y1[t];
      O[t] = y1[t];
    }
  }
};

double stacked_norm(const StackedOp& K, std::size_t T) {
  std::vector<double> R(T), O(T), y1(T), y2(T - 2);
  for (std::size_t t = 0; t < T; ++t) {
    R[t] = 1.0 + 0.01 * static_cast<double>(t % 7);
    O[t] = 1.0 - 0.01 * static_cast<double>(t % 5);
  }
  double est = 0.0;
  for (int it = 0; it < 1000; ++it) {
    double n = 0.0;
    for (std::size_t t = 0; t < T; ++t) n += R[t] * R[t] + O[t] * O[t];
    n = std::sqrt(n);
    if (n == 0.0) return 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      R[t] /= n;
      O[t] /= n;
    }
    K.apply(R, O, y1, y2);
    K.adjoint(y1, y2, R, O);
    double next = 0.0;
    for (std::size_t t = 0; t < T; ++t) next += R[t] * R[t] + O[t] * O[t];
    next = std::sqrt(next);  // ||K^T K v|| -> ||K||^2
    if (std::fabs(next - est) <= 1e-10 * next) {
      est = next;
      break;
    }
    est = next;
  }
  // Small safety margin for the power-iteration underestimate.
  return std::sqrt(est) * (1.0 + 1e-6);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

double map_objective(const Theta& theta, const EpiModel& model, const SecondDiffOp& diffop) {
  const auto intens = intensity(theta, model);
  const auto z = model.z();
  double s = 0.0;
  for (std::size_t t = 0; t < z.size(); ++t) {
    if (theta.R[t] < 0.0) return kInf;
    if (z[t] > 0.0) {
      if (!(intens[t] > 0.0)) return kInf;
      s += z[t] * std::log(z[t] / intens[t]) - z[t] + intens[t];
    } else {
      if (!(intens[t] >= 0.0)) return kInf;
      s += intens[t];
    }
  }
  return s + g_prior(theta, diffop, model.hyper());
}

MapResult solve_map(const EpiModel& model, const SecondDiffOp& diffop, const MapOptions& options) {
  const std::size_t T = model.size();
  if (diffop.dim() != T) throw ConfigError("difference operator does not match the problem size");
  if (options.record_every == 0) throw ConfigError("record_every must be positive");
  MapResult result;

  const auto phiz = model.weighted_past();
  const auto z = model.z();
  {
    const auto pos_phi = std::count_if(phiz.begin(), phiz.end(), [](double v) { return v > 0.0; });
    const auto pos_z = std::count_if(z.begin(), z.end(), [](double v) { return v > 0.0; });
    if (pos_phi < 2 || pos_z < 1)
      result.warnings.push_back(
          "existence conditions not met: need two positive weighted past counts and one positive count");
  }

  // Work with counts divided by s = max(1, mean Phi^Z). With z' = Z/s,
  // phi' = Phi^Z/s, O' = O/s and lambda_R' = lambda_R/s, the objective is
  // exactly 1/s times the original, so minimizers correspond; the operator
  // norm stays O(1) whatever the count magnitude.
  double mean_phi = 0.0;
  for (double v : phiz) mean_phi += v;
  mean_phi /= static_cast<double>(T);
  const double s = std::max(1.0, mean_phi);
  std::vector<double> phi(T), zs(T);
  for (std::size_t t = 0; t < T; ++t) {
    phi[t] = phiz[t] / s;
    zs[t] = z[t] / s;
  }
  const double lam_R = model.hyper().lambda_R / s;
  const double lam_O = model.hyper().lambda_O;

  const StackedOp K{phi, diffop};
  const double norm = stacked_norm(K, T);
  result.op_norm = norm;
  result.scale = s;
  if (!(norm > 0.0)) throw DivergenceError("stacked operator has zero norm");
  const double sigma = options.step_scale / norm;
  const double tau = options.step_scale / norm;

  std::vector<double> R(T, 1.0), O(T, 0.0), Rbar = R, Obar = O;
  std::vector<double> y1(T, 0.0), y2(T - 2, 0.0);
  std::vector<double> k1(T), k2(T - 2), gR(T), gO(T), Rold(T), Oold(T);

  auto objective = [&] {
    Theta th(R, O);
    for (auto& o : th.O) o *= s;
    return map_objective(th, model, diffop);
  };

  double last = kInf;
  std::size_t it = 0;
  for (; it < options.max_iters; ++it) {
    // Dual step: prox of sigma F* by the Moreau identity.
    K.apply(Rbar, Obar, k1, k2);
    for (std::size_t t = 0; t < T; ++t) {
      const double v = y1[t] + sigma * k1[t];
      y1[t] = v - sigma * prox_poisson_kl(v / sigma, zs[t], 1.0 / sigma);
    }
    for (std::size_t k = 0; k < T - 2; ++k) y2[k] = std::clamp(y2[k] + sigma * k2[k], -lam_R, lam_R);

    // Primal step: projection onto R >= 0 and soft-thresholding of O.
    K.adjoint(y1, y2, gR, gO);
    Rold = R;
    Oold = O;
    for (std::size_t t = 0; t < T; ++t) {
      R[t] = std::max(0.0, R[t] - tau * gR[t]);
      const double v = O[t] - tau * gO[t];
      const double mag = std::fabs(v) - tau * lam_O;
      O[t] = mag > 0.0 ? std::copysign(mag, v) : 0.0;
      Rbar[t] = 2.0 * R[t] - Rold[t];
      Obar[t] = 2.0 * O[t] - Oold[t];
    }
    if (!all_finite(R) || !all_finite(O) || !all_finite(y1) || !all_finite(y2))
      throw DivergenceError("primal-dual iterates became non-finite at iteration " +
                            std::to_string(it + 1) + "; step sizes too large");

    if ((it + 1) % options.record_every == 0) {
      const double obj = objective();
      result.objective.push_back(obj);
      if (std::isfinite(obj) && std::isfinite(last) &&
          std::fabs(obj - last) <= options.tol * std::max(std::fabs(obj), 1e-300)) {
        result.converged = true;
        ++it;
        break;
      }
      last = obj;
    }
  }
  result.iterations = it;

  // Days with Z_t = 0 may end with an intensity a few ulps below zero;
  // move those onto the boundary I_t = 0 through O_t.
  for (std::size_t t = 0; t < T; ++t) {
    const double i = phi[t] * R[t] + O[t];
    if (zs[t] == 0.0 && i < 0.0 && i > -1e-9 * (1.0 + std::fabs(O[t]))) O[t] = -phi[t] * R[t];
  }

  result.theta = Theta(R, O);
  for (auto& o : result.theta.O) o *= s;
  result.objective_value = map_objective(result.theta, model, diffop);
  if (!std::isfinite(result.objective_value))
    throw DivergenceError("MAP iterate is outside the posterior support (objective is infinite)");
  result.subgrad_R.resize(T - 2);
  for (std::size_t k = 0; k < T - 2; ++k) result.subgrad_R[k] = y2[k] / lam_R;
  return result;
}

std::string to_string(Uniqueness u) { return u == Uniqueness::Unique ? "unique" : "possibly-nonunique"; }

UniquenessReport map_uniqueness_check(const Theta& theta_map, std::span<const double> subgrad_R,
                                      const EpiModel& model, const SecondDiffOp& diffop, double tol) {
  const std::size_t T = model.size();
  if (subgrad_R.size() != T - 2) throw ConfigError("subgradient length must be T - 2");
  const auto& hyper = model.hyper();
  const auto phiz = model.weighted_past();
  const auto z = model.z();
  const auto intens = intensity(theta_map, model);
  const auto Dd = diffop.dense();

  UniquenessReport report;
  std::vector<std::size_t> rows_R, rows_O;
  for (std::size_t k = 0; k < T - 2; ++k)
    if (std::fabs(subgrad_R[k]) < 1.0 - tol) rows_R.push_back(k);
  for (std::size_t t = 0; t < T; ++t) {
    double g;
    if (theta_map.O[t] != 0.0) {
      g = theta_map.O[t] > 0.0 ? 1.0 : -1.0;
    } else {
      const double slope = z[t] > 0.0 ? 1.0 - z[t] / intens[t] : 1.0;
      g = -slope / hyper.lambda_O;
    }
    if (std::fabs(g) < 1.0 - tol) rows_O.push_back(t);
  }
  report.active_R = rows_R.size();
  report.active_O = rows_O.size();

  const auto n_rows = static_cast<Eigen::Index>(rows_R.size() + rows_O.size() + T);
  const auto n_cols = static_cast<Eigen::Index>(2 * T);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_rows, n_cols);
  Eigen::Index r = 0;
  for (std::size_t k : rows_R) {
    for (std::size_t t = 0; t < T; ++t) M(r, static_cast<Eigen::Index>(t)) = hyper.lambda_R * Dd[k * T + t];
    ++r;
  }
  for (std::size_t t : rows_O) M(r++, static_cast<Eigen::Index>(T + t)) = hyper.lambda_O;
  // Scale the data rows to unit norm so the rank threshold is not swamped by
  // count magnitudes.
  for (std::size_t t = 0; t < T; ++t) {
    const double n = std::sqrt(phiz[t] * phiz[t] + 1.0);
    M(r, static_cast<Eigen::Index>(t)) = phiz[t] / n;
    M(r, static_cast<Eigen::Index>(T + t)) = 1.0 / n;
    ++r;
  }
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    const double n = M.row(i).norm();
    if (n > 0.0) M.row(i) /= n;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  svd.setThreshold(1e-10);
  report.rank = static_cast<std::size_t>(svd.rank());
  report.verdict = report.rank == 2 * T ? Uniqueness::Unique : Uniqueness::PossiblyNonunique;
  return report;
}

}  // namespace proxmc
