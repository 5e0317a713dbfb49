#include "support.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "proxmc/ingest.hpp"

#ifndef PROXMC_FIXTURE_DIR
#error "PROXMC_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace proxmc::testing {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::filesystem::path fixture_dir() { return PROXMC_FIXTURE_DIR; }
std::filesystem::path fixture_csv() { return fixture_dir() / "jhu_confirmed_synthetic.csv"; }

std::vector<Date> dates_from(Date first, std::size_t n) {
  std::vector<Date> d;
  const auto base = std::chrono::sys_days(first);
  for (std::size_t i = 0; i < n; ++i) d.emplace_back(base + std::chrono::days(i));
  return d;
}

CountSeries simulate_counts(const std::vector<double>& R, double level, double growth,
                            std::uint64_t seed, bool noise_free, int tau) {
  const auto phi = build_serial_interval(6.6, 3.5, tau);
  std::mt19937_64 rng(seed);
  // all[k] = Z_{k - tau + 1}
  std::vector<double> all;
  for (int u = -tau + 1; u <= 0; ++u) all.push_back(std::round(level * std::pow(growth, u)));
  CountSeries cs;
  for (double r : R) {
    double phiz = 0.0;
    const std::size_t now = all.size();
    for (int u = 1; u <= tau; ++u) phiz += phi.weights[u - 1] * all[now - u];
    const double mean = r * phiz;
    double z;
    if (noise_free) {
      z = std::round(mean);
    } else {
      std::poisson_distribution<long long> pois(std::max(mean, 1e-12));
      z = static_cast<double>(pois(rng));
    }
    all.push_back(z);
  }
  for (int k = 0; k < tau; ++k) cs.history.push_back(static_cast<std::int64_t>(all[k]));
  for (std::size_t t = 0; t < R.size(); ++t) cs.values.push_back(static_cast<std::int64_t>(all[tau + t]));
  using namespace std::chrono;
  cs.dates = dates_from(year{2021} / January / 1, R.size());
  return cs;
}

EpiModel uk_fixture_model() {
  const auto daily = to_daily(parse_jhu_csv(fixture_csv(), "United Kingdom"));
  const auto cs = window(daily, parse_iso_date("2021-12-06"));
  return EpiModel(cs, build_serial_interval(), lambda_defaults(cs));
}

EpiModel uk_like_model(std::uint64_t seed) {
  std::vector<double> R(35);
  for (std::size_t t = 0; t < R.size(); ++t) R[t] = 1.3 - 0.5 / (1.0 + std::exp(-(t - 20.0) / 3.0));
  const auto cs = simulate_counts(R, 5e4, 1.03, seed);
  return EpiModel(cs, build_serial_interval(), lambda_defaults(cs));
}

EpiModel toy_model(std::size_t T, Hyperparams hyper, std::uint64_t seed) {
  std::vector<double> R(T);
  for (std::size_t t = 0; t < T; ++t) R[t] = 1.0 + 0.2 * std::sin(static_cast<double>(t));
  return EpiModel(simulate_counts(R, 10.0, 1.0, seed), build_serial_interval(), hyper);
}

Theta random_feasible(const EpiModel& model, std::mt19937_64& rng, double o_scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto phiz = model.weighted_past();
  const std::size_t T = model.size();
  Theta th(T);
  for (std::size_t t = 0; t < T; ++t) {
    th.R[t] = std::max(0.05, 1.0 + 0.3 * u(rng));
    // |O| < o_scale Phi^Z keeps I well inside the domain for o_scale < R.
    th.O[t] = o_scale * phiz[t] * u(rng);
  }
  return th;
}

double golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Eigen::MatrixXd dense_D(std::size_t T) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(T - 2, T);
  for (std::size_t r = 0; r + 2 < T; ++r) {
    D(r, r) = 1.0 / std::sqrt(6.0);
    D(r, r + 1) = -2.0 / std::sqrt(6.0);
    D(r, r + 2) = 1.0 / std::sqrt(6.0);
  }
  return D;
}

double kl(double z, double i) {
  if (z == 0.0) return i >= 0.0 ? i : kInf;
  if (i <= 0.0) return kInf;
  return z * std::log(z / i) - z + i;
}

double kl_objective(const Theta& theta, const EpiModel& model) {
  const std::size_t T = model.size();
  const auto phiz = model.weighted_past();
  const auto z = model.z();
  double s = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    if (theta.R[t] < 0.0) return kInf;
    s += kl(z[t], theta.R[t] * phiz[t] + theta.O[t]) + model.hyper().lambda_O * std::abs(theta.O[t]);
  }
  const Eigen::MatrixXd D = dense_D(T);
  const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(theta.R.data(), T);
  return s + model.hyper().lambda_R * (D * r).lpNorm<1>();
}

double profile_day(double r, double phiz, double z, double lambda_O, double lo, double hi) {
  const double base = r * phiz;
  lo = std::max(lo, -base + (z > 0.0 ? 1e-12 : 0.0));
  if (lo > hi) return kInf;
  auto f = [&](double o) { return kl(z, base + o) + lambda_O * std::abs(o); };
  const double o = golden_section(f, lo, hi, 1e-13);
  return std::min({f(o), f(lo), f(hi), (lo <= 0.0 && hi >= 0.0) ? f(0.0) : kInf});
}

namespace {

struct Search {
  double best = kInf;
  std::array<double, 3> r{};
};

// Evaluate lambda_R |D R| + sum_t p_t(R_t) on the tensor grid axes[t].
void scan(const EpiModel& model, const std::array<std::vector<double>, 3>& axes, Search& s) {
  const auto phiz = model.weighted_past();
  const auto z = model.z();
  const double lr = model.hyper().lambda_R, lo = model.hyper().lambda_O;
  std::array<std::vector<double>, 3> p;
  for (int t = 0; t < 3; ++t)
    for (double r : axes[t]) p[t].push_back(profile_day(r, phiz[t], z[t], lo, -2.0, 2.0));
  const double c = 1.0 / std::sqrt(6.0);
  for (std::size_t i = 0; i < axes[0].size(); ++i)
    for (std::size_t j = 0; j < axes[1].size(); ++j) {
      const double pij = p[0][i] + p[1][j];
      if (!(pij < s.best)) continue;
      for (std::size_t k = 0; k < axes[2].size(); ++k) {
        const double v = pij + p[2][k] + lr * std::abs(c * (axes[0][i] - 2.0 * axes[1][j] + axes[2][k]));
        if (v < s.best) {
          s.best = v;
          s.r = {axes[0][i], axes[1][j], axes[2][k]};
        }
      }
    }
}

}  // namespace

GridMap grid_map_t3(const EpiModel& model) {
  assert(model.size() == 3);
  std::array<std::vector<double>, 3> axes;
  for (auto& a : axes)
    for (int k = 0; k <= 300; ++k) a.push_back(0.01 * k);
  Search s;
  scan(model, axes, s);
  // Zoom: 41 points per axis over +-2 steps of the previous grid.
  double half = 0.02;
  for (int level = 0; level < 12; ++level) {
    for (int t = 0; t < 3; ++t) {
      axes[t].clear();
      for (int k = -20; k <= 20; ++k) axes[t].push_back(std::max(0.0, s.r[t] + half * k / 20.0));
    }
    scan(model, axes, s);
    half /= 4.0;
  }
  // Recover the profiled O.
  const auto phiz = model.weighted_past();
  const auto z = model.z();
  GridMap out{Theta(3), s.best};
  for (int t = 0; t < 3; ++t) {
    out.theta.R[t] = s.r[t];
    const double base = s.r[t] * phiz[t];
    const double lo = std::max(-2.0, -base + 1e-12);
    auto f = [&](double o) { return kl(z[t], base + o) + model.hyper().lambda_O * std::abs(o); };
    out.theta.O[t] = golden_section(f, lo, 2.0, 1e-13);
  }
  return out;
}

namespace {

// log of int_0^inf exp(-d_KL(z | I) - lambda_O |I - base|) dI by Simpson's rule,
// split at the kink I = base.
double log_day_integral(double base, double z, double lambda_O) {
  const double top = std::max(z, base) + 80.0 + 20.0 * std::sqrt(z + 1.0);
  auto g = [&](double i) {
    const double k = kl(z, i);
    return std::isfinite(k) ? std::exp(-k - lambda_O * std::abs(i - base)) : 0.0;
  };
  auto simpson = [&](double a, double b, int n) {
    if (b <= a) return 0.0;
    const double h = (b - a) / n;
    double s = g(a) + g(b);
    for (int k = 1; k < n; ++k) s += g(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  const double kink = std::clamp(base, 0.0, top);
  return std::log(simpson(0.0, kink, 2000) + simpson(kink, top, 4000));
}

}  // namespace

GridPosterior grid_posterior_t3(const EpiModel& model, double r_max, double step) {
  assert(model.size() == 3);
  const auto phiz = model.weighted_past();
  const auto z = model.z();
  const std::size_t n = static_cast<std::size_t>(std::llround(r_max / step));
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = (k + 0.5) * step;  // cell midpoints

  std::array<std::vector<double>, 3> lh;
  for (int t = 0; t < 3; ++t)
    for (double rv : r) lh[t].push_back(log_day_integral(rv * phiz[t], z[t], model.hyper().lambda_O));
  double peak = -kInf;
  for (int t = 0; t < 3; ++t) peak = std::max(peak, *std::max_element(lh[t].begin(), lh[t].end()));

  const double lr = model.hyper().lambda_R / std::sqrt(6.0);
  std::array<std::vector<double>, 3> marg{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double lij = lh[0][i] + lh[1][j] - 3.0 * peak;
      if (lij < -700.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        const double w = std::exp(lij + lh[2][k] - lr * std::abs(r[i] - 2.0 * r[j] + r[k]));
        marg[0][i] += w;
        marg[1][j] += w;
        marg[2][k] += w;
        total += w;
      }
    }

  GridPosterior out;
  for (int t = 0; t < 3; ++t) {
    double m = 0.0, cdf = 0.0;
    double lo = kInf, hi = kInf;
    for (std::size_t k = 0; k < n; ++k) {
      const double p = marg[t][k] / total;
      m += p * r[k];
      // CDF is linear within each cell.
      const double a = k * step;
      if (lo == kInf && cdf + p >= 0.025) lo = a + step * (0.025 - cdf) / p;
      if (hi == kInf && cdf + p >= 0.975) hi = a + step * (0.975 - cdf) / p;
      cdf += p;
    }
    out.mean_R.push_back(m);
    out.lower_R.push_back(lo);
    out.upper_R.push_back(hi);
  }
  return out;
}

// Dual: min_{|u|_inf <= tau} |x - A^T u|^2 / 2, step 1/||A||^2; y = x - A^T u.
Eigen::VectorXd l1_composite_prox(const Eigen::MatrixXd& A, const Eigen::VectorXd& x, double tau) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const double L = svd.singularValues()(0) * svd.singularValues()(0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(A.rows());
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd grad = -A * (x - A.transpose() * u);
    const Eigen::VectorXd next = (u - grad / L).cwiseMax(-tau).cwiseMin(tau);
    const double step = (next - u).norm();
    u = next;
    if (step < 1e-15) break;
  }
  return x - A.transpose() * u;
}

Eigen::MatrixXd to_matrix(std::span<const double> rowmajor, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rowmajor[r * cols + c];
  return m;
}

double batch_means_se(const std::vector<double>& x, std::size_t batches) {
  const std::size_t len = x.size() / batches;
  assert(len >= 2);
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b)
    means[b] = std::accumulate(x.begin() + b * len, x.begin() + (b + 1) * len, 0.0) / len;
  const double mu = std::accumulate(means.begin(), means.end(), 0.0) / batches;
  double v = 0.0;
  for (double m : means) v += (m - mu) * (m - mu);
  v /= (batches - 1);
  return std::sqrt(v / batches);
}

}  // namespace proxmc::testing
