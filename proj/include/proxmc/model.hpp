#pragma once

// Target density of the renewal model with outliers:
//   pi(R, O) ∝ exp(-f(R, O) - g(R, O)) on the feasible set,
//   I_t = R_t * sum_u Phi_u Z_{t-u} + O_t,
//   f = sum_t (I_t - Z_t ln I_t),   g = lambda_R ||D R||_1 + lambda_O ||O||_1.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace proxmc {

class SecondDiffOp;

using Date = std::chrono::year_month_day;

/// Observed daily counts over the analysis window plus the history needed
/// by the serial interval.
struct CountSeries {
  std::vector<Date> dates;             // one per value, consecutive
  std::vector<std::int64_t> values;    // Z_1..Z_T
  std::vector<std::int64_t> history;   // Z_{1-tau}..Z_0

  std::size_t size() const { return values.size(); }
  /// Throws ConfigError when counts are negative, dates are not
  /// consecutive, or the date and value lengths differ.
  void validate() const;
};

struct SerialInterval {
  std::vector<double> weights;  // Phi_1..Phi_tau

  std::size_t tau() const { return weights.size(); }
};

struct Theta {
  std::vector<double> R;
  std::vector<double> O;

  Theta() = default;
  explicit Theta(std::size_t T, double r = 1.0, double o = 0.0) : R(T, r), O(T, o) {}
  Theta(std::vector<double> r, std::vector<double> o) : R(std::move(r)), O(std::move(o)) {}
  std::size_t size() const { return R.size(); }
  friend bool operator==(const Theta&, const Theta&) = default;
};

struct Hyperparams {
  double lambda_R = 1.0;
  double lambda_O = 0.05;
};

/// Discretized Gamma serial interval: mass of Gamma(shape=(mean/sd)^2,
/// scale=sd^2/mean) on (u-1, u], u = 1..tau, renormalized to sum to one.
SerialInterval build_serial_interval(double mean = 6.6, double sd = 3.5, int tau = 26);

/// out_t = sum_{u=1..tau} Phi_u Z_{t-u}; indices <= 0 read from history.
std::vector<double> weighted_past_counts(const CountSeries& counts, const SerialInterval& phi);

/// Frozen problem instance. Immutable after construction.
class EpiModel {
 public:
  EpiModel(CountSeries counts, SerialInterval phi, Hyperparams hyper);

  std::size_t size() const { return z_.size(); }
  const CountSeries& counts() const { return counts_; }
  const SerialInterval& phi() const { return phi_; }
  const Hyperparams& hyper() const { return hyper_; }
  /// Phi^Z_t.
  std::span<const double> weighted_past() const { return phiz_; }
  std::span<const double> z() const { return z_; }

 private:
  CountSeries counts_;
  SerialInterval phi_;
  Hyperparams hyper_;
  std::vector<double> phiz_;
  std::vector<double> z_;
};

std::vector<double> intensity(const Theta& theta, const EpiModel& model);
void intensity(const Theta& theta, const EpiModel& model, std::span<double> out);

/// R >= 0, I_t > 0 where Z_t > 0, and I_t >= 0 where Z_t = 0.
bool in_domain(const Theta& theta, const EpiModel& model);
bool in_domain(std::span<const double> R, std::span<const double> intens, std::span<const double> z);

/// sum_t (I_t - Z_t ln I_t) with 0 ln 0 = 0; +inf off the domain.
double f_data(const Theta& theta, const EpiModel& model);
/// Same from a precomputed intensity; does not check R >= 0.
double f_data_from_intensity(std::span<const double> intens, std::span<const double> z);

double g_prior(const Theta& theta, const SecondDiffOp& diffop, const Hyperparams& hyper);

/// f + g; +inf off the domain. The log-normalizer is never computed.
double neg_log_posterior(const Theta& theta, const EpiModel& model, const SecondDiffOp& diffop);

struct Gradient {
  std::vector<double> R;
  std::vector<double> O;
};

/// Gradient of f. Throws DomainError when I_t <= 0 for some Z_t > 0.
Gradient grad_f(const Theta& theta, const EpiModel& model);
/// Workspace form: slope holds 1 - Z/I on return.
void grad_f(std::span<const double> intens, const EpiModel& model, std::span<double> slope,
            std::span<double> grad_R);

}  // namespace proxmc
