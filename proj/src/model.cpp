#include "proxmc/model.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "proxmc/error.hpp"
#include "proxmc/kernels.hpp"
#include "proxmc/linops.hpp"

namespace proxmc {

void CountSeries::validate() const {
  if (dates.size() != values.size())
    throw ConfigError("count series has " + std::to_string(values.size()) + " values but " +
                      std::to_string(dates.size()) + " dates");
  for (auto v : values)
    if (v < 0) throw ConfigError("negative count in window");
  for (auto v : history)
    if (v < 0) throw ConfigError("negative count in history");
  for (std::size_t t = 1; t < dates.size(); ++t) {
    if (std::chrono::sys_days{dates[t]} - std::chrono::sys_days{dates[t - 1]} != std::chrono::days{1})
      throw ConfigError("dates are not consecutive at position " + std::to_string(t));
  }
}

SerialInterval build_serial_interval(double mean, double sd, int tau) {
  if (!(mean > 0.0) || !(sd > 0.0) || tau < 1)
    throw ConfigError("serial interval needs mean > 0, sd > 0 and tau >= 1");
  const double shape = (mean / sd) * (mean / sd);
  const double scale = sd * sd / mean;
  SerialInterval phi;
  phi.weights.resize(static_cast<std::size_t>(tau));
  double prev = 0.0;
  double total = 0.0;
  for (int u = 1; u <= tau; ++u) {
    const double cdf = boost::math::gamma_p(shape, u / scale);
    phi.weights[static_cast<std::size_t>(u - 1)] = cdf - prev;
    total += cdf - prev;
    prev = cdf;
  }
  for (auto& w : phi.weights) w /= total;
  return phi;
}

std::vector<double> weighted_past_counts(const CountSeries& counts, const SerialInterval& phi) {
  const std::size_t tau = phi.tau();
  if (counts.history.size() != tau)
    throw ConfigError("history has " + std::to_string(counts.history.size()) +
                      " days, serial interval needs " + std::to_string(tau));
  const std::size_t T = counts.size();
  // full[k] = Z_{k + 1 - tau}
  std::vector<double> full;
  full.reserve(tau + T);
  for (auto v : counts.history) full.push_back(static_cast<double>(v));
  for (auto v : counts.values) full.push_back(static_cast<double>(v));

  std::vector<double> out(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double s = 0.0;
    for (std::size_t u = 1; u <= tau; ++u) s += phi.weights[u - 1] * full[tau + t - u];
    out[t] = s;
  }
  return out;
}

EpiModel::EpiModel(CountSeries counts, SerialInterval phi, Hyperparams hyper)
    : counts_(std::move(counts)), phi_(std::move(phi)), hyper_(hyper) {
  if (!(hyper_.lambda_R > 0.0) || !(hyper_.lambda_O > 0.0))
    throw ConfigError("regularization weights must be positive");
  for (double w : phi_.weights)
    if (!(w >= 0.0)) throw ConfigError("serial interval weights must be nonnegative");
  counts_.validate();
  phiz_ = weighted_past_counts(counts_, phi_);
  z_.reserve(counts_.size());
  for (auto v : counts_.values) z_.push_back(static_cast<double>(v));
}

void intensity(const Theta& theta, const EpiModel& model, std::span<double> out) {
  if (theta.R.size() != model.size() || theta.O.size() != model.size())
    throw ConfigError("parameter length does not match the count series");
  kernels::intensity(theta.R, model.weighted_past(), theta.O, out);
}

std::vector<double> intensity(const Theta& theta, const EpiModel& model) {
  std::vector<double> out(model.size());
  intensity(theta, model, out);
  return out;
}

bool in_domain(std::span<const double> R, std::span<const double> intens, std::span<const double> z) {
  for (std::size_t t = 0; t < z.size(); ++t) {
    if (!(R[t] >= 0.0)) return false;
    if (z[t] > 0.0 ? !(intens[t] > 0.0) : !(intens[t] >= 0.0)) return false;
  }
  return true;
}

bool in_domain(const Theta& theta, const EpiModel& model) {
  const auto intens = intensity(theta, model);
  return in_domain(theta.R, intens, model.z());
}

double f_data_from_intensity(std::span<const double> intens, std::span<const double> z) {
  double s = 0.0;
  for (std::size_t t = 0; t < z.size(); ++t) {
    if (z[t] > 0.0) {
      if (!(intens[t] > 0.0)) return std::numeric_limits<double>::infinity();
      s += intens[t] - z[t] * std::log(intens[t]);
    } else {
      if (!(intens[t] >= 0.0)) return std::numeric_limits<double>::infinity();
      s += intens[t];
    }
  }
  return s;
}

double f_data(const Theta& theta, const EpiModel& model) {
  const auto intens = intensity(theta, model);
  if (!in_domain(theta.R, intens, model.z())) return std::numeric_limits<double>::infinity();
  return f_data_from_intensity(intens, model.z());
}

double g_prior(const Theta& theta, const SecondDiffOp& diffop, const Hyperparams& hyper) {
  double o1 = 0.0;
  for (double o : theta.O) o1 += std::fabs(o);
  return hyper.lambda_R * diffop.l1_of_apply(theta.R) + hyper.lambda_O * o1;
}

double neg_log_posterior(const Theta& theta, const EpiModel& model, const SecondDiffOp& diffop) {
  const double f = f_data(theta, model);
  if (!std::isfinite(f)) return f;
  return f + g_prior(theta, diffop, model.hyper());
}

void grad_f(std::span<const double> intens, const EpiModel& model, std::span<double> slope,
            std::span<double> grad_R) {
  const auto z = model.z();
  for (std::size_t t = 0; t < z.size(); ++t)
    if (z[t] > 0.0 && !(intens[t] > 0.0))
      throw DomainError("gradient undefined: zero intensity on day " + std::to_string(t + 1) +
                        " with a positive count");
  kernels::kl_slope(z, intens, slope);
  const auto w = model.weighted_past();
  for (std::size_t t = 0; t < z.size(); ++t) grad_R[t] = w[t] * slope[t];
}

Gradient grad_f(const Theta& theta, const EpiModel& model) {
  const auto intens = intensity(theta, model);
  Gradient g{std::vector<double>(model.size()), std::vector<double>(model.size())};
  grad_f(intens, model, g.O, g.R);
  return g;
}

}  // namespace proxmc
