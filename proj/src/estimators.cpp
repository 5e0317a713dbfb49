#include "proxmc/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "proxmc/error.hpp"

namespace proxmc {

namespace {

std::size_t pooled_size(std::span<const ChainTrace> traces, std::size_t& T) {
  if (traces.empty()) throw ConfigError("no chains to summarize");
  T = traces.front().T;
  std::size_t n = 0;
  for (const auto& tr : traces) {
    if (tr.T != T) throw ConfigError("chains differ in dimension");
    n += tr.count();
  }
  if (n == 0) throw ConfigError("no post-burn-in samples to summarize");
  return n;
}

}  // namespace

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ConfigError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return frac == 0.0 ? sorted[lo] : sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double empirical_quantile(std::span<const double> samples, double q) {
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  return sorted_quantile(v, q);
}

std::vector<double> pooled_component(std::span<const ChainTrace> traces, Target target, std::size_t t) {
  std::size_t T = 0;
  const std::size_t n = pooled_size(traces, T);
  if (t >= T) throw ConfigError("component index out of range");
  std::vector<double> out;
  out.reserve(n);
  const std::size_t offset = target == Target::R ? t : T + t;
  for (const auto& tr : traces)
    for (std::size_t k = 0; k < tr.count(); ++k) out.push_back(tr.samples[2 * T * k + offset]);
  return out;
}

CredibilityBand credibility_band(std::span<const ChainTrace> traces, Target target, double alpha,
                                 std::span<const Date> dates) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  std::size_t T = 0;
  pooled_size(traces, T);
  if (!dates.empty() && dates.size() != T) throw ConfigError("band dates do not match the chain dimension");
  CredibilityBand band;
  band.level = 1.0 - alpha;
  band.dates.assign(dates.begin(), dates.end());
  band.lower.resize(T);
  band.median.resize(T);
  band.upper.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    auto v = pooled_component(traces, target, t);
    std::sort(v.begin(), v.end());
    band.lower[t] = sorted_quantile(v, alpha / 2.0);
    band.median[t] = sorted_quantile(v, 0.5);
    band.upper[t] = sorted_quantile(v, 1.0 - alpha / 2.0);
  }
  return band;
}

CredibilityBand denoised_band(const CountSeries& counts, const CredibilityBand& o_band) {
  if (o_band.size() != counts.size()) throw ConfigError("outlier band does not match the count series");
  if (!o_band.dates.empty() && o_band.dates != counts.dates)
    throw ConfigError("outlier band dates do not match the count series");
  CredibilityBand band;
  band.level = o_band.level;
  band.dates = counts.dates;
  const std::size_t T = counts.size();
  band.lower.resize(T);
  band.median.resize(T);
  band.upper.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double z = static_cast<double>(counts.values[t]);
    band.lower[t] = z - o_band.upper[t];
    band.median[t] = z - o_band.median[t];
    band.upper[t] = z - o_band.lower[t];
  }
  return band;
}

std::vector<double> posterior_mean(std::span<const ChainTrace> traces, Target target) {
  std::size_t T = 0;
  const std::size_t n = pooled_size(traces, T);
  std::vector<double> out(T, 0.0);
  const std::size_t offset = target == Target::R ? 0 : T;
  for (const auto& tr : traces)
    for (std::size_t k = 0; k < tr.count(); ++k)
      for (std::size_t t = 0; t < T; ++t) out[t] += tr.samples[2 * T * k + offset + t];
  for (auto& v : out) v /= static_cast<double>(n);
  return out;
}

std::vector<double> posterior_median(std::span<const ChainTrace> traces, Target target) {
  std::size_t T = 0;
  pooled_size(traces, T);
  std::vector<double> out(T);
  for (std::size_t t = 0; t < T; ++t) out[t] = empirical_quantile(pooled_component(traces, target, t), 0.5);
  return out;
}

}  // namespace proxmc
