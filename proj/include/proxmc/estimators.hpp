#pragma once

// Posterior summaries from pooled chain samples.

#include <cstddef>
#include <span>
#include <vector>

#include "proxmc/model.hpp"
#include "proxmc/samplers.hpp"

namespace proxmc {

enum class Target { R, O };

struct CredibilityBand {
  std::vector<Date> dates;
  std::vector<double> lower;
  std::vector<double> median;
  std::vector<double> upper;
  double level = 0.95;

  std::size_t size() const { return median.size(); }
};

/// Linear interpolation between order statistics at position q (n - 1).
/// Throws ConfigError on empty input or q outside [0, 1].
double empirical_quantile(std::span<const double> samples, double q);
/// Same on data that is already sorted ascending.
double sorted_quantile(std::span<const double> sorted, double q);

/// Pooled values of component t of `target` over every stored sample.
std::vector<double> pooled_component(std::span<const ChainTrace> traces, Target target, std::size_t t);

/// Per-day quantiles alpha/2, 0.5, 1 - alpha/2 over all chains pooled.
CredibilityBand credibility_band(std::span<const ChainTrace> traces, Target target, double alpha,
                                 std::span<const Date> dates = {});

/// Band of Z - O: lower from the upper O quantile and vice versa.
CredibilityBand denoised_band(const CountSeries& counts, const CredibilityBand& o_band);

std::vector<double> posterior_mean(std::span<const ChainTrace> traces, Target target);
std::vector<double> posterior_median(std::span<const ChainTrace> traces, Target target);

}  // namespace proxmc
