#pragma once

// Convergence diagnostics: normalized distance to the MAP, mean absolute
// autocorrelation over the 2T components, and the Gelman-Rubin statistic.

#include <cstddef>
#include <span>
#include <vector>

#include "proxmc/samplers.hpp"

namespace proxmc {

/// ||R^n - R_map|| / ||R_map|| for each row of `rows`. Rows are `stride`
/// values apart (0 means T) and hold R in their first T entries, so trace
/// rows (R then O) can be passed with stride 2T.
std::vector<double> distance_to_map(std::span<const double> rows, std::span<const double> r_map,
                                    std::size_t stride = 0);

/// Biased autocorrelation of one series at lags 0..max_lag. Returns an empty
/// vector for a constant series.
std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag);

struct AcfResult {
  std::vector<double> mean_abs;        // lags 0..max_lag
  std::size_t skipped_components = 0;  // zero-variance components
};

/// Mean over the 2T components of |rho_c(l)|, lags in stored samples.
AcfResult mean_abs_acf(const ChainTrace& trace, std::size_t max_lag);
/// Same, evaluated only at the given lags (output aligned with `lags`).
AcfResult mean_abs_acf(const ChainTrace& trace, std::span<const std::size_t> lags);

struct GelmanRubin {
  std::vector<std::size_t> checkpoints;     // number of stored samples used
  std::vector<double> statistic;            // max over components
  std::vector<std::vector<double>> per_component;  // 2T values per checkpoint
};

/// Potential scale reduction sqrt(((n-1)/n W + B/n) / W) per component, at
/// each checkpoint using the first n stored samples of every chain.
/// Throws ConfigError for fewer than two chains, unequal lengths or n < 2,
/// and DomainError when W = 0 for a component.
GelmanRubin gelman_rubin(std::span<const ChainTrace> traces, std::span<const std::size_t> checkpoints);

/// Same on raw data: chains[k] holds n rows of `dim` values.
std::vector<double> gelman_rubin_components(std::span<const std::span<const double>> chains,
                                            std::size_t dim, std::size_t n);

}  // namespace proxmc
