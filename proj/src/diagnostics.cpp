#include "proxmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "proxmc/error.hpp"
#include "proxmc/kernels.hpp"

namespace proxmc {

std::vector<double> distance_to_map(std::span<const double> rows, std::span<const double> r_map,
                                    std::size_t stride) {
  const std::size_t T = r_map.size();
  if (stride == 0) stride = T;
  const double ref = std::sqrt(kernels::sq_norm(r_map));
  if (!(ref > 0.0)) throw DomainError("MAP estimate of R has zero norm");
  if (T == 0 || stride < T || rows.size() % stride != 0)
    throw ConfigError("trace rows do not match the MAP length");
  std::vector<double> out(rows.size() / stride);
  for (std::size_t n = 0; n < out.size(); ++n) {
    double s = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double d = rows[n * stride + t] - r_map[t];
      s += d * d;
    }
    out[n] = std::sqrt(s) / ref;
  }
  return out;
}

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n <= max_lag) throw ConfigError("series is shorter than the maximum lag");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = x[i] - mean;
  const double c0 = kernels::dot(c, c);
  if (!(c0 > 0.0)) return {};
  std::vector<double> rho(max_lag + 1);
  for (std::size_t l = 0; l <= max_lag; ++l)
    rho[l] = kernels::active().dot(c.data(), c.data() + l, n - l) / c0;
  rho[0] = 1.0;
  return rho;
}

AcfResult mean_abs_acf(const ChainTrace& trace, std::span<const std::size_t> lags) {
  const std::size_t n = trace.count();
  const std::size_t dim = 2 * trace.T;
  for (std::size_t l : lags)
    if (l >= n) throw ConfigError("trace holds fewer samples than the maximum lag");
  AcfResult out;
  out.mean_abs.assign(lags.size(), 0.0);
  std::vector<double> c(n);
  std::size_t used = 0;
  for (std::size_t comp = 0; comp < dim; ++comp) {
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += trace.samples[k * dim + comp];
    mean /= static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = trace.samples[k * dim + comp] - mean;
    const double c0 = kernels::dot(c, c);
    if (!(c0 > 0.0)) {
      ++out.skipped_components;
      continue;
    }
    ++used;
    for (std::size_t j = 0; j < lags.size(); ++j) {
      const std::size_t l = lags[j];
      const double rho = l == 0 ? 1.0 : kernels::active().dot(c.data(), c.data() + l, n - l) / c0;
      out.mean_abs[j] += std::fabs(rho);
    }
  }
  if (used == 0) throw DomainError("every component of the trace is constant");
  for (auto& v : out.mean_abs) v /= static_cast<double>(used);
  return out;
}

AcfResult mean_abs_acf(const ChainTrace& trace, std::size_t max_lag) {
  std::vector<std::size_t> lags(max_lag + 1);
  for (std::size_t l = 0; l <= max_lag; ++l) lags[l] = l;
  return mean_abs_acf(trace, lags);
}

std::vector<double> gelman_rubin_components(std::span<const std::span<const double>> chains,
                                            std::size_t dim, std::size_t n) {
  const std::size_t m = chains.size();
  if (m < 2) throw ConfigError("Gelman-Rubin needs at least two chains");
  if (n < 2) throw ConfigError("Gelman-Rubin needs at least two samples per chain");
  for (const auto& c : chains)
    if (c.size() < n * dim) throw ConfigError("chains are shorter than the checkpoint");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  std::vector<double> out(dim);
  std::vector<double> means(m);
  for (std::size_t c = 0; c < dim; ++c) {
    double W = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += chains[k][i * dim + c];
      mean /= nd;
      means[k] = mean;
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = chains[k][i * dim + c] - mean;
        ss += d * d;
      }
      W += ss / (nd - 1.0);
    }
    W /= md;
    double grand = 0.0;
    for (double v : means) grand += v;
    grand /= md;
    double B = 0.0;
    for (double v : means) B += (v - grand) * (v - grand);
    B *= nd / (md - 1.0);
    if (!(W > 0.0))
      throw DomainError("zero within-chain variance for component " + std::to_string(c));
    out[c] = std::sqrt(((nd - 1.0) / nd * W + B / nd) / W);
  }
  return out;
}

GelmanRubin gelman_rubin(std::span<const ChainTrace> traces, std::span<const std::size_t> checkpoints) {
  if (traces.size() < 2) throw ConfigError("Gelman-Rubin needs at least two chains");
  const std::size_t T = traces.front().T;
  const std::size_t len = traces.front().count();
  for (const auto& tr : traces)
    if (tr.T != T || tr.count() != len) throw ConfigError("chains differ in dimension or length");
  std::vector<std::span<const double>> views;
  for (const auto& tr : traces) views.emplace_back(tr.samples);

  GelmanRubin out;
  for (std::size_t n : checkpoints) {
    if (n > len) throw ConfigError("checkpoint beyond the stored samples");
    auto comp = gelman_rubin_components(views, 2 * T, n);
    out.checkpoints.push_back(n);
    out.statistic.push_back(*std::max_element(comp.begin(), comp.end()));
    out.per_component.push_back(std::move(comp));
  }
  return out;
}

}  // namespace proxmc
