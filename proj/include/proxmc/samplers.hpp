#pragma once

// Blockwise proximal-gradient Metropolis samplers for pi(R, O).
//
// Twelve variants: drift {RW, PGdec, PGdual} x scheme {MH, Gibbs} x
// R-block covariance {I, O}. Every proposal is Gaussian,
//   R' ~ N(mu_R(theta), 2 gamma1 dbar^{-1} dbar^{-T}),  O' ~ N(mu_O(theta), 2 gamma2 I),
// where dbar is the Invert or Ortho augmentation of D. The MH scheme
// proposes both blocks and accepts them jointly; the Gibbs scheme updates
// R then O, each with its own accept/reject step against the full
// conditional.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "proxmc/linops.hpp"
#include "proxmc/model.hpp"
#include "proxmc/rng.hpp"

namespace proxmc {

enum class Drift { RW, PGdec, PGdual };
enum class Scheme { MH, Gibbs };
enum class Covariance { I, O };

std::string to_string(Drift d);
std::string to_string(Scheme s);
std::string to_string(Covariance c);
/// Case-insensitive; throws ConfigError for unknown names.
Drift parse_drift(const std::string& s);
Scheme parse_scheme(const std::string& s);
Covariance parse_covariance(const std::string& s);

struct SamplerConfig {
  Drift drift = Drift::PGdual;
  Scheme scheme = Scheme::Gibbs;
  Covariance covariance = Covariance::O;
  std::size_t n_max = 200000;
  std::size_t n_burnin = 50000;
  double target_acceptance = 0.25;
  std::uint64_t seed = 1;
  std::size_t thinning = 10;
  /// Zero selects a data-driven starting value (see initial_step_sizes).
  double initial_gamma1 = 0.0;
  double initial_gamma2 = 0.0;

  // Robbins-Monro adaptation of log step sizes during burn-in.
  std::size_t adapt_window = 500;
  double adapt_gain = 10.0;
  double adapt_exponent = 0.6;

  /// False freezes the O block at its initial value.
  bool update_O = true;
  /// Keep thinned iterates from the burn-in phase.
  bool record_burnin = true;
  /// Starting point shared by every chain instead of the random
  /// perturbation of (1, 0). Must be feasible.
  std::optional<Theta> initial_theta;

  /// Throws ConfigError.
  void validate() const;
  std::string label() const;
};

/// Operators shared by every chain on a given problem.
struct SamplerOperators {
  SecondDiffOp D;
  AugmentedDiffOp dbar;
  std::array<DecimatedDiffOp, 3> decimated;

  static SamplerOperators build(std::size_t T, Covariance covariance);
};

struct BlockTally {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  std::uint64_t window_proposed = 0;
  std::uint64_t window_accepted = 0;

  void record(bool accept);
  double window_rate() const;
  double rate() const;
  void reset_window();
};

struct ChainState {
  Theta theta;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  Philox4x32 rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  BlockTally tally_R;  // joint tally under the MH scheme
  BlockTally tally_O;
  /// Number of completed adaptation windows.
  std::size_t adapt_round = 0;
};

struct ChainTrace {
  std::size_t T = 0;
  std::size_t n_max = 0;
  std::size_t n_burnin = 0;
  std::size_t thinning = 1;
  /// Post-burn-in samples, one row of 2T values (R then O) per stored iterate.
  std::vector<double> samples;
  /// Thinned iterates during burn-in, same row layout as `samples`.
  std::vector<double> burnin_samples;
  /// Per adaptation window over the whole run.
  std::vector<double> acceptance_R;
  std::vector<double> acceptance_O;
  std::vector<double> gamma1_history;
  std::vector<double> gamma2_history;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double post_burnin_acceptance_R = 0.0;
  double post_burnin_acceptance_O = 0.0;

  std::size_t count() const { return T == 0 ? 0 : samples.size() / (2 * T); }
  std::span<const double> R(std::size_t k) const {
    return std::span<const double>(samples).subspan(2 * T * k, T);
  }
  std::span<const double> O(std::size_t k) const {
    return std::span<const double>(samples).subspan(2 * T * k + T, T);
  }
  std::size_t burnin_count() const { return T == 0 ? 0 : burnin_samples.size() / (2 * T); }
  std::span<const double> burnin_R(std::size_t k) const {
    return std::span<const double>(burnin_samples).subspan(2 * T * k, T);
  }
};

// ---------------------------------------------------------------- drifts

Theta drift_rw(const Theta& theta);

/// Proximal-gradient step on f + lambda_R ||A_i R||_1.
std::vector<double> drift_pgdec_R(const Theta& theta, const EpiModel& model, const DecimatedDiffOp& a,
                                  double gamma1);
/// Proximal-gradient step in the coordinates dbar R, penalizing all but the
/// free_rows() leading coordinates.
std::vector<double> drift_pgdual_R(const Theta& theta, const EpiModel& model,
                                   const AugmentedDiffOp& dbar, double gamma1);
/// soft(O - gamma2 grad_O f, gamma2 lambda_O).
std::vector<double> drift_pgdec_O(const Theta& theta, const EpiModel& model, double gamma2);
inline std::vector<double> drift_pgdual_O(const Theta& theta, const EpiModel& model, double gamma2) {
  return drift_pgdec_O(theta, model, gamma2);
}

// ---------------------------------------------------------------- proposals

/// mu + sqrt(2 gamma1) dbar^{-1} eta.
std::vector<double> propose_block_R(std::span<const double> mu, const AugmentedDiffOp& dbar,
                                    double gamma1, ChainState& state);
/// mu + sqrt(2 gamma1) dbar^{-1} eta for a given eta.
std::vector<double> propose_block_R(std::span<const double> mu, const AugmentedDiffOp& dbar,
                                    double gamma1, std::span<const double> eta);
std::vector<double> propose_block_O(std::span<const double> mu, double gamma2, ChainState& state);

struct BlockMeans {
  std::vector<double> R;  // empty when the block is not proposed
  std::vector<double> O;
};

/// log q(theta_half -> theta) - log q(theta -> theta_half), summed over the
/// blocks present in `forward`/`reverse`. Covariances are identical in both
/// directions, so only the quadratic forms enter.
double log_proposal_ratio(const Theta& theta, const Theta& theta_half, const BlockMeans& forward,
                          const BlockMeans& reverse, const AugmentedDiffOp& dbar, double gamma1,
                          double gamma2);

// ---------------------------------------------------------------- kernels

/// Stateful transition kernel. Owns scratch space; one instance per chain.
class ChainKernel {
 public:
  ChainKernel(const EpiModel& model, const SamplerOperators& ops, const SamplerConfig& config);

  /// Algorithm: one joint MH transition (both blocks, one accept).
  void mh_step(ChainState& state);
  /// Systematic-scan Metropolis-within-Gibbs: R block, then O block.
  void gibbs_step(ChainState& state);
  void step(ChainState& state) { config_.scheme == Scheme::MH ? mh_step(state) : gibbs_step(state); }

  /// Resets cached quantities after theta was changed externally.
  void sync(const ChainState& state);
  double current_neg_log_posterior() const { return cur_.nlp; }

 private:
  struct Point {
    std::vector<double> R, O, intens, slope, grad_R;
    double f = 0.0;
    double g_R = 0.0;
    double g_O = 0.0;
    double nlp = 0.0;
  };

  void resize(Point& p) const;
  /// Recomputes intensity, f, g; returns false off the domain.
  bool evaluate(Point& p) const;
  void gradient(Point& p) const;
  void drift_R(const Point& p, int index, double gamma1, std::span<double> out);
  void drift_O(const Point& p, double gamma2, std::span<double> out);
  void noise_R(ChainState& state, double gamma1, std::span<double> out);
  void noise_O(ChainState& state, double gamma2, std::span<double> out);
  double quad_R(std::span<const double> a, std::span<const double> b, double gamma1);
  double quad_O(std::span<const double> a, std::span<const double> b, double gamma2) const;
  int select_index(ChainState& state) const;
  void commit(ChainState& state);

  const EpiModel& model_;
  const SamplerOperators& ops_;
  SamplerConfig config_;
  std::size_t T_;
  Point cur_, prop_;
  std::vector<double> mu_fwd_R_, mu_fwd_O_, mu_rev_R_, mu_rev_O_;
  std::vector<double> s1_, s2_, s3_;
};

struct WindowStats {
  double acceptance_R = 0.0;
  double acceptance_O = 0.0;
};

/// One Robbins-Monro update after a completed window (state.adapt_round is
/// incremented). MH adapts gamma1 and ties gamma2 to it; Gibbs adapts both.
void adapt_step_sizes(ChainState& state, const WindowStats& window, const SamplerConfig& config,
                      const Hyperparams& hyper);

/// Starting step sizes from the data and prior scales.
std::pair<double, double> initial_step_sizes(const EpiModel& model, const SamplerConfig& config);

/// Draws a feasible starting point near R = 1, O = 0.
Theta initial_point(const EpiModel& model, Philox4x32& rng);

/// Runs one chain on stream `chain_index` of config.seed.
ChainTrace run_chain(const EpiModel& model, const SamplerOperators& ops, const SamplerConfig& config,
                     std::uint64_t chain_index = 0);

/// Independent chains 0..n_chains-1, at most `jobs` at a time.
std::vector<ChainTrace> run_chains(const EpiModel& model, const SamplerConfig& config,
                                   std::size_t n_chains, std::size_t jobs = 1);

}  // namespace proxmc
