#include "proxmc/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <tuple>

#include "proxmc/error.hpp"
#include "proxmc/kernels.hpp"
#include "proxmc/prox.hpp"

namespace proxmc {

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double uniform01(Philox4x32& rng) { return std::generate_canonical<double, 53>(rng); }

AugmentVariant variant_of(Covariance c) {
  return c == Covariance::I ? AugmentVariant::Invert : AugmentVariant::Ortho;
}

// Span-level drift implementations shared by the public wrappers and the
// chain kernel.

void pgdec_R(std::span<const double> R, std::span<const double> grad_R, const DecimatedDiffOp& a,
             double gamma1, double lambda_R, std::span<double> out, std::span<double> step,
             std::span<double> scratch) {
  for (std::size_t t = 0; t < R.size(); ++t) step[t] = R[t] - gamma1 * grad_R[t];
  prox_l1_semiorthogonal(step, a, gamma1 * lambda_R, out, scratch);
}

void pgdual_R(std::span<const double> R, std::span<const double> grad_R, const AugmentedDiffOp& dbar,
              double gamma1, double lambda_R, std::span<double> out, std::span<double> s1,
              std::span<double> s2) {
  dbar.apply(R, s1);
  dbar.solve_transpose(grad_R, s2);
  for (std::size_t t = 0; t < R.size(); ++t) s1[t] -= gamma1 * s2[t];
  prox_l1_partial(s1, gamma1 * lambda_R, dbar.free_rows(), s2);
  dbar.solve(s2, out);
}

void prox_grad_O(std::span<const double> O, std::span<const double> grad_O, double gamma2,
                 double lambda_O, std::span<double> out) {
  for (std::size_t t = 0; t < O.size(); ++t) out[t] = O[t] - gamma2 * grad_O[t];
  kernels::soft_threshold(out, gamma2 * lambda_O, out);
}

double quad_form(std::span<const double> a, std::span<const double> b, const AugmentedDiffOp* dbar,
                 double gamma, std::span<double> s1, std::span<double> s2) {
  for (std::size_t t = 0; t < a.size(); ++t) s1[t] = a[t] - b[t];
  if (dbar == nullptr) return -kernels::sq_norm(s1.first(a.size())) / (4.0 * gamma);
  dbar->apply(s1, s2);
  return -kernels::sq_norm(s2) / (4.0 * gamma);
}

double coupled_gamma2(double gamma1, Drift drift, const Hyperparams& hyper) {
  if (drift == Drift::PGdec) return gamma1;
  const double ratio = hyper.lambda_R / hyper.lambda_O;
  return ratio * ratio * gamma1;
}

}  // namespace

// ---------------------------------------------------------------- enums

std::string to_string(Drift d) {
  switch (d) {
    case Drift::RW: return "rw";
    case Drift::PGdec: return "pgdec";
    case Drift::PGdual: return "pgdual";
  }
  return "?";
}

std::string to_string(Scheme s) { return s == Scheme::MH ? "mh" : "gibbs"; }
std::string to_string(Covariance c) { return c == Covariance::I ? "i" : "o"; }

Drift parse_drift(const std::string& s) {
  const auto v = lower(s);
  if (v == "rw") return Drift::RW;
  if (v == "pgdec") return Drift::PGdec;
  if (v == "pgdual") return Drift::PGdual;
  throw ConfigError("unknown drift '" + s + "' (expected rw, pgdec or pgdual)");
}

Scheme parse_scheme(const std::string& s) {
  const auto v = lower(s);
  if (v == "mh") return Scheme::MH;
  if (v == "gibbs") return Scheme::Gibbs;
  throw ConfigError("unknown scheme '" + s + "' (expected mh or gibbs)");
}

Covariance parse_covariance(const std::string& s) {
  const auto v = lower(s);
  if (v == "i") return Covariance::I;
  if (v == "o") return Covariance::O;
  throw ConfigError("unknown covariance '" + s + "' (expected i or o)");
}

void SamplerConfig::validate() const {
  if (n_burnin > n_max) throw ConfigError("burn-in exceeds the total number of iterations");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
    throw ConfigError("target acceptance must lie in (0, 1)");
  if (thinning == 0) throw ConfigError("thinning must be positive");
  if (adapt_window == 0) throw ConfigError("adaptation window must be positive");
  if (!(initial_gamma1 >= 0.0) || !(initial_gamma2 >= 0.0))
    throw ConfigError("initial step sizes must be nonnegative (0 selects a default)");
  if (!(adapt_gain > 0.0) || !(adapt_exponent > 0.5 && adapt_exponent <= 1.0))
    throw ConfigError("adaptation gain must be positive and its exponent in (0.5, 1]");
}

std::string SamplerConfig::label() const {
  return to_string(scheme) + "-" + to_string(drift) + "-" + to_string(covariance);
}

SamplerOperators SamplerOperators::build(std::size_t T, Covariance covariance) {
  return SamplerOperators{build_D(T), build_augmented(T, variant_of(covariance)),
                          {build_decimated(1, T), build_decimated(2, T), build_decimated(3, T)}};
}

// ---------------------------------------------------------------- tallies

void BlockTally::record(bool accept) {
  ++proposed;
  ++window_proposed;
  if (accept) {
    ++accepted;
    ++window_accepted;
  }
}

double BlockTally::window_rate() const {
  return window_proposed == 0 ? std::nan("")
                              : static_cast<double>(window_accepted) / static_cast<double>(window_proposed);
}

double BlockTally::rate() const {
  return proposed == 0 ? std::nan("") : static_cast<double>(accepted) / static_cast<double>(proposed);
}

void BlockTally::reset_window() {
  window_proposed = 0;
  window_accepted = 0;
}

// ---------------------------------------------------------------- drifts

Theta drift_rw(const Theta& theta) { return theta; }

std::vector<double> drift_pgdec_R(const Theta& theta, const EpiModel& model, const DecimatedDiffOp& a,
                                  double gamma1) {
  const auto grad = grad_f(theta, model);
  const std::size_t T = theta.size();
  std::vector<double> out(T), step(T), scratch(a.rows());
  pgdec_R(theta.R, grad.R, a, gamma1, model.hyper().lambda_R, out, step, scratch);
  return out;
}

std::vector<double> drift_pgdual_R(const Theta& theta, const EpiModel& model,
                                   const AugmentedDiffOp& dbar, double gamma1) {
  const auto grad = grad_f(theta, model);
  const std::size_t T = theta.size();
  std::vector<double> out(T), s1(T), s2(T);
  pgdual_R(theta.R, grad.R, dbar, gamma1, model.hyper().lambda_R, out, s1, s2);
  return out;
}

std::vector<double> drift_pgdec_O(const Theta& theta, const EpiModel& model, double gamma2) {
  const auto grad = grad_f(theta, model);
  std::vector<double> out(theta.size());
  prox_grad_O(theta.O, grad.O, gamma2, model.hyper().lambda_O, out);
  return out;
}

// ---------------------------------------------------------------- proposals

std::vector<double> propose_block_R(std::span<const double> mu, const AugmentedDiffOp& dbar,
                                    double gamma1, std::span<const double> eta) {
  std::vector<double> out(mu.size());
  dbar.solve(eta, out);
  const double scale = std::sqrt(2.0 * gamma1);
  for (std::size_t t = 0; t < mu.size(); ++t) out[t] = mu[t] + scale * out[t];
  return out;
}

std::vector<double> propose_block_R(std::span<const double> mu, const AugmentedDiffOp& dbar,
                                    double gamma1, ChainState& state) {
  std::vector<double> eta(mu.size());
  for (auto& e : eta) e = state.normal(state.rng);
  return propose_block_R(mu, dbar, gamma1, eta);
}

std::vector<double> propose_block_O(std::span<const double> mu, double gamma2, ChainState& state) {
  const double scale = std::sqrt(2.0 * gamma2);
  std::vector<double> out(mu.size());
  for (std::size_t t = 0; t < mu.size(); ++t) out[t] = mu[t] + scale * state.normal(state.rng);
  return out;
}

double log_proposal_ratio(const Theta& theta, const Theta& theta_half, const BlockMeans& forward,
                          const BlockMeans& reverse, const AugmentedDiffOp& dbar, double gamma1,
                          double gamma2) {
  const std::size_t T = theta.size();
  std::vector<double> s1(T), s2(T);
  double out = 0.0;
  if (!forward.R.empty()) {
    out += quad_form(theta.R, reverse.R, &dbar, gamma1, s1, s2);
    out -= quad_form(theta_half.R, forward.R, &dbar, gamma1, s1, s2);
  }
  if (!forward.O.empty()) {
    out += quad_form(theta.O, reverse.O, nullptr, gamma2, s1, s2);
    out -= quad_form(theta_half.O, forward.O, nullptr, gamma2, s1, s2);
  }
  return out;
}

// ---------------------------------------------------------------- kernel

ChainKernel::ChainKernel(const EpiModel& model, const SamplerOperators& ops, const SamplerConfig& config)
    : model_(model), ops_(ops), config_(config), T_(model.size()) {
  if (ops.D.dim() != T_ || ops.dbar.dim() != T_)
    throw ConfigError("operators do not match the problem dimension");
  resize(cur_);
  resize(prop_);
  for (auto* v : {&mu_fwd_R_, &mu_fwd_O_, &mu_rev_R_, &mu_rev_O_, &s1_, &s2_, &s3_}) v->assign(T_, 0.0);
}

void ChainKernel::resize(Point& p) const {
  for (auto* v : {&p.R, &p.O, &p.intens, &p.slope, &p.grad_R}) v->assign(T_, 0.0);
}

bool ChainKernel::evaluate(Point& p) const {
  kernels::intensity(p.R, model_.weighted_past(), p.O, p.intens);
  if (!in_domain(p.R, p.intens, model_.z())) return false;
  p.f = f_data_from_intensity(p.intens, model_.z());
  p.g_R = model_.hyper().lambda_R * ops_.D.l1_of_apply(p.R);
  double l1 = 0.0;
  for (double o : p.O) l1 += std::fabs(o);
  p.g_O = model_.hyper().lambda_O * l1;
  p.nlp = p.f + p.g_R + p.g_O;
  return std::isfinite(p.nlp);
}

void ChainKernel::gradient(Point& p) const { grad_f(p.intens, model_, p.slope, p.grad_R); }

void ChainKernel::drift_R(const Point& p, int index, double gamma1, std::span<double> out) {
  const double lambda_R = model_.hyper().lambda_R;
  switch (config_.drift) {
    case Drift::RW:
      std::copy(p.R.begin(), p.R.end(), out.begin());
      break;
    case Drift::PGdec:
      pgdec_R(p.R, p.grad_R, ops_.decimated[static_cast<std::size_t>(index - 1)], gamma1, lambda_R,
              out, s1_, s2_);
      break;
    case Drift::PGdual:
      pgdual_R(p.R, p.grad_R, ops_.dbar, gamma1, lambda_R, out, s1_, s2_);
      break;
  }
}

void ChainKernel::drift_O(const Point& p, double gamma2, std::span<double> out) {
  if (config_.drift == Drift::RW) {
    std::copy(p.O.begin(), p.O.end(), out.begin());
    return;
  }
  prox_grad_O(p.O, p.slope, gamma2, model_.hyper().lambda_O, out);
}

void ChainKernel::noise_R(ChainState& state, double gamma1, std::span<double> out) {
  for (std::size_t t = 0; t < T_; ++t) s3_[t] = state.normal(state.rng);
  ops_.dbar.solve(s3_, out);
  const double scale = std::sqrt(2.0 * gamma1);
  for (auto& v : out) v *= scale;
}

void ChainKernel::noise_O(ChainState& state, double gamma2, std::span<double> out) {
  const double scale = std::sqrt(2.0 * gamma2);
  for (std::size_t t = 0; t < T_; ++t) out[t] = scale * state.normal(state.rng);
}

double ChainKernel::quad_R(std::span<const double> a, std::span<const double> b, double gamma1) {
  return quad_form(a, b, &ops_.dbar, gamma1, s1_, s2_);
}

double ChainKernel::quad_O(std::span<const double> a, std::span<const double> b, double gamma2) const {
  double s = 0.0;
  for (std::size_t t = 0; t < T_; ++t) {
    const double d = a[t] - b[t];
    s += d * d;
  }
  return -s / (4.0 * gamma2);
}

int ChainKernel::select_index(ChainState& state) const {
  if (config_.drift != Drift::PGdec) return 0;
  return 1 + static_cast<int>(std::min(2.0, std::floor(3.0 * uniform01(state.rng))));
}

void ChainKernel::sync(const ChainState& state) {
  if (state.theta.size() != T_) throw ConfigError("state dimension does not match the model");
  cur_.R = state.theta.R;
  cur_.O = state.theta.O;
  if (!evaluate(cur_)) throw DomainError("chain state is outside the posterior support");
  gradient(cur_);
}

void ChainKernel::commit(ChainState& state) {
  std::swap(cur_, prop_);
  std::copy(cur_.R.begin(), cur_.R.end(), state.theta.R.begin());
  std::copy(cur_.O.begin(), cur_.O.end(), state.theta.O.begin());
}

void ChainKernel::mh_step(ChainState& state) {
  const bool move_O = config_.update_O;
  const double g1 = state.gamma1;
  const double g2 = state.gamma2;

  const int index = select_index(state);
  drift_R(cur_, index, g1, mu_fwd_R_);
  noise_R(state, g1, prop_.R);
  for (std::size_t t = 0; t < T_; ++t) prop_.R[t] += mu_fwd_R_[t];
  if (move_O) {
    drift_O(cur_, g2, mu_fwd_O_);
    noise_O(state, g2, prop_.O);
    for (std::size_t t = 0; t < T_; ++t) prop_.O[t] += mu_fwd_O_[t];
  } else {
    prop_.O = cur_.O;
  }

  bool accept = false;
  if (evaluate(prop_)) {
    gradient(prop_);
    drift_R(prop_, index, g1, mu_rev_R_);
    double log_alpha = cur_.nlp - prop_.nlp + quad_R(cur_.R, mu_rev_R_, g1) -
                       quad_R(prop_.R, mu_fwd_R_, g1);
    if (move_O) {
      drift_O(prop_, g2, mu_rev_O_);
      log_alpha += quad_O(cur_.O, mu_rev_O_, g2) - quad_O(prop_.O, mu_fwd_O_, g2);
    }
    accept = std::log(uniform01(state.rng)) < log_alpha;
  }
  state.tally_R.record(accept);
  if (move_O) state.tally_O.record(accept);
  if (accept) commit(state);
}

void ChainKernel::gibbs_step(ChainState& state) {
  const double g1 = state.gamma1;
  const double g2 = state.gamma2;

  {
    const int index = select_index(state);
    drift_R(cur_, index, g1, mu_fwd_R_);
    noise_R(state, g1, prop_.R);
    for (std::size_t t = 0; t < T_; ++t) prop_.R[t] += mu_fwd_R_[t];
    prop_.O = cur_.O;
    bool accept = false;
    if (evaluate(prop_)) {
      gradient(prop_);
      drift_R(prop_, index, g1, mu_rev_R_);
      const double log_alpha = cur_.nlp - prop_.nlp + quad_R(cur_.R, mu_rev_R_, g1) -
                               quad_R(prop_.R, mu_fwd_R_, g1);
      accept = std::log(uniform01(state.rng)) < log_alpha;
    }
    state.tally_R.record(accept);
    if (accept) commit(state);
  }

  if (!config_.update_O) return;
  {
    drift_O(cur_, g2, mu_fwd_O_);
    noise_O(state, g2, prop_.O);
    for (std::size_t t = 0; t < T_; ++t) prop_.O[t] += mu_fwd_O_[t];
    prop_.R = cur_.R;
    bool accept = false;
    if (evaluate(prop_)) {
      gradient(prop_);
      drift_O(prop_, g2, mu_rev_O_);
      const double log_alpha = cur_.nlp - prop_.nlp + quad_O(cur_.O, mu_rev_O_, g2) -
                               quad_O(prop_.O, mu_fwd_O_, g2);
      accept = std::log(uniform01(state.rng)) < log_alpha;
    }
    state.tally_O.record(accept);
    if (accept) commit(state);
  }
}

// ---------------------------------------------------------------- adaptation

void adapt_step_sizes(ChainState& state, const WindowStats& window, const SamplerConfig& config,
                      const Hyperparams& hyper) {
  ++state.adapt_round;
  const double gain =
      config.adapt_gain * std::pow(static_cast<double>(state.adapt_round), -config.adapt_exponent);
  const double target = config.target_acceptance;
  if (std::isfinite(window.acceptance_R))
    state.gamma1 *= std::exp(gain * (window.acceptance_R - target));
  if (config.scheme == Scheme::MH) {
    state.gamma2 = coupled_gamma2(state.gamma1, config.drift, hyper);
  } else if (std::isfinite(window.acceptance_O)) {
    state.gamma2 *= std::exp(gain * (window.acceptance_O - target));
  }
}

std::pair<double, double> initial_step_sizes(const EpiModel& model, const SamplerConfig& config) {
  const std::size_t T = model.size();
  const auto phiz = model.weighted_past();
  const auto z = model.z();
  const auto& hyper = model.hyper();

  // Largest curvature of the likelihood in the coordinates dbar R, where
  // the R-block noise is isotropic: H = dbar^{-T} diag(Phi^2 / Z) dbar^{-1}.
  const auto dbar = build_augmented(T, variant_of(config.covariance));
  std::vector<double> w(T), v(T, 1.0), a(T), b(T);
  double zmin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < T; ++t) {
    w[t] = phiz[t] * phiz[t] / std::max(z[t], 1.0);
    zmin = std::min(zmin, std::max(z[t], 1.0));
  }
  double lmax = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double n = std::sqrt(kernels::sq_norm(v));
    if (n == 0.0) break;
    for (auto& x : v) x /= n;
    dbar.solve(v, a);
    for (std::size_t t = 0; t < T; ++t) a[t] *= w[t];
    dbar.solve_transpose(a, b);
    const double next = kernels::dot(v, b);
    v.swap(b);
    if (std::fabs(next - lmax) <= 1e-6 * next) {
      lmax = next;
      break;
    }
    lmax = next;
  }
  // Proposals are isotropic in the coordinates dbar R, so the step is set
  // by the stiffer of the likelihood curvature and the Laplace prior scale
  // 1/lambda; the constants put it a few times below the adapted values
  // seen in practice, from where adaptation climbs fastest.
  const double kappa = config.drift == Drift::RW ? 1.0 : 0.3;
  double gamma1 = kappa / (0.1 * lmax + hyper.lambda_R * hyper.lambda_R);
  double gamma2 = 0.5 / (1.0 / zmin + hyper.lambda_O * hyper.lambda_O);
  if (config.initial_gamma1 > 0.0) gamma1 = config.initial_gamma1;
  if (config.initial_gamma2 > 0.0) gamma2 = config.initial_gamma2;
  if (config.scheme == Scheme::MH) gamma2 = coupled_gamma2(gamma1, config.drift, hyper);
  return {gamma1, gamma2};
}

Theta initial_point(const EpiModel& model, Philox4x32& rng) {
  const std::size_t T = model.size();
  Theta theta(T);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (auto& r : theta.R) r = std::max(0.0, 1.0 + 0.1 * (2.0 * uniform01(rng) - 1.0));
    for (auto& o : theta.O) o = 0.1 * (2.0 * uniform01(rng) - 1.0);
    if (in_domain(theta, model)) return theta;
  }
  throw InitializationError("no feasible starting point after 1000 random perturbations");
}

// ---------------------------------------------------------------- drivers

ChainTrace run_chain(const EpiModel& model, const SamplerOperators& ops, const SamplerConfig& config,
                     std::uint64_t chain_index) {
  config.validate();
  const std::size_t T = model.size();

  ChainState state;
  state.rng = Philox4x32(config.seed, chain_index);
  if (config.initial_theta) {
    if (config.initial_theta->size() != T || config.initial_theta->O.size() != T)
      throw ConfigError("initial_theta has the wrong length");
    if (!in_domain(*config.initial_theta, model))
      throw InitializationError("initial_theta is infeasible");
    state.theta = *config.initial_theta;
  } else {
    state.theta = initial_point(model, state.rng);
  }
  std::tie(state.gamma1, state.gamma2) = initial_step_sizes(model, config);

  ChainKernel kernel(model, ops, config);
  kernel.sync(state);

  ChainTrace trace;
  trace.T = T;
  trace.n_max = config.n_max;
  trace.n_burnin = config.n_burnin;
  trace.thinning = config.thinning;
  trace.samples.reserve(2 * T * ((config.n_max - config.n_burnin) / config.thinning));
  if (config.record_burnin) trace.burnin_samples.reserve(2 * T * (config.n_burnin / config.thinning));

  std::uint64_t post_prop_R = 0, post_acc_R = 0, post_prop_O = 0, post_acc_O = 0;
  for (std::size_t n = 0; n < config.n_max; ++n) {
    const bool burnin = n < config.n_burnin;
    if (n == config.n_burnin) {
      post_prop_R = state.tally_R.proposed;
      post_acc_R = state.tally_R.accepted;
      post_prop_O = state.tally_O.proposed;
      post_acc_O = state.tally_O.accepted;
    }
    kernel.step(state);
    assert(in_domain(state.theta, model));

    if (burnin) {
      if (config.record_burnin && (n + 1) % config.thinning == 0) {
        trace.burnin_samples.insert(trace.burnin_samples.end(), state.theta.R.begin(), state.theta.R.end());
        trace.burnin_samples.insert(trace.burnin_samples.end(), state.theta.O.begin(), state.theta.O.end());
      }
    } else if ((n - config.n_burnin + 1) % config.thinning == 0) {
      trace.samples.insert(trace.samples.end(), state.theta.R.begin(), state.theta.R.end());
      trace.samples.insert(trace.samples.end(), state.theta.O.begin(), state.theta.O.end());
    }

    const bool window_end = (n + 1) % config.adapt_window == 0;
    // Windows never straddle the end of burn-in.
    if (window_end || n + 1 == config.n_burnin) {
      const WindowStats stats{state.tally_R.window_rate(), state.tally_O.window_rate()};
      trace.acceptance_R.push_back(stats.acceptance_R);
      trace.acceptance_O.push_back(stats.acceptance_O);
      if (burnin) adapt_step_sizes(state, stats, config, model.hyper());
      trace.gamma1_history.push_back(state.gamma1);
      trace.gamma2_history.push_back(state.gamma2);
      state.tally_R.reset_window();
      state.tally_O.reset_window();
    }
  }
  if (config.n_burnin == config.n_max) {
    post_prop_R = state.tally_R.proposed;
    post_acc_R = state.tally_R.accepted;
    post_prop_O = state.tally_O.proposed;
    post_acc_O = state.tally_O.accepted;
  }

  auto rate = [](std::uint64_t acc, std::uint64_t prop) {
    return prop == 0 ? std::nan("") : static_cast<double>(acc) / static_cast<double>(prop);
  };
  trace.post_burnin_acceptance_R = rate(state.tally_R.accepted - post_acc_R, state.tally_R.proposed - post_prop_R);
  trace.post_burnin_acceptance_O = rate(state.tally_O.accepted - post_acc_O, state.tally_O.proposed - post_prop_O);
  trace.gamma1 = state.gamma1;
  trace.gamma2 = state.gamma2;
  return trace;
}

std::vector<ChainTrace> run_chains(const EpiModel& model, const SamplerConfig& config,
                                   std::size_t n_chains, std::size_t jobs) {
  config.validate();
  const auto ops = SamplerOperators::build(model.size(), config.covariance);
  std::vector<ChainTrace> traces(n_chains);
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n_chains, 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < n_chains; k = next++) {
      try {
        traces[k] = run_chain(model, ops, config, k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_chains;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return traces;
}

}  // namespace proxmc
