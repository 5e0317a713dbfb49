// proxmc: ingest -> MAP -> sampling -> report, driven from the command line.
//
// Exit codes: 0 success, 1 unexpected failure, 2 invalid data or options,
// 3 MAP solver divergence, 4 sampler initialization failure, 5 empty traces.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "proxmc/error.hpp"
#include "proxmc/ingest.hpp"
#include "proxmc/kernels.hpp"
#include "proxmc/pipeline.hpp"

namespace fs = std::filesystem;
using namespace proxmc;

namespace {

enum Exit { kOk = 0, kFailure = 1, kData = 2, kDivergence = 3, kInit = 4, kEmpty = 5 };

struct Args {
  std::string data;
  std::string country = "United Kingdom";
  std::string start;
  std::size_t days = 35;
  std::string drift = "pgdual";
  std::string scheme = "gibbs";
  std::string cov = "o";
  std::size_t chains = 15;
  std::size_t iters = 200000;
  std::size_t burnin = 50000;
  std::size_t thin = 10;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  double adapt_gain = SamplerConfig{}.adapt_gain;
  std::string init = "random";
  std::string out_dir = "proxmc-out";
  std::size_t jobs = 0;
  bool quiet = false;
  bool per_chain_bands = false;
};

RunOptions to_options(const Args& a) {
  RunOptions o;
  o.data.csv = a.data.empty() ? default_data_path() : fs::path(a.data);
  o.data.country = a.country;
  if (!a.start.empty()) o.data.start = parse_iso_date(a.start);
  o.data.days = a.days;
  o.sampler.drift = parse_drift(a.drift);
  o.sampler.scheme = parse_scheme(a.scheme);
  o.sampler.covariance = parse_covariance(a.cov);
  o.sampler.n_max = a.iters;
  o.sampler.n_burnin = a.burnin;
  o.sampler.thinning = a.thin;
  o.sampler.seed = a.seed;
  o.sampler.adapt_gain = a.adapt_gain;
  o.sampler.validate();
  o.chains = a.chains;
  o.jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
  o.alpha = a.alpha;
  o.init = parse_init_mode(a.init);
  return o;
}

void say(const Args& a, const std::string& line) {
  if (!a.quiet) std::cout << line << '\n';
}

int run(const std::string& command, const Args& a) {
  const fs::path out = a.out_dir;
  if (command == "report") {
    run_report_stage(out, a.alpha, a.per_chain_bands);
    say(a, "report: wrote bands.csv and diagnostics.csv to " + out.string());
    return kOk;
  }

  const RunOptions opts = to_options(a);
  const CountSeries counts = load_window(opts.data);
  write_window_stage(out, counts);
  say(a, "ingest: " + opts.data.country + " " + format_date(counts.dates.front()) + " .. " +
             format_date(counts.dates.back()) + " (" + std::to_string(counts.size()) + " days)");
  if (command == "ingest") return kOk;

  const EpiModel model = build_model(counts);
  std::optional<MapResult> map;
  if (command == "map" || command == "all") {
    map = run_map_stage(model, out, opts.map);
    say(a, "map: objective " + std::to_string(map->objective_value) + " after " +
               std::to_string(map->iterations) + " iterations" + (map->converged ? "" : " (not converged)"));
    for (const auto& w : map->warnings) std::cerr << "warning: " << w << '\n';
    if (command == "map") return kOk;
  } else if (opts.init == InitMode::Map) {
    map = solve_map(model, build_D(model.size()), opts.map);
  }

  write_run_json(out, opts, counts, command);
  const auto traces = run_sample_stage(model, opts, out, map ? &*map : nullptr);
  double acc = 0.0;
  for (const auto& tr : traces) acc += tr.post_burnin_acceptance_R / static_cast<double>(traces.size());
  say(a, "sample: " + opts.sampler.label() + ", " + std::to_string(traces.size()) + " chains, mean acceptance " +
             std::to_string(acc) + " [" + std::string(kernels::name(kernels::active_isa())) + "]");
  if (command == "sample") return kOk;

  run_report_stage(out, opts.alpha, a.per_chain_bands);
  say(a, "report: wrote bands.csv and diagnostics.csv to " + out.string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal MCMC estimation of the reproduction number and outliers from daily counts"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file (keys are long option names); flags take precedence");

  Args a;
  auto lower = CLI::ignore_case;
  app.add_option("--data", a.data, "JHU confirmed-cases CSV (default: $PROXMC_DATA_DIR/...)");
  app.add_option("--country", a.country, "Country/Region to aggregate")->capture_default_str();
  app.add_option("--start", a.start, "First window day, YYYY-MM-DD (default: latest window)");
  app.add_option("--days", a.days, "Window length T")->capture_default_str()->check(CLI::Range(3, 100000));
  app.add_option("--drift", a.drift, "rw | pgdec | pgdual")
      ->capture_default_str()->check(CLI::IsMember({"rw", "pgdec", "pgdual"}, lower));
  app.add_option("--scheme", a.scheme, "mh | gibbs")
      ->capture_default_str()->check(CLI::IsMember({"mh", "gibbs"}, lower));
  app.add_option("--cov", a.cov, "R-block covariance: i | o")
      ->capture_default_str()->check(CLI::IsMember({"i", "o"}, lower));
  app.add_option("--chains", a.chains, "Independent chains")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--iters", a.iters, "Iterations per chain, burn-in included")->capture_default_str();
  app.add_option("--burnin", a.burnin, "Adaptive burn-in iterations")->capture_default_str();
  app.add_option("--thin", a.thin, "Store every n-th iterate")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", a.seed, "Random seed")->capture_default_str();
  app.add_option("--alpha", a.alpha, "Bands cover 1 - alpha")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  app.add_option("--adapt-gain", a.adapt_gain, "Robbins-Monro gain on log step sizes")->capture_default_str();
  app.add_option("--init", a.init, "random | map")
      ->capture_default_str()->check(CLI::IsMember({"random", "map"}, lower));
  app.add_option("--out-dir", a.out_dir, "Output directory")->capture_default_str();
  app.add_option("--jobs", a.jobs, "Concurrent chains (0: one per core)")->capture_default_str();
  app.add_flag("--quiet,-q", a.quiet, "No progress output");
  app.add_flag("--per-chain-bands", a.per_chain_bands, "Also write bands_chain_<k>.csv for each chain");

  app.add_subcommand("ingest", "Cut the analysis window and write window.csv");
  app.add_subcommand("map", "Compute the MAP estimate (map.csv, map_meta.json)");
  app.add_subcommand("sample", "Run the chains (trace_<k>.bin, acceptance.csv, stepsizes.csv, run.json)");
  app.add_subcommand("report", "Summarize traces in --out-dir (bands.csv, diagnostics.csv)");
  app.add_subcommand("all", "ingest, map, sample and report");

  CLI11_PARSE(app, argc, argv);

  try {
    return run(app.get_subcommands().front()->get_name(), a);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const InitializationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInit;
  } catch (const EmptyInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEmpty;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return kFailure;
  }
}
