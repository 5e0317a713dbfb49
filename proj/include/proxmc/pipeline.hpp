#pragma once

// End-to-end stages shared by the command-line tool and the acceptance
// suite: ingest -> MAP -> sampling -> report. Every stage reads and writes
// plain files in one output directory; all outputs are deterministic
// functions of the data file and the options.
//
//   window.csv      date,count,role
//   map.csv         date,R_map,O_map,intensity
//   map_meta.json   objective, iterations, uniqueness verdict
//   trace_<k>.bin   post-burn-in samples of chain k (see trace_io.hpp)
//   burnin_<k>.bin  thinned burn-in iterates of chain k
//   acceptance.csv  chain,window,iteration,phase,acceptance_R,acceptance_O
//   stepsizes.csv   chain,window,iteration,gamma1,gamma2
//   run.json        options needed to reproduce the outputs
//   bands.csv       date,Z,ZD_lo,ZD_med,ZD_hi,R_lo,R_med,R_hi,O_lo,O_med,O_hi
//   diagnostics.csv kind,x,acf,gr,dist_map
//   bands_chain_<k>.csv  per-chain R and O bands (optional)

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "proxmc/estimators.hpp"
#include "proxmc/map_solver.hpp"
#include "proxmc/model.hpp"
#include "proxmc/samplers.hpp"

namespace proxmc {

struct DataOptions {
  std::filesystem::path csv;
  std::string country = "United Kingdom";
  /// First day of the analysis window; the latest admissible window when
  /// unset.
  std::optional<Date> start;
  std::size_t days = 35;
  std::size_t tau = 26;
};

enum class InitMode { Random, Map };

std::string to_string(InitMode m);
InitMode parse_init_mode(const std::string& s);

struct RunOptions {
  DataOptions data;
  SamplerConfig sampler;
  std::size_t chains = 15;
  /// Concurrent chains; does not affect any output.
  std::size_t jobs = 1;
  double alpha = 0.05;
  MapOptions map;
  InitMode init = InitMode::Random;
};

/// $PROXMC_DATA_DIR (or ./data) joined with the JHU file name, falling back
/// to the bundled synthetic fixture name when only that one exists.
std::filesystem::path default_data_path();

/// Reads the JHU file and cuts the window. Throws the ingest errors.
CountSeries load_window(const DataOptions& data);
/// Window counts with the default serial interval and lambda_defaults.
EpiModel build_model(const CountSeries& counts);

void write_window_stage(const std::filesystem::path& out_dir, const CountSeries& counts);
MapResult run_map_stage(const EpiModel& model, const std::filesystem::path& out_dir,
                        const MapOptions& options = {});
/// Runs the chains and writes traces, acceptance and step-size logs. Needs
/// `map` when options.init is InitMode::Map.
std::vector<ChainTrace> run_sample_stage(const EpiModel& model, const RunOptions& options,
                                         const std::filesystem::path& out_dir,
                                         const MapResult* map = nullptr);
/// Reads window.csv, run.json, map.csv (optional) and the traces from
/// `out_dir`; writes bands.csv and diagnostics.csv. Throws EmptyInputError
/// when no samples are found. `per_chain_bands` adds bands_chain_<k>.csv
/// (date,R_lo,R_med,R_hi,O_lo,O_med,O_hi) from each chain alone.
void run_report_stage(const std::filesystem::path& out_dir, double alpha, bool per_chain_bands = false);

void write_run_json(const std::filesystem::path& out_dir, const RunOptions& options,
                    const CountSeries& counts, const std::string& command);

/// Loads trace_<k>.bin (and burnin_<k>.bin when present) for k = 0, 1, ...
std::vector<ChainTrace> read_traces(const std::filesystem::path& out_dir, std::size_t thinning,
                                    std::size_t n_burnin);

/// Lags (in stored samples) 1, 2, 5, 10, 20, 50, ... below `count`.
std::vector<std::size_t> acf_lags(std::size_t count);

}  // namespace proxmc
