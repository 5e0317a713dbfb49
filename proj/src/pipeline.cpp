#include "proxmc/pipeline.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <sstream>

#include "proxmc/diagnostics.hpp"
#include "proxmc/error.hpp"
#include "proxmc/ingest.hpp"
#include "proxmc/trace_io.hpp"

namespace proxmc {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Shortest representation that round-trips.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

ordered_json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

double parse_number(const std::string& s, const fs::path& path, std::size_t line) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw ParseError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

ordered_json sampler_json(const SamplerConfig& c) {
  ordered_json j;
  j["drift"] = to_string(c.drift);
  j["scheme"] = to_string(c.scheme);
  j["covariance"] = to_string(c.covariance);
  j["n_max"] = c.n_max;
  j["n_burnin"] = c.n_burnin;
  j["target_acceptance"] = c.target_acceptance;
  j["seed"] = c.seed;
  j["thinning"] = c.thinning;
  j["initial_gamma1"] = c.initial_gamma1;
  j["initial_gamma2"] = c.initial_gamma2;
  j["adapt_window"] = c.adapt_window;
  j["adapt_gain"] = c.adapt_gain;
  j["adapt_exponent"] = c.adapt_exponent;
  j["update_O"] = c.update_O;
  return j;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  return sorted_quantile(v, 0.5);
}

std::vector<double> read_map_R(const fs::path& path, std::size_t T) {
  std::ifstream in(path);
  if (!in) return {};
  const auto table = read_csv(in);
  if (table.rows.empty() || table.rows[0].size() < 2 || table.rows[0][1] != "R_map")
    throw ParseError(path.string() + ": unexpected header");
  std::vector<double> r;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (table.rows[i].size() < 2) throw ParseError(path.string() + ": short row");
    r.push_back(parse_number(table.rows[i][1], path, table.line[i]));
  }
  if (r.size() != T) throw ParseError(path.string() + ": length does not match the window");
  return r;
}

}  // namespace

std::string to_string(InitMode m) { return m == InitMode::Map ? "map" : "random"; }

InitMode parse_init_mode(const std::string& s) {
  if (s == "random") return InitMode::Random;
  if (s == "map") return InitMode::Map;
  throw ConfigError("unknown init mode '" + s + "' (expected random or map)");
}

fs::path default_data_path() {
  const char* env = std::getenv("PROXMC_DATA_DIR");
  const fs::path dir = env && *env ? fs::path(env) : fs::path("data");
  const fs::path jhu = dir / "time_series_covid19_confirmed_global.csv";
  const fs::path fixture = dir / "jhu_confirmed_synthetic.csv";
  if (!fs::exists(jhu) && fs::exists(fixture)) return fixture;
  return jhu;
}

CountSeries load_window(const DataOptions& data) {
  if (!fs::exists(data.csv)) throw ParseError("data file not found: " + data.csv.string());
  const auto daily = to_daily(parse_jhu_csv(data.csv, data.country));
  if (daily.dates.empty()) throw RangeError("no daily counts for " + data.country);
  Date start = data.start ? *data.start
                          : add_days(daily.dates.back(), 1 - static_cast<long>(data.days));
  return window(daily, start, data.days, data.tau);
}

EpiModel build_model(const CountSeries& counts) {
  return EpiModel(counts, build_serial_interval(), lambda_defaults(counts));
}

void write_window_stage(const fs::path& out_dir, const CountSeries& counts) {
  fs::create_directories(out_dir);
  auto out = open_out(out_dir / "window.csv");
  write_window_csv(out, counts);
}

MapResult run_map_stage(const EpiModel& model, const fs::path& out_dir, const MapOptions& options) {
  fs::create_directories(out_dir);
  const auto D = build_D(model.size());
  MapResult map = solve_map(model, D, options);
  const auto report = map_uniqueness_check(map.theta, map.subgrad_R, model, D);
  const auto intens = intensity(map.theta, model);

  auto out = open_out(out_dir / "map.csv");
  out << "date,R_map,O_map,intensity\n";
  for (std::size_t t = 0; t < model.size(); ++t)
    out << format_date(model.counts().dates[t]) << ',' << num(map.theta.R[t]) << ','
        << num(map.theta.O[t]) << ',' << num(intens[t]) << '\n';

  ordered_json meta;
  meta["objective"] = map.objective_value;
  meta["neg_log_posterior"] = neg_log_posterior(map.theta, model, D);
  meta["iterations"] = map.iterations;
  meta["converged"] = map.converged;
  meta["uniqueness"] = to_string(report.verdict);
  meta["active_R"] = report.active_R;
  meta["active_O"] = report.active_O;
  meta["rank"] = report.rank;
  meta["op_norm"] = map.op_norm;
  meta["scale"] = map.scale;
  meta["lambda_R"] = model.hyper().lambda_R;
  meta["lambda_O"] = model.hyper().lambda_O;
  meta["warnings"] = map.warnings;
  write_json(out_dir / "map_meta.json", meta);
  return map;
}

std::vector<ChainTrace> run_sample_stage(const EpiModel& model, const RunOptions& options,
                                         const fs::path& out_dir, const MapResult* map) {
  fs::create_directories(out_dir);
  SamplerConfig config = options.sampler;
  if (options.init == InitMode::Map) {
    if (!map) throw ConfigError("MAP initialization requested without a MAP estimate");
    config.initial_theta = map->theta;
  }
  auto traces = run_chains(model, config, options.chains, options.jobs);

  // Stale files from an earlier run with more chains would be picked up by
  // the report stage.
  for (std::size_t k = traces.size();; ++k) {
    const bool a = fs::remove(out_dir / ("trace_" + std::to_string(k) + ".bin"));
    const bool b = fs::remove(out_dir / ("burnin_" + std::to_string(k) + ".bin"));
    if (!a && !b) break;
  }

  auto acc = open_out(out_dir / "acceptance.csv");
  auto steps = open_out(out_dir / "stepsizes.csv");
  acc << "chain,window,iteration,phase,acceptance_R,acceptance_O\n";
  steps << "chain,window,iteration,gamma1,gamma2\n";
  const auto T = static_cast<std::uint32_t>(model.size());
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& tr = traces[k];
    write_trace(out_dir / ("trace_" + std::to_string(k) + ".bin"), T, tr.samples);
    const auto burn = out_dir / ("burnin_" + std::to_string(k) + ".bin");
    if (tr.burnin_samples.empty())
      fs::remove(burn);
    else
      write_trace(burn, T, tr.burnin_samples);

    // Window boundaries as laid out by run_chain.
    std::size_t w = 0;
    for (std::size_t n = 1; n <= config.n_max && w < tr.acceptance_R.size(); ++n) {
      if (n % config.adapt_window != 0 && n != config.n_burnin) continue;
      const char* phase = n <= config.n_burnin ? "burnin" : "sampling";
      acc << k << ',' << w << ',' << n << ',' << phase << ',' << num(tr.acceptance_R[w]) << ','
          << num(tr.acceptance_O[w]) << '\n';
      steps << k << ',' << w << ',' << n << ',' << num(tr.gamma1_history[w]) << ','
            << num(tr.gamma2_history[w]) << '\n';
      ++w;
    }
  }
  return traces;
}

void write_run_json(const fs::path& out_dir, const RunOptions& options, const CountSeries& counts,
                    const std::string& command) {
  fs::create_directories(out_dir);
  ordered_json j;
  j["format_version"] = 1;
  j["command"] = command;
  j["data"] = {{"csv", options.data.csv.string()},
               {"country", options.data.country},
               {"start", format_date(counts.dates.front())},
               {"days", options.data.days},
               {"tau", options.data.tau}};
  const auto hyper = lambda_defaults(counts);
  j["hyperparameters"] = {{"lambda_R", hyper.lambda_R}, {"lambda_O", hyper.lambda_O}};
  j["sampler"] = sampler_json(options.sampler);
  j["chains"] = options.chains;
  j["init"] = to_string(options.init);
  j["alpha"] = options.alpha;
  j["map"] = {{"max_iters", options.map.max_iters},
              {"tol", options.map.tol},
              {"record_every", options.map.record_every},
              {"step_scale", options.map.step_scale}};
  write_json(out_dir / "run.json", j);
}

std::vector<ChainTrace> read_traces(const fs::path& out_dir, std::size_t thinning, std::size_t n_burnin) {
  std::vector<ChainTrace> traces;
  for (std::size_t k = 0;; ++k) {
    const auto path = out_dir / ("trace_" + std::to_string(k) + ".bin");
    if (!fs::exists(path)) break;
    auto file = read_trace(path);
    ChainTrace tr;
    tr.T = file.T;
    tr.thinning = thinning;
    tr.n_burnin = n_burnin;
    tr.samples = std::move(file.samples);
    const auto burn = out_dir / ("burnin_" + std::to_string(k) + ".bin");
    if (fs::exists(burn)) {
      auto b = read_trace(burn);
      if (b.T != tr.T) throw ParseError(burn.string() + ": dimension differs from the trace");
      tr.burnin_samples = std::move(b.samples);
    }
    tr.n_max = n_burnin + tr.count() * thinning;
    if (!traces.empty() && tr.T != traces.front().T)
      throw ParseError(path.string() + ": dimension differs from trace_0.bin");
    traces.push_back(std::move(tr));
  }
  return traces;
}

std::vector<std::size_t> acf_lags(std::size_t count) {
  std::vector<std::size_t> lags;
  for (std::size_t decade = 1; decade < count; decade *= 10)
    for (std::size_t m : {1, 2, 5})
      if (m * decade < count) lags.push_back(m * decade);
  return lags;
}

void run_report_stage(const fs::path& out_dir, double alpha, bool per_chain_bands) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  std::ifstream win(out_dir / "window.csv");
  if (!win) throw ParseError("missing " + (out_dir / "window.csv").string());
  const CountSeries counts = read_window_csv(win);
  const auto run = read_json(out_dir / "run.json");
  std::size_t thinning = 0, n_burnin = 0;
  try {
    thinning = run.at("sampler").at("thinning").get<std::size_t>();
    n_burnin = run.at("sampler").at("n_burnin").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("run.json: " + std::string(e.what()));
  }

  const auto traces = read_traces(out_dir, thinning, n_burnin);
  if (traces.empty()) throw EmptyInputError("no trace files in " + out_dir.string());
  const std::size_t T = counts.size();
  std::size_t n = traces.front().count();
  for (const auto& tr : traces) {
    if (tr.T != T) throw ParseError("trace dimension does not match window.csv");
    n = std::min(n, tr.count());
  }
  if (n == 0) throw EmptyInputError("trace files hold no samples");

  // ---- bands
  const auto r_band = credibility_band(traces, Target::R, alpha, counts.dates);
  const auto o_band = credibility_band(traces, Target::O, alpha, counts.dates);
  const auto zd_band = denoised_band(counts, o_band);
  {
    auto out = open_out(out_dir / "bands.csv");
    out << "date,Z,ZD_lo,ZD_med,ZD_hi,R_lo,R_med,R_hi,O_lo,O_med,O_hi\n";
    for (std::size_t t = 0; t < T; ++t)
      out << format_date(counts.dates[t]) << ',' << counts.values[t] << ',' << num(zd_band.lower[t])
          << ',' << num(zd_band.median[t]) << ',' << num(zd_band.upper[t]) << ','
          << num(r_band.lower[t]) << ',' << num(r_band.median[t]) << ',' << num(r_band.upper[t])
          << ',' << num(o_band.lower[t]) << ',' << num(o_band.median[t]) << ','
          << num(o_band.upper[t]) << '\n';
  }

  for (std::size_t k = 0;; ++k) {
    const auto path = out_dir / ("bands_chain_" + std::to_string(k) + ".csv");
    if (per_chain_bands && k < traces.size()) {
      const std::span<const ChainTrace> one(&traces[k], 1);
      const auto r = credibility_band(one, Target::R, alpha);
      const auto o = credibility_band(one, Target::O, alpha);
      auto out = open_out(path);
      out << "date,R_lo,R_med,R_hi,O_lo,O_med,O_hi\n";
      for (std::size_t t = 0; t < T; ++t)
        out << format_date(counts.dates[t]) << ',' << num(r.lower[t]) << ',' << num(r.median[t]) << ','
            << num(r.upper[t]) << ',' << num(o.lower[t]) << ',' << num(o.median[t]) << ',' << num(o.upper[t])
            << '\n';
    } else if (!fs::remove(path) && k >= traces.size()) {
      break;
    }
  }

  // ---- diagnostics
  auto out = open_out(out_dir / "diagnostics.csv");
  out << "kind,x,acf,gr,dist_map\n";

  const auto lags = acf_lags(n);
  if (!lags.empty()) {
    std::vector<double> acf(lags.size(), 0.0);
    for (const auto& tr : traces) {
      const auto r = mean_abs_acf(tr, lags);
      for (std::size_t i = 0; i < lags.size(); ++i) acf[i] += r.mean_abs[i] / traces.size();
    }
    for (std::size_t i = 0; i < lags.size(); ++i)
      out << "acf," << lags[i] * thinning << ',' << num(acf[i]) << ",,\n";
  }

  if (traces.size() >= 2 && n >= 2) {
    const std::size_t step = std::max<std::size_t>(2, n / 50);
    std::vector<std::size_t> checkpoints;
    for (std::size_t c = step; c <= n; c += step) checkpoints.push_back(c);
    std::vector<std::span<const double>> rows;
    for (const auto& tr : traces) rows.emplace_back(tr.samples);
    for (std::size_t c : checkpoints) {
      double stat = std::nan("");
      try {
        const auto comp = gelman_rubin_components(rows, 2 * T, c);
        stat = *std::max_element(comp.begin(), comp.end());
      } catch (const DomainError&) {
        // a component did not move within this prefix
      }
      out << "gr," << n_burnin + c * thinning << ",," << num(stat) << ",\n";
    }
  }

  const auto r_map = read_map_R(out_dir / "map.csv", T);
  if (!r_map.empty()) {
    auto emit = [&](const char* kind, auto rows_of, std::size_t count, std::size_t offset) {
      std::vector<std::vector<double>> d;
      for (const auto& tr : traces) d.push_back(distance_to_map(rows_of(tr), r_map, 2 * T));
      for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> v;
        for (const auto& di : d)
          if (i < di.size()) v.push_back(di[i]);
        out << kind << ',' << offset + (i + 1) * thinning << ",,," << num(median_of(v)) << '\n';
      }
    };
    std::size_t nb = 0;
    for (const auto& tr : traces) nb = std::max(nb, tr.burnin_count());
    emit("dist_burnin", [](const ChainTrace& tr) { return std::span<const double>(tr.burnin_samples); },
         nb, 0);
    emit("dist_post", [](const ChainTrace& tr) { return std::span<const double>(tr.samples); }, n,
         n_burnin);
  }
}

}  // namespace proxmc
