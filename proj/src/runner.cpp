#include "cohesion/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "cohesion/conditions.hpp"

namespace cohesion {

using ordered_json = nlohmann::ordered_json;

const char* to_string(Command command) {
  switch (command) {
    case Command::Bounds: return "bounds";
    case Command::Spectral: return "spectral";
    case Command::Simulate: return "simulate";
    case Command::Recurrence: return "recurrence";
    case Command::Drift: return "drift";
  }
  return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::Bounds, Command::Spectral, Command::Simulate, Command::Recurrence, Command::Drift}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

int exit_code_for(const std::exception& error) noexcept {
  if (dynamic_cast<const ConfigError*>(&error) != nullptr) return kExitConfig;
  if (dynamic_cast<const IoError*>(&error) != nullptr) return kExitIo;
  if (dynamic_cast<const GraphError*>(&error) != nullptr) return kExitConfig;
  if (dynamic_cast<const ModelError*>(&error) != nullptr) return kExitConfig;
  return kExitNumeric;
}

namespace {

void append_vector(fmt::memory_buffer& buf, const VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) fmt::format_to(std::back_inserter(buf), ",{}", v(i));
}

std::string indexed_header(const std::string& stem, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) out += "," + stem + "_" + std::to_string(i);
  return out;
}

ordered_json provenance_mc(std::size_t samples) { return {{"method", "monte-carlo"}, {"samples", samples}}; }
ordered_json provenance(const char* method) { return {{"method", method}}; }

ordered_json spectral_json(const SpectralStats& s) {
  return {{"e_lambda_min", s.e_lambda_min},
          {"e_lambda_max", s.e_lambda_max},
          {"stderr_min", s.stderr_min},
          {"stderr_max", s.stderr_max},
          {"provenance", s.exact ? provenance("exact") : provenance_mc(s.samples)}};
}

DeltaOmegaEstimate delta_omega_for(const ExperimentConfig& cfg, const NoiseSpec& noise, const TreeGraph& graph) {
  if (noise.gaussian_only()) return e_max_delta_omega(cfg.omega_vector(), noise, graph, cfg.pair_set);
  MonteCarloSettings mc;
  mc.samples = cfg.mc_samples;
  mc.stream = cfg.stream().with(0, StreamPurpose::PairMonteCarlo);
  return e_max_delta_omega(cfg.omega_vector(), noise, graph, cfg.pair_set, mc);
}

ordered_json delta_omega_json(const DeltaOmegaEstimate& d, PairSet pairs) {
  return {{"value", d.value},
          {"std_error", d.std_error},
          {"pair", {d.argmax.first, d.argmax.second}},
          {"pair_set", to_string(pairs)},
          {"provenance", d.analytic ? provenance("analytic") : provenance_mc(d.samples)}};
}

std::filesystem::path data_path(const ExperimentConfig& cfg, const std::string& what) {
  return cfg.output_directory / (cfg.output_prefix + "_" + what);
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer writer) {
  std::error_code ec;
  if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  writer(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

ordered_json run_bounds(const ExperimentConfig& cfg, ordered_json& report) {
  const TreeGraph graph = cfg.graph();
  const NoiseSpec noise = cfg.noise_spec();
  const CohesionParams cohesion = cfg.cohesion();
  const DeltaOmegaEstimate dw = delta_omega_for(cfg, noise, graph);
  report["e_max_delta_omega"] = delta_omega_json(dw, cfg.pair_set);

  const BoundQuery query{cfg.tau, cfg.kappa};
  BoundResult bounds;
  ordered_json spectrum;
  if (cfg.variant == Variant::FrequencyDependent) {
    const SpectralStats stats = mc_spectral_stats(graph, cfg.omega_vector(), noise, cfg.mc_samples,
                                                  cfg.stream().with(0, StreamPurpose::Spectral), cfg.worker_threads());
    report["spectral"] = spectral_json(stats);
    bounds = bounds_frequency_dependent(stats, dw.value, cohesion, query);
    spectrum = {{"source", "E[lambda(B^T W B)]"}, {"provenance", report["spectral"]["provenance"]}};
  } else {
    bounds = bounds_undirected(graph, dw.value, cohesion, query);
    spectrum = {{"source", "lambda(B^T B)"}, {"provenance", provenance("exact")}};
  }

  ordered_json out = {
      {"variant", to_string(bounds.variant)},
      {"gamma", bounds.gamma},
      {"lambda_min", bounds.lambda_min},
      {"lambda_max", bounds.lambda_max},
      {"spectrum", spectrum},
      {"e_max_delta_omega", bounds.e_max_delta_omega},
      {"kappa_min", bounds.kappa_min},
      {"kappa_min_at_tau", bounds.query.tau},
      {"tau_max", bounds.tau_max},
      {"tau_max_at_kappa", bounds.query.kappa},
      {"kappa_condition", fmt::format("kappa > {} (sufficient, at tau = {})", bounds.kappa_min, bounds.query.tau)},
      {"tau_condition", fmt::format("tau < {} (necessary, at kappa = {})", bounds.tau_max, bounds.query.kappa)},
      {"config_kappa_exceeds_bound", cfg.kappa > bounds.kappa_min},
      {"config_tau_below_bound", cfg.tau < bounds.tau_max},
  };

  try {
    const double ref = continuous_reference_kappa(cfg.omega_vector(), graph, cohesion);
    report["continuous_reference_kappa"] = {{"value", ref}, {"provenance", provenance("exact")}};
  } catch (const ConditionsError& e) {
    report["continuous_reference_kappa"] = {{"value", nullptr}, {"reason", e.what()}};
  }
  return out;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record) {
  if (record.rows.empty()) return;
  const std::size_t n = static_cast<std::size_t>(record.rows.front().theta.size());
  const std::size_t m = static_cast<std::size_t>(record.rows.front().edge_distance.size());
  out << "k" << indexed_header("theta", n) << indexed_header("dist", m) << ",max_dist,V,in_set"
      << indexed_header("freq", n) << '\n';
  fmt::memory_buffer buf;
  for (const TrajectoryRow& row : record.rows) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{}", row.k);
    append_vector(buf, row.theta);
    append_vector(buf, row.edge_distance);
    fmt::format_to(std::back_inserter(buf), ",{},{},{}", row.max_distance, row.V, row.in_set ? 1 : 0);
    append_vector(buf, row.frequency);
    buf.push_back('\n');
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

void write_recurrence_csv(std::ostream& out, const RecurrenceStats& stats) {
  out << "trial,started_in_set,initial_distance,returned,return_time,escaped,escape_step,max_excursion\n";
  for (const TrialOutcome& o : stats.outcomes) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", o.trial, o.started_in_set ? 1 : 0, o.initial_distance,
                       o.return_time ? 1 : 0, o.return_time ? fmt::format("{}", *o.return_time) : std::string(),
                       o.escape_step ? 1 : 0, o.escape_step ? fmt::format("{}", *o.escape_step) : std::string(),
                       o.max_excursion);
  }
}

void write_drift_csv(std::ostream& out, const TreeGraph& graph, const std::vector<DriftEstimate>& probes) {
  out << "probe" << indexed_header("theta", graph.num_nodes()) << indexed_header("rel", graph.num_edges())
      << ",V,estimate,std_error,samples,negative_3se\n";
  fmt::memory_buffer buf;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const DriftEstimate& d = probes[p];
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{}", p);
    append_vector(buf, d.theta);
    append_vector(buf, relative_phases(graph, d.theta));
    fmt::format_to(std::back_inserter(buf), ",{},{},{},{},{}\n", d.v_current, d.estimate, d.std_error, d.samples,
                   d.negative_at(3.0) ? 1 : 0);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

RunResult run_subcommand(Command command, const ExperimentConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  RunResult result;
  ordered_json& report = result.report;
  report["version"] = COHESION_VERSION;
  report["command"] = to_string(command);
  report["config"] = cfg.to_json();

  switch (command) {
    case Command::Bounds: {
      report["bounds"] = run_bounds(cfg, report);
      break;
    }
    case Command::Spectral: {
      const SpectralStats stats =
          mc_spectral_stats(cfg.graph(), cfg.omega_vector(), cfg.noise_spec(), cfg.mc_samples,
                            cfg.stream().with(0, StreamPurpose::Spectral), cfg.worker_threads());
      report["spectral"] = spectral_json(stats);
      break;
    }
    case Command::Simulate: {
      const NetworkModel model = cfg.model();
      const VectorXd theta0 = cfg.initial_sampler().sample(model.graph(), cfg.stream().with(0, StreamPurpose::InitialState));
      const TrajectoryRecord record =
          simulate(model, PhaseState{theta0, 0}, cfg.horizon, cfg.cohesion(), cfg.stream().with(0, StreamPurpose::Noise),
                   cfg.decimation);
      const auto path = data_path(cfg, "trajectory.csv");
      write_file(path, [&](std::ostream& out) { write_trajectory_csv(out, record); });
      result.data_files.push_back(path);

      double worst = 0.0;
      std::optional<std::uint64_t> first_exit;
      for (const TrajectoryRow& row : record.rows) {
        worst = std::max(worst, row.max_distance);
        if (!first_exit && row.max_distance >= kEscapeThreshold) first_exit = row.k;
      }
      report["simulate"] = {{"rows", record.rows.size()},
                            {"decimation", record.decimation},
                            {"gamma", record.gamma},
                            {"max_edge_distance", worst},
                            {"final_in_set", record.rows.back().in_set},
                            {"first_recorded_escape_k", first_exit ? ordered_json(*first_exit) : ordered_json(nullptr)},
                            {"provenance", provenance("simulation")}};
      break;
    }
    case Command::Recurrence: {
      const RecurrenceStats stats =
          recurrence_experiment(cfg.model(), cfg.initial_sampler(), cfg.cohesion(), cfg.trials, cfg.horizon,
                                cfg.stream(), cfg.worker_threads());
      const auto path = data_path(cfg, "recurrence.csv");
      write_file(path, [&](std::ostream& out) { write_recurrence_csv(out, stats); });
      result.data_files.push_back(path);

      ordered_json times = ordered_json::object();
      if (!stats.return_times.empty()) {
        std::vector<std::uint64_t> sorted = stats.return_times;
        std::sort(sorted.begin(), sorted.end());
        double mean = 0.0;
        for (auto t : sorted) mean += static_cast<double>(t);
        mean /= static_cast<double>(sorted.size());
        times = {{"min", sorted.front()}, {"median", sorted[sorted.size() / 2]}, {"max", sorted.back()}, {"mean", mean}};
      }
      report["recurrence"] = {{"trials", stats.trials},
                              {"horizon", cfg.horizon},
                              {"gamma", cfg.gamma},
                              {"return_fraction", stats.return_fraction},
                              {"escaped_fraction", stats.escaped_fraction},
                              {"return_time", times},
                              {"max_excursion", stats.max_excursion.empty()
                                                    ? 0.0
                                                    : *std::max_element(stats.max_excursion.begin(),
                                                                        stats.max_excursion.end())},
                              {"provenance", provenance_mc(stats.trials)}};
      break;
    }
    case Command::Drift: {
      const NetworkModel model = cfg.model();
      const auto probes = drift_sweep(model, cfg.cohesion(), cfg.drift_states, cfg.drift_noise_samples, cfg.stream(),
                                      cfg.worker_threads());
      const auto path = data_path(cfg, "drift.csv");
      write_file(path, [&](std::ostream& out) { write_drift_csv(out, model.graph(), probes); });
      result.data_files.push_back(path);

      const DriftSweepSummary s = summarise(probes);
      report["drift"] = {{"probes", s.probes},
                         {"gamma", cfg.gamma},
                         {"min_estimate", s.min_estimate},
                         {"max_estimate", s.max_estimate},
                         {"worst_std_error", s.worst_std_error},
                         {"negative_at_3se", s.negative_3se},
                         {"non_negative_at_3se", s.non_negative_3se},
                         {"provenance", provenance_mc(cfg.drift_noise_samples)}};
      break;
    }
  }

  ordered_json outputs = ordered_json::array();
  for (const auto& p : result.data_files) outputs.push_back(p.string());
  report["data_files"] = outputs;
  report["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  result.summary_path = data_path(cfg, std::string(to_string(command)) + "_summary.json");
  write_file(result.summary_path, [&](std::ostream& out) { out << report.dump(2) << '\n'; });
  return result;
}

}  // namespace cohesion
