#include "cohesion/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cohesion/conditions.hpp"
#include "parallel.hpp"

namespace cohesion {

const char* to_string(InitialStateSampler::Kind kind) {
  switch (kind) {
    case InitialStateSampler::Kind::Fixed: return "fixed";
    case InitialStateSampler::Kind::UniformOmega: return "uniform_omega";
    case InitialStateSampler::Kind::OutsideCohesion: return "outside_cohesion";
  }
  return "unknown";
}

namespace {

TrajectoryRow make_row(const NetworkModel& model, const VectorXd& theta, std::uint64_t k,
                       const CohesionParams& cohesion, const VectorXd& noise_draw) {
  const TreeGraph& g = model.graph();
  TrajectoryRow row;
  row.k = k;
  row.theta = theta;
  row.edge_distance = relative_phases(g, theta).cwiseAbs();
  row.max_distance = row.edge_distance.size() > 0 ? row.edge_distance.maxCoeff() : 0.0;
  row.V = drift_function_V(g, theta, cohesion);
  row.in_set = row.max_distance <= cohesion.gamma();
  row.frequency = model.omega() + noise_draw;
  return row;
}

}  // namespace

TrajectoryRecord simulate(const NetworkModel& model, const PhaseState& theta0, std::uint64_t horizon,
                          const CohesionParams& cohesion, const RandomStream& stream, std::size_t decimation) {
  if (horizon < 1) throw AnalysisError(AnalysisErrorKind::InvalidArgument, "horizon must be >= 1");
  if (decimation < 1) throw AnalysisError(AnalysisErrorKind::InvalidArgument, "decimation must be >= 1");
  const auto n = Eigen::Index(model.num_nodes());
  if (theta0.theta.size() != n) {
    throw AnalysisError(AnalysisErrorKind::InvalidArgument, "initial state has the wrong number of phases");
  }

  TrajectoryRecord record;
  record.gamma = cohesion.gamma();
  record.seed = stream.seed;
  record.trial = stream.trial;
  record.horizon = horizon;
  record.decimation = decimation;
  record.rows.reserve(horizon / decimation + 2);

  const RandomStream noise_stream = stream.with(stream.trial, StreamPurpose::Noise);
  VectorXd theta = PhaseState::wrapped(theta0.theta).theta;
  VectorXd draw(n);
  VectorXd coupling(n);
  for (std::uint64_t k = 0;; ++k) {
    sample_noise(model.noise(), noise_stream, k, draw);
    if (k % decimation == 0 || k == horizon) record.rows.push_back(make_row(model, theta, k, cohesion, draw));
    if (k == horizon) break;
    step_in_place(model, theta, draw, coupling);
  }
  return record;
}

InitialStateSampler InitialStateSampler::fixed(VectorXd theta) { return {Kind::Fixed, 0.0, std::move(theta)}; }

InitialStateSampler InitialStateSampler::uniform_omega() { return {Kind::UniformOmega, 0.0, VectorXd()}; }

InitialStateSampler InitialStateSampler::outside_cohesion(double lower) {
  if (!(lower >= 0.0 && lower < kHalfPi)) {
    throw AnalysisError(AnalysisErrorKind::InvalidArgument, "outside_cohesion lower bound must lie in [0, pi/2)");
  }
  return {Kind::OutsideCohesion, lower, VectorXd()};
}

VectorXd InitialStateSampler::sample(const TreeGraph& graph, const RandomStream& stream) const {
  if (kind_ == Kind::Fixed) {
    if (static_cast<std::size_t>(theta_.size()) != graph.num_nodes()) {
      throw AnalysisError(AnalysisErrorKind::InvalidInitSampler, "fixed initial state has the wrong length");
    }
    return PhaseState::wrapped(theta_).theta;
  }
  VectorXd diffs(Eigen::Index(graph.num_edges()));
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const double u = stream.uniform(e, 0);
    double d;
    if (kind_ == Kind::UniformOmega) {
      d = -kHalfPi + std::numbers::pi * u;
    } else {
      d = lower_ + (kHalfPi - lower_) * u;
      if (stream.uniform(e, 1) < 0.5) d = -d;
    }
    diffs(Eigen::Index(e)) = d;
  }
  return lift_edge_differences(graph, diffs);
}

namespace {

TrialOutcome run_trial(const NetworkModel& model, const InitialStateSampler& sampler, const CohesionParams& cohesion,
                       std::uint64_t horizon, const RandomStream& base, std::uint64_t trial) {
  const TreeGraph& g = model.graph();
  VectorXd theta = sampler.sample(g, base.with(trial, StreamPurpose::InitialState));
  TrialOutcome out;
  out.trial = trial;
  out.initial_distance = max_relative_geodesic(g, theta);
  if (out.initial_distance > kHalfPi + 1e-12) {
    throw AnalysisError(AnalysisErrorKind::InvalidInitSampler,
                        "trial " + std::to_string(trial) + ": initial edge distance " +
                            std::to_string(out.initial_distance) + " exceeds pi/2");
  }
  out.started_in_set = out.initial_distance <= cohesion.gamma();
  out.max_excursion = out.initial_distance;

  const RandomStream noise_stream = base.with(trial, StreamPurpose::Noise);
  const auto n = Eigen::Index(model.num_nodes());
  VectorXd draw(n);
  VectorXd coupling(n);
  for (std::uint64_t k = 1; k <= horizon; ++k) {
    sample_noise(model.noise(), noise_stream, k - 1, draw);
    step_in_place(model, theta, draw, coupling);
    const double d = max_relative_geodesic(g, theta);
    out.max_excursion = std::max(out.max_excursion, d);
    if (!out.return_time && d <= cohesion.gamma()) out.return_time = k;
    if (!out.escape_step && d >= kEscapeThreshold) out.escape_step = k;
  }
  return out;
}

}  // namespace

RecurrenceStats recurrence_experiment(const NetworkModel& model, const InitialStateSampler& sampler,
                                      const CohesionParams& cohesion, std::size_t trials, std::uint64_t horizon,
                                      const RandomStream& stream, unsigned threads) {
  if (horizon < 1) throw AnalysisError(AnalysisErrorKind::InvalidArgument, "horizon must be >= 1");
  RecurrenceStats stats;
  stats.trials = trials;
  stats.outcomes.resize(trials);
  detail::parallel_for(trials, threads, [&](std::size_t t) {
    stats.outcomes[t] = run_trial(model, sampler, cohesion, horizon, stream, t);
  });

  std::size_t returned = 0;
  std::size_t escaped = 0;
  for (const TrialOutcome& o : stats.outcomes) {
    if (o.return_time) {
      ++returned;
      stats.return_times.push_back(*o.return_time);
    }
    if (o.escape_step) ++escaped;
    stats.max_excursion.push_back(o.max_excursion);
  }
  if (trials > 0) {
    stats.return_fraction = static_cast<double>(returned) / static_cast<double>(trials);
    stats.escaped_fraction = static_cast<double>(escaped) / static_cast<double>(trials);
  }
  return stats;
}

DriftEstimate drift_estimate(const NetworkModel& model, const PhaseState& state, const CohesionParams& cohesion,
                             std::size_t noise_samples, const RandomStream& stream) {
  if (noise_samples < 2) throw AnalysisError(AnalysisErrorKind::InvalidArgument, "drift needs at least 2 samples");
  const TreeGraph& g = model.graph();
  const auto n = Eigen::Index(model.num_nodes());
  if (state.theta.size() != n) {
    throw AnalysisError(AnalysisErrorKind::InvalidArgument, "probe state has the wrong number of phases");
  }
  DriftEstimate out;
  out.theta = state.theta;
  out.v_current = drift_function_V(g, state.theta, cohesion);
  out.samples = noise_samples;

  VectorXd draw = VectorXd::Zero(n);
  VectorXd coupling(n);
  if (model.noise().deterministic()) {
    VectorXd next = state.theta;
    step_in_place(model, next, draw, coupling);
    out.estimate = drift_function_V(g, next, cohesion) - out.v_current;
    return out;
  }

  const RandomStream noise_stream = stream.with(stream.trial, StreamPurpose::DriftNoise);
  std::vector<double> increments(noise_samples);
  for (std::size_t j = 0; j < noise_samples; ++j) {
    sample_noise(model.noise(), noise_stream, j, draw);
    VectorXd next = state.theta;
    step_in_place(model, next, draw, coupling);
    increments[j] = drift_function_V(g, next, cohesion) - out.v_current;
  }
  const double count = static_cast<double>(noise_samples);
  out.estimate = pairwise_sum(increments) / count;
  for (double& x : increments) x = (x - out.estimate) * (x - out.estimate);
  out.std_error = std::sqrt(pairwise_sum(increments) / (count - 1.0) / count);
  return out;
}

std::vector<DriftEstimate> drift_sweep(const NetworkModel& model, const CohesionParams& cohesion, std::size_t n_states,
                                       std::size_t noise_samples, const RandomStream& stream, unsigned threads) {
  std::vector<DriftEstimate> probes(n_states);
  const InitialStateSampler region = InitialStateSampler::outside_cohesion(cohesion.gamma());
  detail::parallel_for(n_states, threads, [&](std::size_t p) {
    const PhaseState state{region.sample(model.graph(), stream.with(p, StreamPurpose::DriftProbe)), 0};
    probes[p] = drift_estimate(model, state, cohesion, noise_samples, stream.with(p, StreamPurpose::DriftNoise));
  });
  return probes;
}

DriftSweepSummary summarise(const std::vector<DriftEstimate>& probes) {
  DriftSweepSummary s;
  s.probes = probes.size();
  if (probes.empty()) return s;
  s.min_estimate = std::numeric_limits<double>::infinity();
  s.max_estimate = -std::numeric_limits<double>::infinity();
  for (const DriftEstimate& p : probes) {
    s.min_estimate = std::min(s.min_estimate, p.estimate);
    s.max_estimate = std::max(s.max_estimate, p.estimate);
    s.worst_std_error = std::max(s.worst_std_error, p.std_error);
    if (p.negative_at(3.0)) ++s.negative_3se;
    if (p.non_negative_at(3.0)) ++s.non_negative_3se;
  }
  return s;
}

}  // namespace cohesion
