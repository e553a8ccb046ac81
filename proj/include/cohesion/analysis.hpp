#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cohesion/dynamics.hpp"
#include "cohesion/noise.hpp"

namespace cohesion {

enum class AnalysisErrorKind { InvalidArgument, InvalidInitSampler };

class AnalysisError : public std::runtime_error {
 public:
  AnalysisError(AnalysisErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  AnalysisErrorKind kind() const noexcept { return kind_; }

 private:
  AnalysisErrorKind kind_;
};

/// Edge distance at which a trajectory counts as having left the set
/// {all edge distances <= pi/2}.
inline constexpr double kEscapeThreshold = kHalfPi - 1e-9;

struct TrajectoryRow {
  std::uint64_t k = 0;
  VectorXd theta;
  VectorXd edge_distance;  // geodesic, per edge
  double max_distance = 0.0;
  double V = 0.0;
  bool in_set = false;
  VectorXd frequency;  // w_i + n_i(k), the rates driving step k -> k + 1
};

struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint64_t horizon = 0;
  std::size_t decimation = 1;
};

/// Iterates the model for `horizon` steps with fresh noise each step and
/// records every `decimation`-th row plus the last one. With
/// decimation 1 the record has horizon + 1 rows.
TrajectoryRecord simulate(const NetworkModel& model, const PhaseState& theta0, std::uint64_t horizon,
                          const CohesionParams& cohesion, const RandomStream& stream, std::size_t decimation = 1);

/// Distribution of initial states over edge-difference coordinates, lifted
/// to node phases with node 0 pinned at 0.
class InitialStateSampler {
 public:
  enum class Kind {
    Fixed,            // one explicit state for every trial
    UniformOmega,     // each edge difference uniform on [-pi/2, pi/2]
    OutsideCohesion,  // |edge difference| uniform on [lower, pi/2), random sign
  };

  static InitialStateSampler fixed(VectorXd theta);
  static InitialStateSampler uniform_omega();
  static InitialStateSampler outside_cohesion(double lower);

  Kind kind() const noexcept { return kind_; }
  double lower() const noexcept { return lower_; }
  const VectorXd& theta() const noexcept { return theta_; }

  /// Draws come from `stream` as given; edge e uses node coordinate e.
  VectorXd sample(const TreeGraph& graph, const RandomStream& stream) const;

 private:
  InitialStateSampler(Kind kind, double lower, VectorXd theta)
      : kind_(kind), lower_(lower), theta_(std::move(theta)) {}
  Kind kind_;
  double lower_;
  VectorXd theta_;
};

const char* to_string(InitialStateSampler::Kind kind);

struct TrialOutcome {
  std::uint64_t trial = 0;
  bool started_in_set = false;
  double initial_distance = 0.0;
  std::optional<std::uint64_t> return_time;  // first k >= 1 inside S(gamma)
  std::optional<std::uint64_t> escape_step;  // first k >= 1 at or past kEscapeThreshold
  double max_excursion = 0.0;                // max over k >= 0 of the largest edge distance
};

struct RecurrenceStats {
  std::size_t trials = 0;
  double return_fraction = 0.0;
  double escaped_fraction = 0.0;
  std::vector<std::uint64_t> return_times;  // one per returned trial, trial order
  std::vector<double> max_excursion;        // one per trial
  std::vector<TrialOutcome> outcomes;
};

/// Runs `trials` independent trajectories (trial t uses stream coordinate t)
/// and records first-return times to S(gamma). Results do not depend on the
/// thread count. Throws AnalysisError(InvalidInitSampler) when a sampled
/// initial state has an edge distance above pi/2.
RecurrenceStats recurrence_experiment(const NetworkModel& model, const InitialStateSampler& sampler,
                                      const CohesionParams& cohesion, std::size_t trials, std::uint64_t horizon,
                                      const RandomStream& stream, unsigned threads = 1);

/// Monte Carlo estimate of E[V(theta(k+1)) | theta(k)] - V(theta(k)).
struct DriftEstimate {
  VectorXd theta;
  double v_current = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;

  bool negative_at(double z) const { return estimate + z * std_error < 0.0; }
  bool non_negative_at(double z) const { return estimate - z * std_error >= 0.0; }
};

/// Noise draws use the DriftNoise purpose of stream.trial. Needs N >= 2.
DriftEstimate drift_estimate(const NetworkModel& model, const PhaseState& state, const CohesionParams& cohesion,
                             std::size_t noise_samples, const RandomStream& stream);

/// Probes n_states states with every edge distance in [gamma, pi/2). Probe p
/// uses stream coordinate p.
std::vector<DriftEstimate> drift_sweep(const NetworkModel& model, const CohesionParams& cohesion, std::size_t n_states,
                                       std::size_t noise_samples, const RandomStream& stream, unsigned threads = 1);

struct DriftSweepSummary {
  std::size_t probes = 0;
  double min_estimate = 0.0;
  double max_estimate = 0.0;
  double worst_std_error = 0.0;
  std::size_t negative_3se = 0;
  std::size_t non_negative_3se = 0;
};

DriftSweepSummary summarise(const std::vector<DriftEstimate>& probes);

}  // namespace cohesion
