#pragma once

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cohesion/graph.hpp"
#include "cohesion/noise.hpp"

namespace cohesion {

/// Coupling law of the network.
///
/// FrequencyDependent: theta_i += tau (w_i + n_i) (1 - kappa sum_j sin(theta_i - theta_j))
/// Undirected:         theta_i += tau (w_i + n_i) - kappa tau sum_j sin(theta_i - theta_j)
enum class Variant { FrequencyDependent, Undirected };

const char* to_string(Variant variant);
std::optional<Variant> parse_variant(const std::string& name);

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NetworkModel {
 public:
  /// Throws ModelError when sizes disagree, tau <= 0 or kappa < 0.
  NetworkModel(TreeGraph graph, VectorXd omega, NoiseSpec noise, double kappa, double tau, Variant variant);

  const TreeGraph& graph() const noexcept { return graph_; }
  const VectorXd& omega() const noexcept { return omega_; }
  const NoiseSpec& noise() const noexcept { return noise_; }
  double kappa() const noexcept { return kappa_; }
  double tau() const noexcept { return tau_; }
  Variant variant() const noexcept { return variant_; }
  std::size_t num_nodes() const noexcept { return graph_.num_nodes(); }

  NetworkModel with_kappa(double kappa) const;
  NetworkModel with_noise(NoiseSpec noise) const;

 private:
  TreeGraph graph_;
  VectorXd omega_;
  NoiseSpec noise_;
  double kappa_;
  double tau_;
  Variant variant_;
};

/// Phases wrapped to (-pi, pi] at step k.
struct PhaseState {
  VectorXd theta;
  std::uint64_t k = 0;

  /// Wraps every entry.
  static PhaseState wrapped(const VectorXd& raw, std::uint64_t k = 0);
};

/// Half-width of the cohesive set S(gamma); 0 < gamma < pi/2.
class CohesionParams {
 public:
  explicit CohesionParams(double gamma);
  static CohesionParams from_margin(double margin) { return CohesionParams(std::numbers::pi / 2 - margin); }
  double gamma() const noexcept { return gamma_; }

 private:
  double gamma_;
};

inline constexpr double kHalfPi = std::numbers::pi / 2;
/// Default cohesion half-width pi/2 - 0.05.
inline constexpr double kDefaultGamma = kHalfPi - 0.05;

/// Wraps to (-pi, pi].
double wrap_angle(double x) noexcept;

/// Shortest arc length between two angles, in [0, pi].
double geodesic_distance(double a, double b) noexcept;

/// One step of the network. noise_draw holds n_i(k).
PhaseState step(const NetworkModel& model, const PhaseState& state, const VectorXd& noise_draw);

/// In-place step; coupling is caller-owned scratch of length n.
void step_in_place(const NetworkModel& model, VectorXd& theta, const VectorXd& noise_draw, VectorXd& coupling);

/// Signed wrapped theta_tail - theta_head per edge, i.e. B^T theta on the circle.
VectorXd relative_phases(const TreeGraph& graph, const VectorXd& theta);
inline VectorXd relative_phases(const TreeGraph& graph, const PhaseState& state) {
  return relative_phases(graph, state.theta);
}

/// Largest geodesic distance across an edge.
double max_relative_geodesic(const TreeGraph& graph, const VectorXd& theta);
inline double max_relative_geodesic(const TreeGraph& graph, const PhaseState& state) {
  return max_relative_geodesic(graph, state.theta);
}

/// Membership in S(gamma): every edge distance <= gamma.
bool in_cohesion_set(const TreeGraph& graph, const PhaseState& state, const CohesionParams& cohesion);

/// V = sin(gamma) * sum over edges of the geodesic edge distance.
double drift_function_V(const TreeGraph& graph, const VectorXd& theta, const CohesionParams& cohesion);
inline double drift_function_V(const TreeGraph& graph, const PhaseState& state, const CohesionParams& cohesion) {
  return drift_function_V(graph, state.theta, cohesion);
}

/// Node phases with theta_0 = 0 whose edge differences theta_tail - theta_head
/// equal the given values, wrapped. Tree edges are free coordinates.
VectorXd lift_edge_differences(const TreeGraph& graph, const VectorXd& edge_differences);

}  // namespace cohesion
