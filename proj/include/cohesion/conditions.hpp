#pragma once

// Coupling and sampling-period conditions for stochastic phase-cohesiveness.
//
// Both network variants share the same pair of open inequalities
//
//   kappa > ((1 - sin g) * pi / (2 tau) + E_max|dw|) / (sin^2 g * lambda_min)
//   tau   < (1 + sin g) * g / (kappa * lambda_max + E_max|dw|)
//
// and differ only in the spectrum used: the expected extreme eigenvalues of
// B^T W(k) B for frequency-dependent coupling, the deterministic spectrum of
// B^T B for the undirected network. The kappa bound is sufficient, the tau
// bound necessary; both are reported as strict inequalities.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "cohesion/dynamics.hpp"
#include "cohesion/graph.hpp"
#include "cohesion/noise.hpp"

namespace cohesion {

enum class ConditionsErrorKind { HypothesisViolated, NonPositiveEigenvalue, InvalidArgument };

class ConditionsError : public std::runtime_error {
 public:
  ConditionsError(ConditionsErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ConditionsErrorKind kind() const noexcept { return kind_; }

 private:
  ConditionsErrorKind kind_;
};

/// Monte Carlo estimates of E[lambda_min] and E[lambda_max] of B^T W B.
struct SpectralStats {
  double e_lambda_min = 0.0;
  double e_lambda_max = 0.0;
  double stderr_min = 0.0;
  double stderr_max = 0.0;
  std::size_t samples = 0;
  bool exact = false;  // noise-free: a single deterministic evaluation
};

/// Draws N realisations of diag(w + n) and averages the extreme eigenvalues.
/// Sample s uses draw index s of the stream, so the result does not depend
/// on the thread count.
SpectralStats mc_spectral_stats(const TreeGraph& graph, const VectorXd& omega, const NoiseSpec& noise,
                                std::size_t samples, const RandomStream& stream, unsigned threads = 1);

/// Sum with pairwise (cascade) reduction.
double pairwise_sum(std::span<const double> values);

/// tau for the kappa bound, kappa for the tau bound.
struct BoundQuery {
  double tau = 0.0;
  double kappa = 0.0;
};

struct BoundResult {
  double kappa_min = 0.0;  // kappa must exceed this at query.tau
  double tau_max = 0.0;    // tau must stay below this at query.kappa
  BoundQuery query;
  double gamma = 0.0;
  double e_max_delta_omega = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Variant variant = Variant::FrequencyDependent;
};

double kappa_lower_bound(double lambda_min, double e_max_delta_omega, double gamma, double tau);
double tau_upper_bound(double lambda_max, double e_max_delta_omega, double gamma, double kappa);

/// Throws ConditionsError(HypothesisViolated) when stats.e_lambda_min <= 0.
BoundResult bounds_frequency_dependent(const SpectralStats& stats, double e_max_delta_omega,
                                       const CohesionParams& cohesion, const BoundQuery& query);

BoundResult bounds_undirected(const TreeGraph& graph, double e_max_delta_omega, const CohesionParams& cohesion,
                              const BoundQuery& query);

/// Continuous-time noise-free reference |w_max - w_min| / (lambda_min(B^T diag(w) B) sin g).
/// Throws ConditionsError(NonPositiveEigenvalue).
double continuous_reference_kappa(const VectorXd& omega, const TreeGraph& graph, const CohesionParams& cohesion);

}  // namespace cohesion
