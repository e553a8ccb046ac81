#include "cohesion/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "parallel.hpp"

namespace cohesion {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

struct MeanAndError {
  double mean;
  double std_error;
};

MeanAndError summarise(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  if (values.size() < 2) return {mean, 0.0};
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(), [mean](double v) { return (v - mean) * (v - mean); });
  return {mean, std::sqrt(pairwise_sum(sq) / (n - 1.0) / n)};
}

}  // namespace

SpectralStats mc_spectral_stats(const TreeGraph& graph, const VectorXd& omega, const NoiseSpec& noise,
                                std::size_t samples, const RandomStream& stream, unsigned threads) {
  if (samples < 1) throw ConditionsError(ConditionsErrorKind::InvalidArgument, "need at least one sample");
  if (static_cast<std::size_t>(omega.size()) != graph.num_nodes() || noise.size() != graph.num_nodes()) {
    throw ConditionsError(ConditionsErrorKind::InvalidArgument, "omega, noise and graph disagree on node count");
  }
  const MatrixXd b = incidence(graph);

  if (noise.deterministic()) {
    const auto ext = extreme_eigenvalues(weighted_edge_laplacian(b, omega));
    return {ext.min, ext.max, 0.0, 0.0, 1, true};
  }

  const RandomStream draws = stream.with(stream.trial, StreamPurpose::Spectral);
  std::vector<double> mins(samples);
  std::vector<double> maxs(samples);
  detail::parallel_for(samples, threads, [&](std::size_t s) {
    const VectorXd weights = omega + sample_noise(noise, draws, s);
    try {
      const auto ext = extreme_eigenvalues(weighted_edge_laplacian(b, weights));
      mins[s] = ext.min;
      maxs[s] = ext.max;
    } catch (const LinalgError& e) {
      throw LinalgError(e.kind(), "spectral sample " + std::to_string(s) + ": " + e.what());
    }
  });
  const auto lo = summarise(mins);
  const auto hi = summarise(maxs);
  return {lo.mean, hi.mean, lo.std_error, hi.std_error, samples, false};
}

double kappa_lower_bound(double lambda_min, double e_max_delta_omega, double gamma, double tau) {
  const double sg = std::sin(gamma);
  return ((1.0 - sg) * std::numbers::pi / (2.0 * tau) + e_max_delta_omega) / (sg * sg * lambda_min);
}

double tau_upper_bound(double lambda_max, double e_max_delta_omega, double gamma, double kappa) {
  return (1.0 + std::sin(gamma)) * gamma / (kappa * lambda_max + e_max_delta_omega);
}

namespace {

void check_query(const BoundQuery& query, double e_max_delta_omega) {
  if (!(query.tau > 0.0)) throw ConditionsError(ConditionsErrorKind::InvalidArgument, "query tau must be > 0");
  if (!(query.kappa > 0.0)) throw ConditionsError(ConditionsErrorKind::InvalidArgument, "query kappa must be > 0");
  if (!(e_max_delta_omega >= 0.0)) {
    throw ConditionsError(ConditionsErrorKind::InvalidArgument, "E_max|dw| must be >= 0");
  }
}

BoundResult evaluate(double lambda_min, double lambda_max, double e_max_delta_omega, const CohesionParams& cohesion,
                     const BoundQuery& query, Variant variant) {
  BoundResult r;
  r.kappa_min = kappa_lower_bound(lambda_min, e_max_delta_omega, cohesion.gamma(), query.tau);
  r.tau_max = tau_upper_bound(lambda_max, e_max_delta_omega, cohesion.gamma(), query.kappa);
  r.query = query;
  r.gamma = cohesion.gamma();
  r.e_max_delta_omega = e_max_delta_omega;
  r.lambda_min = lambda_min;
  r.lambda_max = lambda_max;
  r.variant = variant;
  return r;
}

}  // namespace

BoundResult bounds_frequency_dependent(const SpectralStats& stats, double e_max_delta_omega,
                                       const CohesionParams& cohesion, const BoundQuery& query) {
  check_query(query, e_max_delta_omega);
  if (!(stats.e_lambda_min > 0.0)) {
    throw ConditionsError(ConditionsErrorKind::HypothesisViolated,
                          "E[lambda_min(B^T W B)] = " + std::to_string(stats.e_lambda_min) +
                              " is not strictly positive; the coupling bound does not apply");
  }
  return evaluate(stats.e_lambda_min, stats.e_lambda_max, e_max_delta_omega, cohesion, query,
                  Variant::FrequencyDependent);
}

BoundResult bounds_undirected(const TreeGraph& graph, double e_max_delta_omega, const CohesionParams& cohesion,
                              const BoundQuery& query) {
  check_query(query, e_max_delta_omega);
  const auto ext = extreme_eigenvalues(edge_laplacian(graph));
  return evaluate(ext.min, ext.max, e_max_delta_omega, cohesion, query, Variant::Undirected);
}

double continuous_reference_kappa(const VectorXd& omega, const TreeGraph& graph, const CohesionParams& cohesion) {
  if (static_cast<std::size_t>(omega.size()) != graph.num_nodes()) {
    throw ConditionsError(ConditionsErrorKind::InvalidArgument, "omega and graph disagree on node count");
  }
  const double spread = omega.maxCoeff() - omega.minCoeff();
  const double lambda_min = extreme_eigenvalues(weighted_edge_laplacian(incidence(graph), omega)).min;
  if (!(lambda_min > 0.0)) {
    throw ConditionsError(ConditionsErrorKind::NonPositiveEigenvalue,
                          "lambda_min(B^T diag(w) B) = " + std::to_string(lambda_min) + " is not positive");
  }
  return spread / (lambda_min * std::sin(cohesion.gamma()));
}

}  // namespace cohesion
