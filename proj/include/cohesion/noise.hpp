#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cohesion/graph.hpp"

namespace cohesion {

enum class NoiseFamily { None, Gaussian, Uniform };

const char* to_string(NoiseFamily family);
std::optional<NoiseFamily> parse_noise_family(const std::string& name);

enum class NoiseErrorKind { InvalidSpec, NegativeVariance, UnsupportedFamily, DimensionMismatch };

class NoiseError : public std::runtime_error {
 public:
  NoiseError(NoiseErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  NoiseErrorKind kind() const noexcept { return kind_; }

 private:
  NoiseErrorKind kind_;
};

/// Disturbance law of one node. Uniform draws are centred on the mean with
/// half-width sqrt(3 * variance).
struct NodeNoise {
  NoiseFamily family = NoiseFamily::None;
  double mean = 0.0;      // rad/s
  double variance = 0.0;  // rad^2/s^2
};

/// Per-node i.i.d. disturbance laws.
class NoiseSpec {
 public:
  NoiseSpec() = default;
  /// Throws NoiseError(InvalidSpec) on a violated invariant.
  explicit NoiseSpec(std::vector<NodeNoise> nodes);

  static NoiseSpec none(std::size_t n);
  static NoiseSpec gaussian(const std::vector<double>& means, const std::vector<double>& variances);

  std::size_t size() const noexcept { return nodes_.size(); }
  const NodeNoise& operator[](std::size_t i) const { return nodes_.at(i); }
  const std::vector<NodeNoise>& nodes() const noexcept { return nodes_; }

  bool deterministic() const noexcept;
  /// True when every node is Gaussian or None.
  bool gaussian_only() const noexcept;

  /// Empty when valid; otherwise one message per violation.
  static std::vector<std::string> violations(const std::vector<NodeNoise>& nodes);

 private:
  std::vector<NodeNoise> nodes_;
};

/// Tags separating the independent random streams of one experiment.
enum class StreamPurpose : std::uint64_t {
  Noise = 1,
  Spectral = 2,
  InitialState = 3,
  DriftProbe = 4,
  DriftNoise = 5,
  PairMonteCarlo = 6,
};

/// Counter-based random stream.
///
/// A draw is a pure hash of (seed, trial, purpose, node, index), so any draw
/// can be regenerated without replaying the ones before it, and concurrent
/// trials never share generator state.
struct RandomStream {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  StreamPurpose purpose = StreamPurpose::Noise;

  RandomStream with(std::uint64_t trial_id, StreamPurpose tag) const { return {seed, trial_id, tag}; }

  std::uint64_t bits(std::uint64_t node, std::uint64_t index) const noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t node, std::uint64_t index) const noexcept;
  /// Standard normal (Box-Muller on counters 2*index and 2*index + 1).
  double normal(std::uint64_t node, std::uint64_t index) const noexcept;
};

/// n_i(k) for every node at step k.
VectorXd sample_noise(const NoiseSpec& spec, const RandomStream& stream, std::uint64_t k);
void sample_noise(const NoiseSpec& spec, const RandomStream& stream, std::uint64_t k, Eigen::Ref<VectorXd> out);

/// E|X| for X ~ Normal(m, s2). Throws NoiseError(NegativeVariance).
double folded_normal_mean(double m, double s2);

enum class PairSet { AllPairs, Edges };

const char* to_string(PairSet pairs);

struct MonteCarloSettings {
  std::size_t samples = 100000;
  RandomStream stream{0, 0, StreamPurpose::PairMonteCarlo};
};

/// max over a pair set of E|(w_i + n_i) - (w_j + n_j)|.
struct DeltaOmegaEstimate {
  double value = 0.0;
  double std_error = 0.0;   // zero for the analytic route
  std::size_t samples = 0;  // zero for the analytic route
  std::pair<std::size_t, std::size_t> argmax{0, 0};
  bool analytic = true;
};

/// Analytic when mc is empty (Gaussian/None only, otherwise UnsupportedFamily);
/// Monte Carlo otherwise.
DeltaOmegaEstimate e_max_delta_omega(const VectorXd& omega, const NoiseSpec& spec, const TreeGraph& graph,
                                     PairSet pairs = PairSet::AllPairs,
                                     const std::optional<MonteCarloSettings>& mc = std::nullopt);

}  // namespace cohesion
