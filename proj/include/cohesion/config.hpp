#pragma once

// Experiment configuration: a strict JSON document, validated in full at load.
// The schema is documented in README.md.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cohesion/analysis.hpp"
#include "cohesion/dynamics.hpp"
#include "cohesion/graph.hpp"
#include "cohesion/noise.hpp"

namespace cohesion {

/// Environment variable consulted for the seed when a config omits one.
inline constexpr const char* kSeedEnvVar = "COHESION_SEED";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : ConfigError(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Violation {
  std::string field;
  std::string message;
};

class ValidationError : public ConfigError {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }
  bool mentions(const std::string& field) const;

 private:
  std::vector<Violation> violations_;
};

struct ExperimentConfig {
  std::string name = "run";
  std::size_t nodes = 0;
  std::vector<Edge> edges;
  std::vector<double> omega;
  std::vector<NodeNoise> noise;
  Variant variant = Variant::FrequencyDependent;
  double kappa = 0.0;
  double tau = 0.0;
  double gamma = kDefaultGamma;
  std::uint64_t horizon = 100000;
  std::size_t trials = 100;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> initial_phases;
  InitialStateSampler::Kind sampler = InitialStateSampler::Kind::UniformOmega;
  PairSet pair_set = PairSet::AllPairs;
  std::size_t drift_states = 100;
  std::size_t drift_noise_samples = 10000;
  unsigned threads = 0;  // 0: hardware concurrency
  std::filesystem::path output_directory = ".";
  std::string output_prefix;  // defaults to name
  std::size_t decimation = 1;

  TreeGraph graph() const;
  VectorXd omega_vector() const;
  NoiseSpec noise_spec() const;
  NetworkModel model() const;
  CohesionParams cohesion() const;
  InitialStateSampler initial_sampler() const;
  RandomStream stream() const { return RandomStream{seed, 0, StreamPurpose::Noise}; }
  unsigned worker_threads() const;

  /// Fully resolved document; load_config on it reproduces this config.
  nlohmann::ordered_json to_json() const;
};

/// Parses and validates. Throws ParseError or ValidationError (listing every violation).
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Reads `path` then parse_config. Throws ConfigError when the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Applies "dotted.key=value" to a parsed document; value is read as JSON,
/// falling back to a plain string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace cohesion
