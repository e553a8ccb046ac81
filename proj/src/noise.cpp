#include "cohesion/noise.hpp"

#include <cmath>
#include <numbers>

namespace cohesion {

const char* to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::None: return "none";
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::Uniform: return "uniform";
  }
  return "unknown";
}

std::optional<NoiseFamily> parse_noise_family(const std::string& name) {
  if (name == "none") return NoiseFamily::None;
  if (name == "gaussian") return NoiseFamily::Gaussian;
  if (name == "uniform") return NoiseFamily::Uniform;
  return std::nullopt;
}

const char* to_string(PairSet pairs) { return pairs == PairSet::AllPairs ? "all_pairs" : "edges"; }

std::vector<std::string> NoiseSpec::violations(const std::vector<NodeNoise>& nodes) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeNoise& node = nodes[i];
    const std::string where = "node " + std::to_string(i) + ": ";
    if (!std::isfinite(node.mean) || !std::isfinite(node.variance)) {
      out.push_back(where + "mean and variance must be finite");
      continue;
    }
    if (node.variance < 0.0) out.push_back(where + "variance must be >= 0");
    if (node.family == NoiseFamily::None && (node.variance != 0.0 || node.mean != 0.0)) {
      out.push_back(where + "family 'none' requires mean 0 and variance 0");
    }
    if (node.family != NoiseFamily::None && node.variance == 0.0) {
      out.push_back(where + "zero variance is only allowed with family 'none'");
    }
  }
  return out;
}

NoiseSpec::NoiseSpec(std::vector<NodeNoise> nodes) : nodes_(std::move(nodes)) {
  const auto problems = violations(nodes_);
  if (!problems.empty()) throw NoiseError(NoiseErrorKind::InvalidSpec, problems.front());
}

NoiseSpec NoiseSpec::none(std::size_t n) { return NoiseSpec(std::vector<NodeNoise>(n)); }

NoiseSpec NoiseSpec::gaussian(const std::vector<double>& means, const std::vector<double>& variances) {
  if (means.size() != variances.size()) {
    throw NoiseError(NoiseErrorKind::DimensionMismatch, "means and variances differ in length");
  }
  std::vector<NodeNoise> nodes;
  for (std::size_t i = 0; i < means.size(); ++i) nodes.push_back({NoiseFamily::Gaussian, means[i], variances[i]});
  return NoiseSpec(std::move(nodes));
}

bool NoiseSpec::deterministic() const noexcept {
  for (const auto& node : nodes_)
    if (node.family != NoiseFamily::None) return false;
  return true;
}

bool NoiseSpec::gaussian_only() const noexcept {
  for (const auto& node : nodes_)
    if (node.family == NoiseFamily::Uniform) return false;
  return true;
}

namespace {

// splitmix64 finaliser
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RandomStream::bits(std::uint64_t node, std::uint64_t index) const noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ trial);
  h = mix64(h ^ static_cast<std::uint64_t>(purpose));
  h = mix64(h ^ node);
  return mix64(h ^ index);
}

double RandomStream::uniform(std::uint64_t node, std::uint64_t index) const noexcept {
  return (static_cast<double>(bits(node, index) >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal(std::uint64_t node, std::uint64_t index) const noexcept {
  const double u1 = uniform(node, 2 * index);
  const double u2 = uniform(node, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void sample_noise(const NoiseSpec& spec, const RandomStream& stream, std::uint64_t k, Eigen::Ref<VectorXd> out) {
  if (static_cast<std::size_t>(out.size()) != spec.size()) {
    throw NoiseError(NoiseErrorKind::DimensionMismatch, "noise output vector has the wrong length");
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const NodeNoise& node = spec[i];
    switch (node.family) {
      case NoiseFamily::None:
        out(Eigen::Index(i)) = 0.0;
        break;
      case NoiseFamily::Gaussian:
        out(Eigen::Index(i)) = node.mean + std::sqrt(node.variance) * stream.normal(i, k);
        break;
      case NoiseFamily::Uniform: {
        const double half_width = std::sqrt(3.0 * node.variance);
        out(Eigen::Index(i)) = node.mean + half_width * (2.0 * stream.uniform(i, k) - 1.0);
        break;
      }
    }
  }
}

VectorXd sample_noise(const NoiseSpec& spec, const RandomStream& stream, std::uint64_t k) {
  VectorXd out(Eigen::Index(spec.size()));
  sample_noise(spec, stream, k, out);
  return out;
}

double folded_normal_mean(double m, double s2) {
  if (s2 < 0.0 || std::isnan(s2)) {
    throw NoiseError(NoiseErrorKind::NegativeVariance, "folded normal mean needs a non-negative variance");
  }
  if (s2 == 0.0) return std::abs(m);
  const double s = std::sqrt(s2);
  // m * (1 - 2 Phi(-m/s)) == m * erf(m / (s sqrt 2))
  return s * std::sqrt(2.0 / std::numbers::pi) * std::exp(-m * m / (2.0 * s2)) +
         m * std::erf(m / (s * std::numbers::sqrt2));
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> select_pairs(const TreeGraph& graph, PairSet pairs) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (pairs == PairSet::Edges) {
    for (const Edge& e : graph.edges()) out.emplace_back(e.tail, e.head);
  } else {
    for (std::size_t i = 0; i < graph.num_nodes(); ++i)
      for (std::size_t j = i + 1; j < graph.num_nodes(); ++j) out.emplace_back(i, j);
  }
  return out;
}

}  // namespace

DeltaOmegaEstimate e_max_delta_omega(const VectorXd& omega, const NoiseSpec& spec, const TreeGraph& graph,
                                     PairSet pairs, const std::optional<MonteCarloSettings>& mc) {
  const std::size_t n = graph.num_nodes();
  if (static_cast<std::size_t>(omega.size()) != n || spec.size() != n) {
    throw NoiseError(NoiseErrorKind::DimensionMismatch, "omega, noise spec and graph disagree on node count");
  }
  const auto selected = select_pairs(graph, pairs);
  DeltaOmegaEstimate best;
  best.value = -1.0;

  if (!mc) {
    if (!spec.gaussian_only()) {
      throw NoiseError(NoiseErrorKind::UnsupportedFamily,
                       "analytic E|dw| needs Gaussian or noise-free nodes; request Monte Carlo instead");
    }
    for (const auto& [i, j] : selected) {
      const double m = (omega(Eigen::Index(i)) + spec[i].mean) - (omega(Eigen::Index(j)) + spec[j].mean);
      const double value = folded_normal_mean(m, spec[i].variance + spec[j].variance);
      if (value > best.value) {
        best.value = value;
        best.argmax = {i, j};
      }
    }
    return best;
  }

  if (mc->samples < 2) throw NoiseError(NoiseErrorKind::InvalidSpec, "Monte Carlo needs at least 2 samples");
  std::vector<double> sum(selected.size(), 0.0);
  std::vector<double> sum_sq(selected.size(), 0.0);
  VectorXd draw(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < mc->samples; ++s) {
    sample_noise(spec, mc->stream, s, draw);
    for (std::size_t p = 0; p < selected.size(); ++p) {
      const auto [i, j] = selected[p];
      const double d = std::abs((omega(Eigen::Index(i)) + draw(Eigen::Index(i))) -
                                (omega(Eigen::Index(j)) + draw(Eigen::Index(j))));
      sum[p] += d;
      sum_sq[p] += d * d;
    }
  }
  const double count = static_cast<double>(mc->samples);
  for (std::size_t p = 0; p < selected.size(); ++p) {
    const double mean = sum[p] / count;
    if (mean > best.value) {
      const double var = std::max(0.0, (sum_sq[p] - count * mean * mean) / (count - 1.0));
      best.value = mean;
      best.std_error = std::sqrt(var / count);
      best.argmax = selected[p];
    }
  }
  best.samples = mc->samples;
  best.analytic = false;
  return best;
}

}  // namespace cohesion
