#include "cohesion/dynamics.hpp"

#include <cmath>
#include <queue>

namespace cohesion {

const char* to_string(Variant variant) {
  return variant == Variant::FrequencyDependent ? "frequency_dependent" : "undirected";
}

std::optional<Variant> parse_variant(const std::string& name) {
  if (name == "frequency_dependent") return Variant::FrequencyDependent;
  if (name == "undirected") return Variant::Undirected;
  return std::nullopt;
}

NetworkModel::NetworkModel(TreeGraph graph, VectorXd omega, NoiseSpec noise, double kappa, double tau,
                           Variant variant)
    : graph_(std::move(graph)),
      omega_(std::move(omega)),
      noise_(std::move(noise)),
      kappa_(kappa),
      tau_(tau),
      variant_(variant) {
  const auto n = graph_.num_nodes();
  if (static_cast<std::size_t>(omega_.size()) != n) {
    throw ModelError("omega has " + std::to_string(omega_.size()) + " entries for " + std::to_string(n) + " nodes");
  }
  if (noise_.size() != n) {
    throw ModelError("noise spec has " + std::to_string(noise_.size()) + " entries for " + std::to_string(n) +
                     " nodes");
  }
  if (!omega_.allFinite()) throw ModelError("omega must be finite");
  // kappa == 0 is the uncoupled reference network
  if (!(kappa_ >= 0.0) || !std::isfinite(kappa_)) throw ModelError("kappa must be finite and >= 0");
  if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw ModelError("tau must be finite and > 0");
}

NetworkModel NetworkModel::with_kappa(double kappa) const {
  return NetworkModel(graph_, omega_, noise_, kappa, tau_, variant_);
}

NetworkModel NetworkModel::with_noise(NoiseSpec noise) const {
  return NetworkModel(graph_, omega_, std::move(noise), kappa_, tau_, variant_);
}

PhaseState PhaseState::wrapped(const VectorXd& raw, std::uint64_t k) {
  PhaseState s{raw, k};
  for (Eigen::Index i = 0; i < s.theta.size(); ++i) s.theta(i) = wrap_angle(s.theta(i));
  return s;
}

CohesionParams::CohesionParams(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0 && gamma < kHalfPi)) {
    throw ModelError("gamma must satisfy 0 < gamma < pi/2, got " + std::to_string(gamma));
  }
}

double wrap_angle(double x) noexcept {
  double r = std::remainder(x, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

double geodesic_distance(double a, double b) noexcept { return std::abs(wrap_angle(a - b)); }

void step_in_place(const NetworkModel& model, VectorXd& theta, const VectorXd& noise_draw, VectorXd& coupling) {
  const auto& edges = model.graph().edges();
  coupling.setZero();
  for (const Edge& e : edges) {
    const double s = std::sin(theta(Eigen::Index(e.tail)) - theta(Eigen::Index(e.head)));
    coupling(Eigen::Index(e.tail)) += s;
    coupling(Eigen::Index(e.head)) -= s;
  }
  const double tau = model.tau();
  const double kappa = model.kappa();
  const VectorXd& omega = model.omega();
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double rate = omega(i) + noise_draw(i);
    const double delta = model.variant() == Variant::FrequencyDependent
                             ? tau * rate * (1.0 - kappa * coupling(i))
                             : tau * rate - kappa * tau * coupling(i);
    theta(i) = wrap_angle(theta(i) + delta);
  }
}

PhaseState step(const NetworkModel& model, const PhaseState& state, const VectorXd& noise_draw) {
  if (noise_draw.size() != state.theta.size() || state.theta.size() != Eigen::Index(model.num_nodes())) {
    throw ModelError("state, noise draw and model disagree on node count");
  }
  PhaseState next{state.theta, state.k + 1};
  VectorXd coupling(state.theta.size());
  step_in_place(model, next.theta, noise_draw, coupling);
  return next;
}

VectorXd relative_phases(const TreeGraph& graph, const VectorXd& theta) {
  VectorXd out(Eigen::Index(graph.num_edges()));
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    out(Eigen::Index(e)) = wrap_angle(theta(Eigen::Index(edge.tail)) - theta(Eigen::Index(edge.head)));
  }
  return out;
}

double max_relative_geodesic(const TreeGraph& graph, const VectorXd& theta) {
  double worst = 0.0;
  for (const Edge& e : graph.edges()) {
    worst = std::max(worst, geodesic_distance(theta(Eigen::Index(e.tail)), theta(Eigen::Index(e.head))));
  }
  return worst;
}

bool in_cohesion_set(const TreeGraph& graph, const PhaseState& state, const CohesionParams& cohesion) {
  return max_relative_geodesic(graph, state) <= cohesion.gamma();
}

double drift_function_V(const TreeGraph& graph, const VectorXd& theta, const CohesionParams& cohesion) {
  double total = 0.0;
  for (const Edge& e : graph.edges()) {
    total += geodesic_distance(theta(Eigen::Index(e.tail)), theta(Eigen::Index(e.head)));
  }
  return std::sin(cohesion.gamma()) * total;
}

VectorXd lift_edge_differences(const TreeGraph& graph, const VectorXd& edge_differences) {
  const std::size_t n = graph.num_nodes();
  if (static_cast<std::size_t>(edge_differences.size()) != graph.num_edges()) {
    throw ModelError("need one difference per edge");
  }
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    incident[graph.edge(e).tail].push_back(e);
    incident[graph.edge(e).head].push_back(e);
  }
  VectorXd theta = VectorXd::Zero(Eigen::Index(n));
  std::vector<bool> placed(n, false);
  std::queue<std::size_t> frontier;
  placed[0] = true;
  frontier.push(0);
  while (!frontier.empty()) {
    const std::size_t node = frontier.front();
    frontier.pop();
    for (std::size_t e : incident[node]) {
      const Edge& edge = graph.edge(e);
      const double d = edge_differences(Eigen::Index(e));
      if (edge.tail == node && !placed[edge.head]) {
        theta(Eigen::Index(edge.head)) = theta(Eigen::Index(node)) - d;
        placed[edge.head] = true;
        frontier.push(edge.head);
      } else if (edge.head == node && !placed[edge.tail]) {
        theta(Eigen::Index(edge.tail)) = theta(Eigen::Index(node)) + d;
        placed[edge.tail] = true;
        frontier.push(edge.tail);
      }
    }
  }
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = wrap_angle(theta(i));
  return theta;
}

}  // namespace cohesion
