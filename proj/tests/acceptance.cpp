// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "cohesion/analysis.hpp"
#include "cohesion/conditions.hpp"
#include "cohesion/config.hpp"
#include "cohesion/runner.hpp"
#include "oracles.hpp"

using namespace cohesion;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

const fs::path kConfigs = fs::path(COHESION_SOURCE_DIR) / "configs";

// Tolerances and protocol sizes.
constexpr double kNoiseFreeTol = 0.01;
constexpr double kSpectrumAbsTol = 0.05;
constexpr double kSpectrumStdErrs = 4.0;
constexpr std::size_t kSpectrumSamples = 100000;
constexpr double kKappaLo = 7.9, kKappaHi = 8.4;
constexpr double kTauLo = 0.0038, kTauHi = 0.0042;
constexpr double kProductTol = 1e-4;
constexpr std::size_t kRecurrenceTrials = 200;
constexpr std::uint64_t kHorizon = 100000;
constexpr std::size_t kEscapeRuns = 100;
constexpr double kEscapeFraction = 0.95;
constexpr std::size_t kDriftStates = 100;
constexpr std::size_t kDriftNoise = 10000;
constexpr double kDriftZ = 3.0;
constexpr int kRandomMatrices = 1000;
constexpr double kFoldedTol = 1e-6;
constexpr double kInvarianceTol = 1e-12;

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail, double seconds) {
  if (!pass) ++failures;
  std::printf("[%s] %2d %-34s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
}

template <class F>
void criterion(int id, const std::string& title, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(id, pass, title, detail, secs);
}

ExperimentConfig config(const std::string& name, std::vector<std::string> overrides = {}) {
  return load_config(kConfigs / name, overrides);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool noise_free_spectrum(std::string& detail) {
  const ExperimentConfig cfg = config("noise-free.cfg");
  const auto ext = extreme_eigenvalues(weighted_edge_laplacian(incidence(cfg.graph()), cfg.omega_vector()));
  detail = fmt::format("lambda = ({:.4f}, {:.4f}) vs (1.31, 24.46)", ext.min, ext.max);
  return std::abs(ext.min - 1.31) <= kNoiseFreeTol && std::abs(ext.max - 24.46) <= kNoiseFreeTol;
}

bool noisy_spectra(std::string& detail) {
  struct Row {
    const char* file;
    double lmin, lmax;
  };
  const Row rows[] = {{"fig2.cfg", 1.19, 25.35}, {"fig3.cfg", 0.34, 24.05}, {"fig4.cfg", -1.17, 23.669}};
  bool all = true;
  for (const Row& row : rows) {
    const ExperimentConfig cfg = config(row.file);
    const SpectralStats s = mc_spectral_stats(cfg.graph(), cfg.omega_vector(), cfg.noise_spec(), kSpectrumSamples,
                                              RandomStream{cfg.seed, 0, StreamPurpose::Spectral},
                                              cfg.worker_threads());
    const double tol_min = std::max(kSpectrumStdErrs * s.stderr_min, kSpectrumAbsTol);
    const double tol_max = std::max(kSpectrumStdErrs * s.stderr_max, kSpectrumAbsTol);
    const bool ok_min = std::abs(s.e_lambda_min - row.lmin) <= tol_min;
    const bool ok_max = std::abs(s.e_lambda_max - row.lmax) <= tol_max;
    all = all && ok_min && ok_max;
    detail += fmt::format("{}{}: ({:.3f}{}, {:.3f}{}) vs ({}, {})", detail.empty() ? "" : "; ", cfg.name,
                          s.e_lambda_min, ok_min ? "" : "!", s.e_lambda_max, ok_max ? "" : "!", row.lmin, row.lmax);
  }
  return all;
}

bool bounds(std::string& detail) {
  const ExperimentConfig cfg = config("fig2.cfg", {"gamma_margin=0.044"});
  const double emax = e_max_delta_omega(cfg.omega_vector(), cfg.noise_spec(), cfg.graph(), PairSet::AllPairs).value;
  SpectralStats stats;
  stats.e_lambda_min = 1.197;
  stats.e_lambda_max = 25.35;
  const BoundResult r = bounds_frequency_dependent(stats, emax, cfg.cohesion(), {0.002, 30.0});
  detail = fmt::format("gamma = pi/2 - 0.044, E_max = {:.5f}, kappa_min = {:.4f}, tau_max = {:.6f}", emax,
                       r.kappa_min, r.tau_max);
  return r.kappa_min >= kKappaLo && r.kappa_min <= kKappaHi && r.tau_max >= kTauLo && r.tau_max <= kTauHi;
}

bool two_node_product(std::string& detail) {
  const ExperimentConfig cfg = config("remark2-two-node.cfg");
  const double emax = e_max_delta_omega(cfg.omega_vector(), cfg.noise_spec(), cfg.graph()).value;
  const BoundResult at_tau = bounds_undirected(cfg.graph(), emax, cfg.cohesion(), {cfg.tau, cfg.kappa});
  const BoundResult at_kappa = bounds_undirected(cfg.graph(), emax, cfg.cohesion(), {cfg.tau, at_tau.kappa_min});
  const double product = at_tau.kappa_min * at_kappa.tau_max;
  detail = fmt::format("kappa_min * tau_max = {:.9f}, pi/2 = {:.9f}", product, pi / 2);
  return std::abs(product - pi / 2) <= kProductTol;
}

bool escape(std::string& detail) {
  const ExperimentConfig cfg = config("fig4.cfg");
  const auto sampler = InitialStateSampler::fixed(Eigen::Map<const VectorXd>(
      cfg.initial_phases->data(), static_cast<Eigen::Index>(cfg.initial_phases->size())));
  const auto stats = recurrence_experiment(cfg.model(), sampler, cfg.cohesion(), kEscapeRuns, kHorizon, cfg.stream(),
                                           cfg.worker_threads());
  detail = fmt::format("{} runs from theta(0): reached pi/2 in {:.2f}", stats.trials, stats.escaped_fraction);
  return stats.escaped_fraction >= kEscapeFraction;
}

bool drift(std::string& detail) {
  struct Tally {
    std::size_t negative = 0, non_negative = 0, probes = 0;
    double max_estimate = -INFINITY;
  };
  auto sweep = [](const std::string& file) {
    const ExperimentConfig cfg = config(file);
    Tally t;
    for (const auto& p :
         drift_sweep(cfg.model(), cfg.cohesion(), kDriftStates, kDriftNoise, cfg.stream(), cfg.worker_threads())) {
      ++t.probes;
      t.negative += p.negative_at(kDriftZ);
      t.non_negative += p.non_negative_at(kDriftZ);
      t.max_estimate = std::max(t.max_estimate, p.estimate);
    }
    return t;
  };
  const Tally good = sweep("fig2.cfg");
  const Tally bad = sweep("fig4.cfg");
  const bool a = good.probes == kDriftStates && good.negative == good.probes;
  const bool b = bad.non_negative >= 1;
  detail = fmt::format("zero mean: {}/{} negative (max {:.4g}){}; E[n_3]=-3: {}/{} non-negative (max {:.4g}){}",
                       good.negative, good.probes, good.max_estimate, a ? "" : "!", bad.non_negative, bad.probes,
                       bad.max_estimate, b ? "" : "!");
  return a && b;
}

bool numerical_core(std::string& detail) {
  std::mt19937_64 rng(20190101);
  int eig_bad = 0;
  for (int t = 0; t < kRandomMatrices; ++t) {
    const Eigen::Index dim = 1 + t % 8;
    const MatrixXd a = oracle::random_symmetric(dim, rng, 1.0 + double(t % 5));
    const VectorXd ev = eigenvalues_symmetric(SymmetricMatrix<double>(a));
    bool ok = std::abs(a.trace() - ev.sum()) <= 1e-9 * double(dim) * a.cwiseAbs().maxCoeff();
    const double det = a.partialPivLu().determinant();
    ok = ok && std::abs(det - ev.prod()) <= 1e-6 * std::abs(det) + 1e-12;
    for (Eigen::Index i = 0; i < dim; ++i) {
      bool covered = false;
      for (Eigen::Index r = 0; r < dim; ++r)
        covered = covered || std::abs(ev(i) - a(r, r)) <= a.row(r).cwiseAbs().sum() - std::abs(a(r, r)) + 1e-12;
      ok = ok && covered;
    }
    eig_bad += !ok;
  }

  double folded_err = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 5; ++j) {
      const double m = -9.0 + 2.0 * i, s2 = 0.05 * std::pow(4.0, j);
      folded_err = std::max(folded_err, std::abs(folded_normal_mean(m, s2) - oracle::folded_normal_quadrature(m, s2)));
    }

  double inv_err = 0.0;
  std::uniform_real_distribution<double> angle(-pi, pi);
  std::normal_distribution<double> gauss(5.0, 2.0);
  for (Variant variant : {Variant::FrequencyDependent, Variant::Undirected}) {
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 2 + std::size_t(t % 9);
      const TreeGraph g = oracle::random_tree(n, rng);
      VectorXd omega(static_cast<Eigen::Index>(n)), theta(static_cast<Eigen::Index>(n));
      for (auto& x : omega) x = gauss(rng);
      for (auto& x : theta) x = angle(rng);
      const VectorXd noise = VectorXd::Zero(static_cast<Eigen::Index>(n));
      const NetworkModel model(g, omega, NoiseSpec::none(n), 4.0, 0.01, variant);
      const VectorXd base = step(model, PhaseState::wrapped(theta), noise).theta;
      const double c = angle(rng);
      const VectorXd rotated = step(model, PhaseState::wrapped(theta.array() + c), noise).theta;
      std::vector<Edge> flipped = g.edges();
      for (auto& e : flipped) std::swap(e.tail, e.head);
      const NetworkModel flipped_model(build_tree(n, flipped), omega, NoiseSpec::none(n), 4.0, 0.01, variant);
      const VectorXd reoriented = step(flipped_model, PhaseState::wrapped(theta), noise).theta;
      for (Eigen::Index i = 0; i < base.size(); ++i) {
        inv_err = std::max(inv_err, geodesic_distance(rotated(i), base(i) + c));
        inv_err = std::max(inv_err, geodesic_distance(reoriented(i), base(i)));
      }
    }
  }
  detail = fmt::format("eigen invariant failures {}/{}, folded-normal max err {:.2e}, step invariance max err {:.2e}",
                       eig_bad, kRandomMatrices, folded_err, inv_err);
  return eig_bad == 0 && folded_err <= kFoldedTol && inv_err <= kInvarianceTol;
}

bool reproducibility(std::string& detail) {
  const fs::path root = fs::temp_directory_path() / "cohesion_acceptance";
  fs::remove_all(root);
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".cfg") continue;
    std::vector<fs::path> produced[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = root / std::to_string(run);
      const ExperimentConfig cfg = load_config(entry.path(), {"output.directory=\"" + dir.string() + "\""});
      for (Command cmd : {Command::Simulate, Command::Recurrence, Command::Drift}) {
        const RunResult r = run_subcommand(cmd, cfg);
        produced[run].insert(produced[run].end(), r.data_files.begin(), r.data_files.end());
      }
    }
    for (std::size_t i = 0; i < produced[0].size(); ++i) {
      ++compared;
      if (i >= produced[1].size() || slurp(produced[0][i]) != slurp(produced[1][i])) ++differing;
    }
  }
  fs::remove_all(root);
  detail = fmt::format("{} CSV pairs compared, {} differ", compared, differing);
  return compared > 0 && differing == 0;
}

}  // namespace

int main() {
  criterion(1, "noise-free spectrum", noise_free_spectrum);
  criterion(2, "expected spectra under noise", noisy_spectra);
  criterion(3, "coupling and period bounds", bounds);
  criterion(4, "two-node product limit", two_node_product);
  criterion(5, "recurrence, zero-mean noise", [](std::string& d) {
    const ExperimentConfig cfg = config("fig2.cfg");
    const auto stats = recurrence_experiment(cfg.model(), InitialStateSampler::uniform_omega(), cfg.cohesion(),
                                             kRecurrenceTrials, kHorizon, cfg.stream(), cfg.worker_threads());
    d = fmt::format("{} trials x {} steps: return {:.3f}, escaped {:.3f}", stats.trials, kHorizon,
                    stats.return_fraction, stats.escaped_fraction);
    return stats.return_fraction == 1.0 && stats.escaped_fraction == 0.0;
  });
  criterion(6, "recurrence, E[n_3] = -1.6", [](std::string& d) {
    const ExperimentConfig cfg = config("fig3.cfg");
    const auto stats = recurrence_experiment(cfg.model(), InitialStateSampler::uniform_omega(), cfg.cohesion(),
                                             kRecurrenceTrials, kHorizon, cfg.stream(), cfg.worker_threads());
    d = fmt::format("{} trials x {} steps: return {:.3f}, escaped {:.3f}", stats.trials, kHorizon,
                    stats.return_fraction, stats.escaped_fraction);
    return stats.return_fraction == 1.0;
  });
  criterion(7, "escape, E[n_3] = -3", escape);
  criterion(8, "one-step drift sign", drift);
  criterion(9, "numerical core properties", numerical_core);
  criterion(10, "byte-identical reruns", reproducibility);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
