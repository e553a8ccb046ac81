#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cohesion/analysis.hpp"
#include "cohesion/graph.hpp"

using namespace cohesion;
using std::numbers::pi;

namespace {

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

NetworkModel reference_model(double mean3 = 0.0, Variant variant = Variant::FrequencyDependent) {
  return NetworkModel(line_graph(5), vec({7, 10, 1, 6, 2}),
                      NoiseSpec::gaussian({0, 0, mean3, 0, 0}, {3, 5, 0.5, 2, 1}), 30.0, 0.002, variant);
}

const VectorXd& reference_theta0() {
  static const VectorXd theta = vec({pi / 4, pi / 8, -pi / 8, -pi / 5, pi / 5});
  return theta;
}

bool same_record(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.k != y.k || x.theta != y.theta || x.V != y.V || x.frequency != y.frequency || x.in_set != y.in_set)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("simulation records") {
  const CohesionParams cohesion(kDefaultGamma);
  const RandomStream stream{5, 0, StreamPurpose::Noise};

  SUBCASE("silent synchronised network is constant") {
    const NetworkModel model(line_graph(4), VectorXd::Zero(4), NoiseSpec::none(4), 30.0, 0.002,
                             Variant::FrequencyDependent);
    const auto record = simulate(model, PhaseState::wrapped(VectorXd::Constant(4, 1.1)), 50, cohesion, stream);
    REQUIRE(record.rows.size() == 51);
    for (const auto& row : record.rows) {
      CHECK(row.theta == VectorXd::Constant(4, 1.1));
      CHECK(row.V == 0.0);
      CHECK(row.in_set);
    }
    CHECK(record.rows.back().k == 50);
  }

  SUBCASE("row fields are consistent") {
    const NetworkModel model = reference_model();
    const std::uint64_t horizon = 3000;
    const auto record = simulate(model, PhaseState::wrapped(reference_theta0()), horizon, cohesion, stream);
    REQUIRE(record.rows.size() == horizon + 1);
    CHECK(record.gamma == cohesion.gamma());
    for (const auto& row : record.rows) {
      CHECK(std::abs(row.V - drift_function_V(model.graph(), row.theta, cohesion)) <= 1e-12);
      CHECK(row.in_set == (row.max_distance <= cohesion.gamma()));
      CHECK(row.max_distance == doctest::Approx(row.edge_distance.maxCoeff()));
      CHECK((row.frequency - model.omega() - sample_noise(model.noise(), stream, row.k)).cwiseAbs().maxCoeff() <=
            1e-13);
    }
    // consecutive rows are linked by one step with the recorded rates
    for (std::size_t i = 0; i + 1 < record.rows.size(); i += 97) {
      const VectorXd noise = record.rows[i].frequency - model.omega();
      const PhaseState next = step(model, PhaseState{record.rows[i].theta, record.rows[i].k}, noise);
      for (Eigen::Index j = 0; j < 5; ++j)
        CHECK(geodesic_distance(next.theta(j), record.rows[i + 1].theta(j)) <= 1e-12);
    }
  }

  SUBCASE("decimation keeps k = 0 and the horizon") {
    const auto record = simulate(reference_model(), PhaseState::wrapped(reference_theta0()), 1000, cohesion, stream, 300);
    REQUIRE(record.rows.size() == 5);
    CHECK(record.rows[1].k == 300);
    CHECK(record.rows.back().k == 1000);
    const auto full = simulate(reference_model(), PhaseState::wrapped(reference_theta0()), 1000, cohesion, stream);
    CHECK(record.rows[3].theta == full.rows[900].theta);
  }

  SUBCASE("reproducible") {
    const auto a = simulate(reference_model(-3.0), PhaseState::wrapped(reference_theta0()), 2000, cohesion, stream);
    const auto b = simulate(reference_model(-3.0), PhaseState::wrapped(reference_theta0()), 2000, cohesion, stream);
    CHECK(same_record(a, b));
    const auto c = simulate(reference_model(-3.0), PhaseState::wrapped(reference_theta0()), 2000, cohesion,
                            stream.with(1, StreamPurpose::Noise));
    CHECK_FALSE(same_record(a, c));
  }

  SUBCASE("zero horizon rejected") {
    CHECK_THROWS_AS(simulate(reference_model(), PhaseState::wrapped(reference_theta0()), 0, cohesion, stream),
                    AnalysisError);
  }
}

TEST_CASE("initial state samplers") {
  const TreeGraph line = line_graph(5);
  const RandomStream stream{9, 0, StreamPurpose::InitialState};
  for (std::uint64_t t = 0; t < 200; ++t) {
    const VectorXd box = InitialStateSampler::uniform_omega().sample(line, stream.with(t, StreamPurpose::InitialState));
    CHECK(max_relative_geodesic(line, box) <= pi / 2);
    const VectorXd outside =
        InitialStateSampler::outside_cohesion(1.3).sample(line, stream.with(t, StreamPurpose::InitialState));
    const VectorXd rel = relative_phases(line, outside);
    CHECK(rel.cwiseAbs().minCoeff() >= 1.3 - 1e-12);
    CHECK(rel.cwiseAbs().maxCoeff() < pi / 2);
  }
  CHECK(InitialStateSampler::fixed(reference_theta0()).sample(line, stream) == reference_theta0());
  CHECK_THROWS_AS(InitialStateSampler::outside_cohesion(2.0), AnalysisError);
}

TEST_CASE("recurrence experiments") {
  const RandomStream stream{31, 0, StreamPurpose::Noise};

  SUBCASE("thread count does not change outcomes") {
    const NetworkModel model = reference_model(-1.6);
    const CohesionParams cohesion(kDefaultGamma);
    const auto seq = recurrence_experiment(model, InitialStateSampler::uniform_omega(), cohesion, 12, 3000, stream, 1);
    const auto par = recurrence_experiment(model, InitialStateSampler::uniform_omega(), cohesion, 12, 3000, stream, 3);
    REQUIRE(seq.outcomes.size() == par.outcomes.size());
    for (std::size_t i = 0; i < seq.outcomes.size(); ++i) {
      CHECK(seq.outcomes[i].return_time == par.outcomes[i].return_time);
      CHECK(seq.outcomes[i].escape_step == par.outcomes[i].escape_step);
      CHECK(seq.outcomes[i].max_excursion == par.outcomes[i].max_excursion);
      CHECK(seq.outcomes[i].initial_distance == par.outcomes[i].initial_distance);
    }
    CHECK(seq.return_times == par.return_times);
    CHECK(seq.return_fraction == par.return_fraction);
  }

  SUBCASE("bookkeeping") {
    const auto stats = recurrence_experiment(reference_model(), InitialStateSampler::uniform_omega(),
                                             CohesionParams(kDefaultGamma), 20, 2000, stream);
    CHECK(stats.trials == 20);
    CHECK(stats.max_excursion.size() == 20);
    std::size_t returned = 0;
    for (const auto& o : stats.outcomes) returned += o.return_time.has_value();
    CHECK(stats.return_times.size() == returned);
    CHECK(stats.return_fraction == doctest::Approx(double(returned) / 20.0));
    for (const auto& o : stats.outcomes) CHECK(o.max_excursion >= o.initial_distance);
  }

  SUBCASE("uncoupled pair rotates back into the set") {
    // d(k) = d(0) + k tau (w1 - w2) on the circle, so every start re-enters S(pi/4)
    const NetworkModel model(line_graph(2), vec({1.0, 0.0}), NoiseSpec::none(2), 0.0, 0.1, Variant::Undirected);
    const CohesionParams cohesion(pi / 4);
    const auto stats = recurrence_experiment(model, InitialStateSampler::outside_cohesion(pi / 4), cohesion, 40, 200,
                                             stream);
    CHECK(stats.return_fraction == 1.0);
    for (const auto& o : stats.outcomes) {
      CHECK_FALSE(o.started_in_set);
      CHECK(*o.return_time <= 63);
    }
  }

  SUBCASE("coupled pair contracts monotonically") {
    // d' = d - 2 kappa tau sin d shrinks |d| on (0, pi/2] whenever kappa tau < 1
    const CohesionParams cohesion(0.3);
    for (double kappa : {0.5, 50.0, 99.0}) {
      const NetworkModel model(line_graph(2), VectorXd::Zero(2), NoiseSpec::none(2), kappa, 0.01,
                               Variant::Undirected);
      const RandomStream init{7, 0, StreamPurpose::InitialState};
      for (std::uint64_t t = 0; t < 20; ++t) {
        const VectorXd theta0 = InitialStateSampler::uniform_omega().sample(model.graph(), init.with(t, StreamPurpose::InitialState));
        const auto record = simulate(model, PhaseState::wrapped(theta0), 2000, cohesion, stream);
        for (std::size_t i = 1; i < record.rows.size(); ++i)
          CHECK(record.rows[i].max_distance <= record.rows[i - 1].max_distance + 1e-15);
        CHECK(record.rows.back().in_set);
      }
      const auto stats =
          recurrence_experiment(model, InitialStateSampler::uniform_omega(), cohesion, 20, 2000, stream);
      CHECK(stats.return_fraction == 1.0);
      CHECK(stats.escaped_fraction == 0.0);
    }
  }

  SUBCASE("sampler outside the admissible set") {
    const auto bad = InitialStateSampler::fixed(vec({0.0, 2.0, 0.0, 0.0, 0.0}));
    try {
      recurrence_experiment(reference_model(), bad, CohesionParams(kDefaultGamma), 2, 10, stream);
      FAIL("expected InvalidInitSampler");
    } catch (const AnalysisError& e) {
      CHECK(e.kind() == AnalysisErrorKind::InvalidInitSampler);
    }
  }
}

TEST_CASE("one-step drift") {
  const CohesionParams cohesion(kDefaultGamma);
  const RandomStream stream{77, 0, StreamPurpose::DriftNoise};

  SUBCASE("noise-free drift is the deterministic change") {
    const NetworkModel model = reference_model().with_noise(NoiseSpec::none(5));
    const PhaseState state = PhaseState::wrapped(reference_theta0());
    const auto d = drift_estimate(model, state, cohesion, 100, stream);
    const double expected = drift_function_V(model.graph(), step(model, state, VectorXd::Zero(5)), cohesion) -
                            drift_function_V(model.graph(), state, cohesion);
    CHECK(d.std_error == 0.0);
    CHECK(d.estimate == doctest::Approx(expected).epsilon(1e-14));
  }

  SUBCASE("noisy drift reports a spread") {
    const auto d = drift_estimate(reference_model(), PhaseState::wrapped(reference_theta0()), cohesion, 500, stream);
    CHECK(d.std_error > 0.0);
    CHECK(d.samples == 500);
    CHECK(d.v_current == doctest::Approx(drift_function_V(line_graph(5), reference_theta0(), cohesion)));
    CHECK_THROWS_AS(drift_estimate(reference_model(), PhaseState::wrapped(reference_theta0()), cohesion, 1, stream),
                    AnalysisError);
  }

  SUBCASE("sweep") {
    CHECK(drift_sweep(reference_model(), cohesion, 0, 100, stream).empty());
    const auto probes = drift_sweep(reference_model(), cohesion, 10, 200, stream, 2);
    REQUIRE(probes.size() == 10);
    for (const auto& p : probes) {
      const VectorXd rel = relative_phases(line_graph(5), p.theta);
      CHECK(rel.cwiseAbs().minCoeff() >= cohesion.gamma() - 1e-12);
      CHECK(rel.cwiseAbs().maxCoeff() < pi / 2);
      CHECK(p.std_error >= 0.0);
    }
    const auto again = drift_sweep(reference_model(), cohesion, 10, 200, stream, 1);
    for (std::size_t i = 0; i < probes.size(); ++i) CHECK(probes[i].estimate == again[i].estimate);

    const auto summary = summarise(probes);
    CHECK(summary.probes == 10);
    CHECK(summary.min_estimate <= summary.max_estimate);
    CHECK(summary.negative_3se + summary.non_negative_3se <= 10);
  }
}
