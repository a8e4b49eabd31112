#include <doctest.h>

#include <functional>

#include "eatune/tuning.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace eatune;

namespace {

/// Replays a caller-supplied energy function.
class ScriptedProvider final : public MeasurementProvider {
 public:
  explicit ScriptedProvider(std::function<double(const SystemConfig&)> energy)
      : energy_(std::move(energy)) {}

  PhaseSample measure(const SystemConfig& c, bool) override {
    ++runs;
    PhaseSample s;
    s.config = c;
    s.duration = 1.0;
    s.node_energy = energy_(c);
    s.region_energy["r"] = s.node_energy;
    return s;
  }

  int runs = 0;

 private:
  std::function<double(const SystemConfig&)> energy_;
};

RegionProfile profile(std::string name, double mean) {
  return RegionProfile{std::move(name), 1, mean, {}};
}

SystemConfig cfg(int threads, double cf, double ucf) {
  return SystemConfig{threads, Frequency::from_ghz(cf), Frequency::from_ghz(ucf)};
}

EnergyModel untrained_model(std::uint64_t seed) {
  static const auto rows = fixtures::flatten(fixtures::corpus(0.0));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = rows[i].features.transpose();
  EnergyModel m;
  m.standardizer = Standardizer::fit(x);
  m.params = init_params(seed);
  return m;
}

}  // namespace

TEST_CASE("significant regions exceed the threshold strictly") {
  const auto out = detect_significant_regions(
      {profile("b", 0.150), profile("a", 0.050), profile("c", 0.100), profile("a2", 0.2)});
  CHECK(out == std::vector<std::string>{"a2", "b"});
  CHECK(detect_significant_regions({}).empty());
  CHECK(detect_significant_regions({profile("x", 0.3)}, 0.5).empty());
}

TEST_CASE("compute-bound analog exposes its five significant regions") {
  const auto app = fixtures::compute_bound_app();
  const auto out = detect_significant_regions(
      profile_regions(app, fixtures::quiet_node(), default_system_config()));
  CHECK(out == std::vector<std::string>{"ApplyMaterialPropertiesForElems",
                                        "CalcFBHourglassForceForElems", "CalcKinematicsForElems",
                                        "CalcQForElems", "IntegrateStressForElems"});
}

TEST_CASE("thread sweep candidates") {
  CHECK(ThreadSweepSpec{12, 4, 24}.candidates() == std::vector<int>{12, 16, 20, 24});
  CHECK(ThreadSweepSpec{12, 5, 24}.candidates() == std::vector<int>{12, 17, 22});
  CHECK(ThreadSweepSpec{24, 1, 24}.candidates() == std::vector<int>{24});
  CHECK_THROWS_AS((ThreadSweepSpec{12, 0, 24}.candidates()), Error);
  CHECK_THROWS_AS((ThreadSweepSpec{25, 1, 24}.candidates()), Error);
}

TEST_CASE("thread tuning") {
  const Frequency cf = Frequency::from_ghz(2.5), ucf = Frequency::from_ghz(3.0);

  SUBCASE("simulated compute-bound phase prefers all cores") {
    SimulatedNode sim(fixtures::compute_bound_app(), fixtures::quiet_node());
    const auto r = tune_threads(sim, {}, cf, ucf);
    CHECK(r.best_threads == 24);
    REQUIRE(r.energies.size() == 4);
    double lowest = r.energies[0].second;
    for (const auto& [t, e] : r.energies) lowest = std::min(lowest, e);
    CHECK(r.energies.back().second == lowest);
  }
  SUBCASE("ties go to fewer threads") {
    ScriptedProvider flat([](const SystemConfig&) { return 5.0; });
    CHECK(tune_threads(flat, {}, cf, ucf).best_threads == 12);
  }
  SUBCASE("measurement failures carry the candidate") {
    ScriptedProvider broken([](const SystemConfig& c) {
      if (c.omp_threads == 20) throw Error(ErrorKind::InvalidSample, "meter offline");
      return 1.0;
    });
    try {
      tune_threads(broken, {}, cf, ucf);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("thread candidate 20") != std::string::npos);
      CHECK(e.kind() == ErrorKind::InvalidSample);
    }
  }
}

TEST_CASE("global frequencies match brute force") {
  const FrequencyGrid grid;
  const auto& trained = fixtures::trained_model();
  for (double mu : {0.0, 0.3, 0.7, 1.0}) {
    const PmcVector rates = counter_signature_for(mu);
    CHECK(predict_global_frequencies(trained, rates, grid) ==
          oracle::brute_force_argmin(trained, rates, grid));
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const EnergyModel m = untrained_model(seed);
    const PmcVector rates = counter_signature_for(0.5);
    CHECK(predict_global_frequencies(m, rates, grid) == oracle::brute_force_argmin(m, rates, grid));
  }
}

TEST_CASE("constant surface resolves to the lowest corner") {
  EnergyModel m = untrained_model(0);
  m.params = NetworkParamsd{};
  const FrequencyPair p = predict_global_frequencies(m, counter_signature_for(0.5), FrequencyGrid{});
  CHECK(p.first == Frequency::from_ghz(1.2));
  CHECK(p.second == Frequency::from_ghz(1.3));
}

TEST_CASE("neighborhood sizes") {
  const FrequencyGrid grid;
  auto at = [&](double cf, double ucf) {
    return neighborhood({Frequency::from_ghz(cf), Frequency::from_ghz(ucf)}, grid);
  };
  CHECK(at(2.0, 1.5).size() == 9);
  CHECK(at(2.5, 3.0).size() == 4);
  CHECK(at(2.5, 2.1).size() == 6);
  CHECK(at(1.2, 1.3).size() == 4);

  const auto edge = at(2.5, 2.1);
  CHECK(edge.front() == FrequencyPair{Frequency::from_ghz(2.4), Frequency::from_ghz(2.0)});
  CHECK(edge.back() == FrequencyPair{Frequency::from_ghz(2.5), Frequency::from_ghz(2.2)});

  CHECK_THROWS_AS(at(2.6, 2.0), Error);
  CHECK_THROWS_AS(neighborhood({Frequency::from_deci(21), Frequency::from_deci(12)}, grid), Error);
}

TEST_CASE("neighborhood of every grid point") {
  const FrequencyGrid grid;
  int centers = 0;
  for (Frequency cf : grid.core_values()) {
    for (Frequency ucf : grid.uncore_values()) {
      ++centers;
      const auto n = neighborhood({cf, ucf}, grid);
      CHECK((n.size() == 4 || n.size() == 6 || n.size() == 9));
      CHECK(std::find(n.begin(), n.end(), FrequencyPair{cf, ucf}) != n.end());
      for (const auto& [c, u] : n) {
        CHECK(grid.contains_core(c));
        CHECK(grid.contains_uncore(u));
        CHECK(std::abs(c.deci() - cf.deci()) <= 1);
        CHECK(std::abs(u.deci() - ucf.deci()) <= 1);
      }
    }
  }
  CHECK(centers == 252);
}

TEST_CASE("region verification") {
  const FrequencyPair only{Frequency::from_ghz(2.0), Frequency::from_ghz(2.0)};

  SUBCASE("single candidate wins everywhere") {
    SimulatedNode sim(fixtures::heterogeneous_app(), fixtures::quiet_node());
    const std::vector<std::string> names{"compute_a", "memory_a", "mixed"};
    const auto out = tune_regions(sim, names, {only}, 24);
    REQUIRE(out.size() == 3);
    for (const auto& [name, c] : out) CHECK(c == cfg(24, 2.0, 2.0));
    CHECK(sim.runs() == 1);
  }
  SUBCASE("one run per candidate and per-region minima") {
    SimulatedNode sim(fixtures::heterogeneous_app(), fixtures::quiet_node());
    const auto cands = neighborhood(only, FrequencyGrid{});
    const auto out = tune_regions(sim, {"compute_a", "memory_a"}, cands, 24);
    CHECK(sim.runs() == 9);
    CHECK(out.at("compute_a") == cfg(24, 2.1, 1.9));
    CHECK(out.at("memory_a") == cfg(24, 1.9, 2.1));
  }
  SUBCASE("ties go to the earlier candidate") {
    ScriptedProvider flat([](const SystemConfig&) { return 1.0; });
    const auto out = tune_regions(flat, {"r"}, neighborhood(only, FrequencyGrid{}), 16);
    CHECK(out.at("r") == cfg(16, 1.9, 1.9));
  }
  SUBCASE("errors") {
    ScriptedProvider flat([](const SystemConfig&) { return 1.0; });
    CHECK_THROWS_AS(tune_regions(flat, {"r"}, {}, 24), Error);
    CHECK_THROWS_AS(tune_regions(flat, {"missing"}, {only}, 24), Error);
  }
}

TEST_CASE("scenario grouping") {
  const std::map<std::string, SystemConfig> table{
      {"IntegrateStressForElems", cfg(24, 2.5, 2.0)},
      {"CalcFBHourglassForceForElems", cfg(24, 2.5, 2.0)},
      {"CalcQForElems", cfg(24, 2.5, 2.0)},
      {"CalcKinematicsForElems", cfg(24, 2.4, 2.0)},
      {"ApplyMaterialPropertiesForElems", cfg(20, 2.4, 2.0)},
  };
  const TuningModel tm = generate_tuning_model(table, cfg(24, 2.5, 2.1));
  REQUIRE(tm.scenarios.size() == 3);
  CHECK(tm.scenarios[0].config == cfg(20, 2.4, 2.0));
  CHECK(tm.scenarios[2].members.size() == 3);
  CHECK(tm.default_config == cfg(24, 2.5, 2.1));

  std::map<std::string, SystemConfig> same;
  for (const auto& [name, c] : table) same[name] = cfg(24, 2.0, 2.0);
  CHECK(generate_tuning_model(same, cfg(24, 2.0, 2.0)).scenarios.size() == 1);

  const TuningModel empty = generate_tuning_model({}, default_system_config());
  CHECK(empty.scenarios.empty());
  CHECK(empty.default_config == default_system_config());
}

TEST_CASE("scenario grouping round-trips random maps") {
  CounterRng rng(21);
  const FrequencyGrid grid;
  const auto cores = grid.core_values();
  const auto uncores = grid.uncore_values();
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, SystemConfig> in;
    const auto regions = 1 + rng.below(12);
    for (std::uint64_t r = 0; r < regions; ++r) {
      in["r" + std::to_string(r)] = SystemConfig{12 + 4 * static_cast<int>(rng.below(4)),
                                                 cores[rng.below(3)], uncores[rng.below(3)]};
    }
    const TuningModel tm = generate_tuning_model(in, default_system_config());
    std::set<SystemConfig> distinct;
    for (const auto& [name, c] : in) distinct.insert(c);
    CHECK(tm.scenarios.size() == distinct.size());

    std::map<std::string, SystemConfig> back;
    std::size_t members = 0;
    for (const auto& s : tm.scenarios) {
      members += s.members.size();
      for (const auto& m : s.members) back[m] = s.config;
    }
    CHECK(members == in.size());
    CHECK(back == in);
  }
}

TEST_CASE("tuning time estimate") {
  const auto e = estimate_tuning_time(5, 4, 14, 18, 60.0);
  CHECK(e.exhaustive == 302400.0);
  CHECK(e.model_based == 840.0);
  CHECK(e.exhaustive / e.model_based == 360.0);
  CHECK(estimate_tuning_time(1, 1, 1, 1, 2.0).model_based == 22.0);
  CHECK_THROWS_AS(estimate_tuning_time(0, 4, 14, 18, 60.0), Error);
  CHECK_THROWS_AS(estimate_tuning_time(5, 4, 14, 18, 0.0), Error);

  double previous = 0;
  for (int n = 1; n <= 10; ++n) {
    const auto r = estimate_tuning_time(n, 4, 14, 18, 1.0);
    CHECK(r.exhaustive / r.model_based > previous);
    previous = r.exhaustive / r.model_based;
  }
}

TEST_CASE("workflow with no significant regions keeps the system default") {
  Application app{"tiny", 5, {make_archetype("a", 0.2, 0.02), make_archetype("b", 0.8, 0.03)}};
  SimulatedNode sim(app, fixtures::quiet_node());
  const auto r = run_tuning_workflow(sim, profile_regions(app, sim.node(), default_system_config()),
                                     fixtures::trained_model(), WorkflowOptions{});
  CHECK(r.significant.empty());
  CHECK(r.tuning_model.scenarios.empty());
  CHECK(r.tuning_model.default_config == default_system_config());
  CHECK(sim.runs() == 0);
}

TEST_CASE("workflow on the compute-bound analog") {
  const auto app = fixtures::compute_bound_app();
  SimulatedNode sim(app, fixtures::quiet_node());
  const auto r = run_tuning_workflow(sim, profile_regions(app, sim.node(), default_system_config()),
                                     fixtures::trained_model(), WorkflowOptions{});
  CHECK(r.significant.size() == 5);
  CHECK(r.threads.best_threads == 24);
  CHECK(r.measured_runs == 4 + 1 + static_cast<long>(r.candidates.size()));
  CHECK(sim.runs() == r.measured_runs);
  CHECK(r.time.n == 5);
  CHECK(r.time.k == 4);
  CHECK(r.time.exhaustive / r.time.model_based == doctest::Approx(360.0));
  CHECK(r.tuning_model.default_config.core == r.global.first);
  for (const auto& [name, c] : r.region_configs) {
    CHECK(c.core >= Frequency::from_ghz(2.2));
    CHECK(c.uncore <= Frequency::from_ghz(2.1));
  }
}
