#pragma once

#include <string>
#include <vector>

#include "eatune/commands.hpp"
#include "eatune/energy_model.hpp"
#include "eatune/simulator.hpp"

namespace eatune::fixtures {

inline Application single_region_app(const std::string& name, double boundedness,
                                     double base_work = 0.5) {
  return Application{name, 10, {make_archetype(name + "_kernel", boundedness, base_work)}};
}

/// Six benchmarks spanning compute- to memory-bound behavior.
inline std::vector<Application> corpus_apps() {
  return {
      single_region_app("bench_a", 0.05),
      single_region_app("bench_b", 0.25),
      single_region_app("bench_c", 0.45),
      single_region_app("bench_d", 0.60),
      single_region_app("bench_e", 0.80),
      single_region_app("bench_f", 0.95),
  };
}

inline std::vector<io::ProfileDocument> corpus_profiles(double noise, std::uint64_t seed = 1) {
  std::vector<io::ProfileDocument> docs;
  std::uint64_t k = seed;
  for (const auto& app : corpus_apps()) {
    NodeModel node;
    node.noise_sigma = noise;
    node.seed = k++;
    docs.push_back(simulate_profile(app, node, FrequencyGrid{}, 24));
  }
  return docs;
}

inline BenchmarkSet corpus(double noise, std::uint64_t seed = 1) {
  return benchmark_rows(corpus_profiles(noise, seed));
}

inline std::vector<TrainingRow> flatten(const BenchmarkSet& set) {
  std::vector<TrainingRow> rows;
  for (const auto& [name, r] : set) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

/// Energy model trained for 10 epochs on the noisy corpus.
inline const EnergyModel& trained_model() {
  static const EnergyModel model = [] {
    TrainingConfig cfg;
    cfg.epochs = 10;
    cfg.seed = 7;
    return train(flatten(corpus(0.005)), cfg).model;
  }();
  return model;
}

/// Five significant compute-bound regions plus one short region.
inline Application compute_bound_app() {
  return Application{"lulesh_like",
                     20,
                     {make_archetype("IntegrateStressForElems", 0.02, 0.40),
                      make_archetype("CalcFBHourglassForceForElems", 0.00, 0.55),
                      make_archetype("CalcKinematicsForElems", 0.05, 0.25),
                      make_archetype("CalcQForElems", 0.03, 0.30),
                      make_archetype("ApplyMaterialPropertiesForElems", 0.04, 0.20),
                      make_archetype("TimeIncrement", 0.10, 0.01)}};
}

inline Application memory_bound_app() {
  return Application{"mcb_like",
                     20,
                     {make_archetype("omp_parallel:501", 0.95, 0.60),
                      make_archetype("setupDT", 0.98, 0.30),
                      make_archetype("advancePhotons", 1.00, 0.45)}};
}

/// Five significant regions from both ends of the boundedness range.
inline Application heterogeneous_app() {
  return Application{"hetero",
                     20,
                     {make_archetype("compute_a", 0.00, 0.50),
                      make_archetype("memory_a", 1.00, 0.50),
                      make_archetype("compute_b", 0.05, 0.40),
                      make_archetype("memory_b", 0.95, 0.40),
                      make_archetype("mixed", 0.50, 0.30)}};
}

inline Application homogeneous_app() {
  return Application{"homog",
                     20,
                     {make_archetype("stage_1", 0.30, 0.50),
                      make_archetype("stage_2", 0.30, 0.40),
                      make_archetype("stage_3", 0.30, 0.30),
                      make_archetype("stage_4", 0.30, 0.35),
                      make_archetype("stage_5", 0.30, 0.45)}};
}

inline NodeModel quiet_node(double power_offset = 0.0) {
  NodeModel node;
  node.noise_sigma = 0.0;
  node.power_offset = power_offset;
  return node;
}

}  // namespace eatune::fixtures
