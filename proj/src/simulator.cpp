#include "eatune/simulator.hpp"

#include <cmath>
#include <limits>

#include "eatune/rng.hpp"

namespace eatune {

PmcVector counter_signature_for(double boundedness) {
  const double mu = boundedness;
  CounterValues v;
  v << 1.5e8 * (1.0 - 0.6 * mu),   // BR_NTK
      9.0e8 * (1.0 - 0.55 * mu),   // LD_INS
      4.0e6 * (1.0 + 0.5 * mu),    // L2_ICR
      6.0e6 * (1.0 - 0.4 * mu),    // BR_MSP
      3.0e8 * (0.4 + 1.6 * mu),    // RES_STL
      4.0e8 * (1.0 - 0.5 * mu),    // SR_INS
      5.0e7 * (0.3 + 2.2 * mu);    // L2_DCR
  return PmcVector(v, true);
}

void check_archetype(const RegionArchetype& a) {
  if (!(a.boundedness >= 0.0 && a.boundedness <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "region " + a.name + ": boundedness must lie in [0, 1]");
  }
  if (!(a.base_work >= 0.0) || !std::isfinite(a.base_work)) {
    throw Error(ErrorKind::InvalidInput, "region " + a.name + ": base work must be non-negative");
  }
  if (!(a.thread_scaling > 0.0 && a.thread_scaling <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "region " + a.name + ": thread scaling must lie in (0, 1]");
  }
  if (!a.counter_signature.normalized) {
    throw Error(ErrorKind::InvalidInput, "region " + a.name + ": signature must be rates");
  }
}

RegionArchetype make_archetype(std::string name, double boundedness, double base_work,
                               double thread_scaling) {
  RegionArchetype a{std::move(name), boundedness, base_work, thread_scaling, {}};
  if (boundedness >= 0.0 && boundedness <= 1.0) {
    a.counter_signature = counter_signature_for(boundedness);
  }
  check_archetype(a);
  return a;
}

namespace {

void check_node_config(const NodeModel& node, const SystemConfig& c) {
  if (c.omp_threads < 1 || c.omp_threads > node.cores) {
    throw Error(ErrorKind::InvalidConfig, "thread count " + std::to_string(c.omp_threads) +
                                              " outside 1.." + std::to_string(node.cores));
  }
  if (c.core.deci() <= 0 || c.uncore.deci() <= 0) {
    throw Error(ErrorKind::InvalidConfig, "frequencies must be positive");
  }
}

double nominal_power(const PowerCoefficients& k, int threads, double cf, double ucf) {
  return k.p_static + k.alpha * cf * cf * cf + k.beta * ucf * ucf + k.gamma * threads;
}

double noise_factor(const NodeModel& node, const std::string& region, const SystemConfig& c) {
  if (node.noise_sigma == 0.0) return 1.0;
  std::uint64_t key = hash_string(node.seed, region.c_str());
  key = hash_combine(key, static_cast<std::uint64_t>(c.omp_threads));
  key = hash_combine(key, static_cast<std::uint64_t>(c.core.deci()));
  key = hash_combine(key, static_cast<std::uint64_t>(c.uncore.deci()));
  CounterRng rng(key);
  return 1.0 + node.noise_sigma * rng.normal();
}

void check_tuning_model(const TuningModel& tm, const NodeModel& node) {
  auto check = [&](const SystemConfig& c) {
    try {
      check_node_config(node, c);
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidTuningModel, std::string("tuning model: ") + e.what());
    }
  };
  check(tm.default_config);
  for (const auto& s : tm.scenarios) check(s.config);
}

}  // namespace

double node_power(const NodeModel& node, const SystemConfig& c) {
  const auto& k = node.power;
  const double calibration = nominal_power(k, k.reference_threads, 2.0, 1.5);
  const double scale = 1.0 + node.power_offset / calibration;
  return scale * nominal_power(k, c.omp_threads, c.core.ghz(), c.uncore.ghz());
}

double region_time(const RegionArchetype& a, const NodeModel& node, const SystemConfig& c) {
  check_node_config(node, c);
  const auto& k = node.power;
  const double mu = a.boundedness;
  const double shares = (1.0 - mu) * (k.cf_ref / c.core.ghz()) + mu * (k.ucf_ref / c.uncore.ghz());
  const double parallel = std::pow(static_cast<double>(c.omp_threads) / k.reference_threads,
                                   a.thread_scaling);
  return a.base_work * shares / parallel;
}

RegionEnergy ground_truth_energy(const RegionArchetype& a, const NodeModel& node,
                                 const SystemConfig& c) {
  const double time = region_time(a, node, c);
  return RegionEnergy{node_power(node, c) * time * noise_factor(node, a.name, c), time};
}

RunReport run_static(const Application& app, const NodeModel& node, const SystemConfig& config) {
  check_node_config(node, config);
  std::vector<RegionEnergy> per_call;
  for (const auto& region : app.regions) per_call.push_back(ground_truth_energy(region, node, config));

  RunReport report;
  for (int it = 0; it < app.iterations; ++it) {
    for (std::size_t r = 0; r < app.regions.size(); ++r) {
      auto& total = report.per_region[app.regions[r].name];
      total.energy += per_call[r].energy;
      total.time += per_call[r].time;
      report.job_energy += per_call[r].energy;
      report.wall_time += per_call[r].time;
    }
  }
  report.cpu_energy = report.job_energy - node.power.platform_power * report.wall_time;
  return report;
}

RunReport run_dynamic(const Application& app, const NodeModel& node, const TuningModel& tm) {
  check_tuning_model(tm, node);

  // resolve each region once; the sequence repeats every phase iteration
  std::vector<SystemConfig> configs;
  std::vector<RegionEnergy> per_call;
  for (const auto& region : app.regions) {
    configs.push_back(tm.lookup(region.name).value_or(tm.default_config));
    per_call.push_back(ground_truth_energy(region, node, configs.back()));
  }

  RunReport report;
  SystemConfig current = tm.default_config;
  for (int it = 0; it < app.iterations; ++it) {
    for (std::size_t r = 0; r < app.regions.size(); ++r) {
      const SystemConfig& target = configs[r];
      if (target != current) {
        double latency = 0.0;
        if (target.core != current.core) latency += node.cf_transition;
        if (target.uncore != current.uncore) latency += node.ucf_transition;
        report.switch_count += 1;
        report.switch_overhead_time += latency;
        report.wall_time += latency;
        report.job_energy += latency * node_power(node, current);
        current = target;
      }
      auto& total = report.per_region[app.regions[r].name];
      total.energy += per_call[r].energy;
      total.time += per_call[r].time;
      report.job_energy += per_call[r].energy;
      report.wall_time += per_call[r].time;
    }
  }
  report.cpu_energy = report.job_energy - node.power.platform_power * report.wall_time;
  return report;
}

Savings compute_savings(const RunReport& baseline, const RunReport& tuned) {
  if (baseline.job_energy == 0.0 || baseline.cpu_energy == 0.0 || baseline.wall_time == 0.0) {
    throw Error(ErrorKind::InvalidInput, "savings baseline has a zero metric");
  }
  auto pct = [](double base, double value) { return 100.0 * (base - value) / base; };
  return Savings{pct(baseline.job_energy, tuned.job_energy),
                 pct(baseline.cpu_energy, tuned.cpu_energy),
                 pct(baseline.wall_time, tuned.wall_time)};
}

PhaseSample measure_phase(const Application& app, const NodeModel& node,
                          const SystemConfig& config, bool with_counters) {
  check_node_config(node, config);
  PhaseSample sample;
  sample.config = config;
  sample.node_id = node.node_id;
  CounterValues counts = CounterValues::Zero();
  for (const auto& region : app.regions) {
    const RegionEnergy e = ground_truth_energy(region, node, config);
    sample.duration += e.time;
    sample.node_energy += e.energy;
    sample.region_energy[region.name] += e.energy;
    counts += region.counter_signature.values * e.time;
  }
  sample.node_energy += 2.0 * node.measurement_delay * node_power(node, config);
  if (with_counters) sample.counters = PmcVector(counts, false);
  return sample;
}

std::vector<RegionProfile> profile_regions(const Application& app, const NodeModel& node,
                                           const SystemConfig& config) {
  std::vector<RegionProfile> out;
  for (const auto& region : app.regions) {
    out.push_back(RegionProfile{region.name, std::max(app.iterations, 1),
                                region_time(region, node, config), {}});
  }
  return out;
}

std::vector<PhaseSample> sweep_grid(const Application& app, const NodeModel& node,
                                    const FrequencyGrid& grid, int threads) {
  std::vector<PhaseSample> out;
  out.reserve(grid.size());
  for (Frequency cf : grid.core_values()) {
    for (Frequency ucf : grid.uncore_values()) {
      out.push_back(measure_phase(app, node, SystemConfig{threads, cf, ucf}, true));
    }
  }
  return out;
}

StaticOptimum best_static(const Application& app, const NodeModel& node,
                          const FrequencyGrid& grid, const std::vector<int>& thread_candidates) {
  if (thread_candidates.empty()) {
    throw Error(ErrorKind::InvalidInput, "no thread candidates for static search");
  }
  StaticOptimum best{SystemConfig{}, RunReport{}};
  double best_energy = std::numeric_limits<double>::infinity();
  for (int threads : thread_candidates) {
    for (Frequency cf : grid.core_values()) {
      for (Frequency ucf : grid.uncore_values()) {
        const SystemConfig c{threads, cf, ucf};
        RunReport r = run_static(app, node, c);
        if (r.job_energy < best_energy) {
          best_energy = r.job_energy;
          best = StaticOptimum{c, std::move(r)};
        }
      }
    }
  }
  return best;
}

SimulatedNode::SimulatedNode(Application app, NodeModel node)
    : app_(std::move(app)), node_(std::move(node)) {
  for (const auto& r : app_.regions) check_archetype(r);
}

PhaseSample SimulatedNode::measure(const SystemConfig& config, bool with_counters) {
  ++runs_;
  return measure_phase(app_, node_, config, with_counters);
}

}  // namespace eatune
