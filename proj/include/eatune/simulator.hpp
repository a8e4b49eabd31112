#pragma once

#include <map>
#include <string>
#include <vector>

#include "eatune/domain.hpp"
#include "eatune/measurement.hpp"

namespace eatune {

/// A synthetic program region. `boundedness` runs from 0 (compute-bound) to
/// 1 (memory-bound); `base_work` is its time at the node's reference config.
struct RegionArchetype {
  std::string name;
  double boundedness = 0.0;
  double base_work = 0.0;
  double thread_scaling = 1.0;
  PmcVector counter_signature;  // rates, counts per second
};

/// Counter rates as a monotone function of boundedness: stall cycles and L2
/// data reads rise with it, loads, stores and branch counts fall.
PmcVector counter_signature_for(double boundedness);

RegionArchetype make_archetype(std::string name, double boundedness, double base_work,
                               double thread_scaling = 1.0);

void check_archetype(const RegionArchetype& a);

/// One phase iteration runs every region once, in order.
struct Application {
  std::string name;
  int iterations = 1;
  std::vector<RegionArchetype> regions;
};

/// Power surrogate coefficients:
///   P = p_static + alpha * cf^3 + beta * ucf^2 + gamma * threads   [W, GHz]
/// scaled per node so the node draws `power_offset` extra watts at the
/// calibration config. `platform_power` is the non-CPU share of p_static.
struct PowerCoefficients {
  double p_static = 110.0;
  double alpha = 2.5;
  double beta = 17.0;
  double gamma = 0.8;
  double platform_power = 45.0;
  double cf_ref = 2.5;
  double ucf_ref = 3.0;
  int reference_threads = 24;

  bool operator==(const PowerCoefficients&) const = default;
};

struct NodeModel {
  std::string node_id = "node0";
  double power_offset = 0.0;   // W at the calibration config
  double noise_sigma = 0.005;  // relative, multiplicative Gaussian
  double cf_transition = 21e-6;
  double ucf_transition = 20e-6;
  double measurement_delay = 5e-3;
  int cores = 24;
  std::uint64_t seed = 0;
  PowerCoefficients power;

  bool operator==(const NodeModel&) const = default;
};

/// Node power at `c`, including per-node variability.
double node_power(const NodeModel& node, const SystemConfig& c);
/// Noise-free surrogate time of one call of `a` under `c`.
double region_time(const RegionArchetype& a, const NodeModel& node, const SystemConfig& c);

struct RegionEnergy {
  double energy = 0.0;  // J
  double time = 0.0;    // s

  bool operator==(const RegionEnergy&) const = default;
};

RegionEnergy ground_truth_energy(const RegionArchetype& a, const NodeModel& node,
                                 const SystemConfig& c);

struct RunReport {
  double job_energy = 0.0;
  double cpu_energy = 0.0;
  double wall_time = 0.0;
  std::map<std::string, RegionEnergy> per_region;
  long switch_count = 0;
  double switch_overhead_time = 0.0;

  bool operator==(const RunReport&) const = default;
};

RunReport run_static(const Application& app, const NodeModel& node, const SystemConfig& config);
RunReport run_dynamic(const Application& app, const NodeModel& node, const TuningModel& tm);

struct Savings {
  double job = 0.0;   // percent
  double cpu = 0.0;   // percent
  double time = 0.0;  // percent; negative means slower
};

Savings compute_savings(const RunReport& baseline, const RunReport& tuned);

/// One phase iteration. The energy window is widened by the measurement delay
/// at both phase boundaries.
PhaseSample measure_phase(const Application& app, const NodeModel& node,
                          const SystemConfig& config, bool with_counters);

/// Per-region mean times under `config`, as a profiling run would report.
std::vector<RegionProfile> profile_regions(const Application& app, const NodeModel& node,
                                           const SystemConfig& config);

/// Phase samples with counters at every grid point for a fixed thread count.
std::vector<PhaseSample> sweep_grid(const Application& app, const NodeModel& node,
                                    const FrequencyGrid& grid, int threads);

struct StaticOptimum {
  SystemConfig config;
  RunReport report;
};

/// Exhaustive search over grid x thread candidates for the lowest job energy.
StaticOptimum best_static(const Application& app, const NodeModel& node,
                          const FrequencyGrid& grid, const std::vector<int>& thread_candidates);

/// MeasurementProvider backed by the surrogate.
class SimulatedNode final : public MeasurementProvider {
 public:
  SimulatedNode(Application app, NodeModel node);

  PhaseSample measure(const SystemConfig& config, bool with_counters) override;

  long runs() const { return runs_; }
  const Application& application() const { return app_; }
  const NodeModel& node() const { return node_; }

 private:
  Application app_;
  NodeModel node_;
  long runs_ = 0;
};

}  // namespace eatune
