#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eatune/domain.hpp"
#include "eatune/energy_model.hpp"
#include "eatune/measurement.hpp"

namespace eatune {

struct ThreadSweepSpec {
  int lower_bound = 12;
  int step = 4;
  int upper_bound = 24;

  std::vector<int> candidates() const;
};

std::vector<std::string> detect_significant_regions(const std::vector<RegionProfile>& profiles,
                                                    double threshold = 0.100);

struct ThreadTuningResult {
  int best_threads = 0;
  std::vector<std::pair<int, double>> energies;  // (threads, phase energy)
};

/// Exhaustive thread sweep at fixed frequencies; ties go to fewer threads.
ThreadTuningResult tune_threads(MeasurementProvider& measure, const ThreadSweepSpec& sweep,
                                Frequency fixed_cf, Frequency fixed_ucf);

using FrequencyPair = std::pair<Frequency, Frequency>;  // (core, uncore)

/// Argmin of the predicted energy surface; ties go to lower CF, then lower UCF.
FrequencyPair predict_global_frequencies(const EnergyModel& model, const PmcVector& phase_rates,
                                         const FrequencyGrid& grid);
FrequencyPair surface_argmin(const EnergySurface& surface);

/// The 3 x 3 block around `center`, clipped to the grid, in ascending order.
std::vector<FrequencyPair> neighborhood(const FrequencyPair& center, const FrequencyGrid& grid);

/// One phase run per candidate; each region takes the candidate with its
/// lowest attributed energy. Ties go to the earlier candidate.
std::map<std::string, SystemConfig> tune_regions(MeasurementProvider& measure,
                                                 const std::vector<std::string>& significant,
                                                 const std::vector<FrequencyPair>& candidates,
                                                 int threads);

/// Groups regions with identical configurations into scenarios, ordered by
/// configuration.
TuningModel generate_tuning_model(const std::map<std::string, SystemConfig>& region_configs,
                                  const SystemConfig& default_config);

struct TuningTimeEstimate {
  int n = 0, k = 0, l = 0, m = 0;
  double t = 0.0;
  double exhaustive = 0.0;   // n * k * l * m * t
  double model_based = 0.0;  // (k + 1 + 9) * t
};

TuningTimeEstimate estimate_tuning_time(int n, int k, int l, int m, double t);

struct WorkflowOptions {
  FrequencyGrid grid;
  ThreadSweepSpec sweep;
  double significance_threshold = 0.100;
  CalibrationPoint calibration;
  SystemConfig system_default = default_system_config();
};

/// Everything the four tuning steps produced, for reporting.
struct WorkflowResult {
  std::vector<std::string> significant;
  ThreadTuningResult threads;
  PmcVector phase_rates;
  FrequencyPair global{};
  std::vector<FrequencyPair> candidates;
  std::map<std::string, SystemConfig> region_configs;
  TuningModel tuning_model;
  TuningTimeEstimate time;
  long measured_runs = 0;
};

/// Region detection, thread sweep at the system default frequencies, one
/// counter run at the calibration point, model-driven frequency choice,
/// neighborhood verification and scenario grouping.
WorkflowResult run_tuning_workflow(MeasurementProvider& measure,
                                   const std::vector<RegionProfile>& profiles,
                                   const EnergyModel& model, const WorkflowOptions& options);

}  // namespace eatune
