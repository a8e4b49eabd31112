#include "eatune/tuning.hpp"

#include <algorithm>
#include <limits>

#include "eatune/features.hpp"

namespace eatune {

std::vector<int> ThreadSweepSpec::candidates() const {
  if (lower_bound < 1 || step < 1 || lower_bound > upper_bound) {
    throw Error(ErrorKind::InvalidInput, "thread sweep needs 1 <= lower <= upper and step >= 1");
  }
  std::vector<int> out;
  for (int t = lower_bound; t <= upper_bound; t += step) out.push_back(t);
  return out;
}

std::vector<std::string> detect_significant_regions(const std::vector<RegionProfile>& profiles,
                                                    double threshold) {
  std::vector<std::string> out;
  for (const auto& p : profiles) {
    if (p.mean_exec_time > threshold) out.push_back(p.region_name);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ThreadTuningResult tune_threads(MeasurementProvider& measure, const ThreadSweepSpec& sweep,
                                Frequency fixed_cf, Frequency fixed_ucf) {
  ThreadTuningResult result;
  double best = std::numeric_limits<double>::infinity();
  for (int threads : sweep.candidates()) {
    PhaseSample s;
    try {
      s = measure.measure(SystemConfig{threads, fixed_cf, fixed_ucf}, false);
      check_sample(s);
    } catch (const Error& e) {
      throw Error(e.kind(), "thread candidate " + std::to_string(threads) + ": " + e.what());
    }
    result.energies.emplace_back(threads, s.node_energy);
    if (s.node_energy < best) {
      best = s.node_energy;
      result.best_threads = threads;
    }
  }
  return result;
}

FrequencyPair surface_argmin(const EnergySurface& surface) {
  const auto cores = surface.grid.core_values();
  const auto uncores = surface.grid.uncore_values();
  FrequencyPair best{cores.front(), uncores.front()};
  double best_value = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < surface.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < surface.values.cols(); ++j) {
      if (surface.values(i, j) < best_value) {
        best_value = surface.values(i, j);
        best = {cores[static_cast<std::size_t>(i)], uncores[static_cast<std::size_t>(j)]};
      }
    }
  }
  return best;
}

FrequencyPair predict_global_frequencies(const EnergyModel& model, const PmcVector& phase_rates,
                                         const FrequencyGrid& grid) {
  return surface_argmin(predict_surface(model, phase_rates, grid));
}

std::vector<FrequencyPair> neighborhood(const FrequencyPair& center, const FrequencyGrid& grid) {
  if (!grid.contains_core(center.first) || !grid.contains_uncore(center.second)) {
    throw Error(ErrorKind::InvalidInput, "neighborhood center " + format_ghz(center.first) + "|" +
                                             format_ghz(center.second) + " is off the grid");
  }
  std::vector<FrequencyPair> out;
  for (int dc = -1; dc <= 1; ++dc) {
    const Frequency cf = Frequency::from_deci(center.first.deci() + dc * grid.cf_step());
    if (!grid.contains_core(cf)) continue;
    for (int du = -1; du <= 1; ++du) {
      const Frequency ucf = Frequency::from_deci(center.second.deci() + du * grid.ucf_step());
      if (grid.contains_uncore(ucf)) out.emplace_back(cf, ucf);
    }
  }
  return out;
}

std::map<std::string, SystemConfig> tune_regions(MeasurementProvider& measure,
                                                 const std::vector<std::string>& significant,
                                                 const std::vector<FrequencyPair>& candidates,
                                                 int threads) {
  if (candidates.empty()) {
    throw Error(ErrorKind::InvalidInput, "no frequency candidates to verify");
  }
  std::map<std::string, SystemConfig> best_config;
  std::map<std::string, double> best_energy;
  for (const auto& [cf, ucf] : candidates) {
    const SystemConfig config{threads, cf, ucf};
    PhaseSample s;
    try {
      s = measure.measure(config, false);
    } catch (const Error& e) {
      throw Error(e.kind(), "candidate " + to_string(config) + ": " + e.what());
    }
    for (const auto& region : significant) {
      auto it = s.region_energy.find(region);
      if (it == s.region_energy.end()) {
        throw Error(ErrorKind::InvalidSample,
                    "candidate " + to_string(config) + ": no energy reported for " + region);
      }
      auto [slot, inserted] = best_energy.try_emplace(region, it->second);
      if (inserted || it->second < slot->second) {
        slot->second = it->second;
        best_config[region] = config;
      }
    }
  }
  return best_config;
}

TuningModel generate_tuning_model(const std::map<std::string, SystemConfig>& region_configs,
                                  const SystemConfig& default_config) {
  std::map<SystemConfig, std::set<std::string>> groups;
  for (const auto& [region, config] : region_configs) groups[config].insert(region);

  TuningModel tm;
  tm.default_config = default_config;
  for (auto& [config, members] : groups) tm.scenarios.push_back(Scenario{config, std::move(members)});
  return tm;
}

TuningTimeEstimate estimate_tuning_time(int n, int k, int l, int m, double t) {
  if (n < 1 || k < 1 || l < 1 || m < 1 || !(t > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "tuning-time inputs must be positive");
  }
  TuningTimeEstimate e{n, k, l, m, t, 0.0, 0.0};
  e.exhaustive = static_cast<double>(n) * k * l * m * t;
  e.model_based = static_cast<double>(k + 1 + 9) * t;
  return e;
}

WorkflowResult run_tuning_workflow(MeasurementProvider& measure,
                                   const std::vector<RegionProfile>& profiles,
                                   const EnergyModel& model, const WorkflowOptions& options) {
  WorkflowResult r;
  r.significant = detect_significant_regions(profiles, options.significance_threshold);
  if (r.significant.empty()) {
    r.tuning_model = generate_tuning_model({}, options.system_default);
    return r;
  }

  long runs = 0;
  r.threads = tune_threads(measure, options.sweep, options.system_default.core,
                           options.system_default.uncore);
  runs += static_cast<long>(r.threads.energies.size());

  const SystemConfig analysis{r.threads.best_threads, options.calibration.core,
                              options.calibration.uncore};
  PhaseSample phase = measure.measure(analysis, true);
  ++runs;
  if (!phase.counters) {
    throw Error(ErrorKind::InvalidSample, "analysis run returned no counters");
  }
  r.phase_rates = normalize_counters(*phase.counters, phase.duration);

  r.global = predict_global_frequencies(model, r.phase_rates, options.grid);
  r.candidates = neighborhood(r.global, options.grid);
  r.region_configs = tune_regions(measure, r.significant, r.candidates, r.threads.best_threads);
  runs += static_cast<long>(r.candidates.size());
  r.measured_runs = runs;

  const SystemConfig phase_default{r.threads.best_threads, r.global.first, r.global.second};
  r.tuning_model = generate_tuning_model(r.region_configs, phase_default);

  // t: one phase execution, from the analysis run
  const double t = phase.duration;
  r.time = estimate_tuning_time(static_cast<int>(r.significant.size()),
                                static_cast<int>(r.threads.energies.size()),
                                static_cast<int>(options.grid.core_count()),
                                static_cast<int>(options.grid.uncore_count()), t);
  return r;
}

}  // namespace eatune
