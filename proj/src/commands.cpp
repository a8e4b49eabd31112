#include "eatune/commands.hpp"

#include <cstdarg>
#include <cstdio>
#include <filesystem>

#include "eatune/rng.hpp"

namespace eatune {

namespace {

void printf_to(std::ostream& os, const char* fmt, ...) __attribute__((format(printf, 2, 3)));

void printf_to(std::ostream& os, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  os << buf;
}

ThreadSweepSpec sweep_for(int lower, int step, const NodeModel& node) {
  return ThreadSweepSpec{lower, step, node.cores};
}

}  // namespace

ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Numerical:
    case ErrorKind::DegenerateFeature:
    case ErrorKind::CollinearFeature:
      return ExitCode::Numerical;
    default:
      return ExitCode::Data;
  }
}

NodeModel resolve_node(const io::ExperimentSpec& spec, const SimulationOverrides& o,
                       std::size_t index) {
  if (spec.nodes.empty()) {
    throw Error(ErrorKind::InvalidInput, "experiment defines no nodes");
  }
  NodeModel node = spec.nodes[index % spec.nodes.size()];
  node.seed = hash_combine(node.seed, o.seed);
  if (o.noise) {
    if (*o.noise < 0.0) throw Error(ErrorKind::InvalidInput, "noise must be non-negative");
    node.noise_sigma = *o.noise;
  }
  return node;
}

const Application& find_application(const io::ExperimentSpec& spec, const std::string& name) {
  if (spec.applications.empty()) {
    throw Error(ErrorKind::InvalidInput, "experiment defines no applications");
  }
  if (name.empty()) return spec.applications.front();
  for (const auto& app : spec.applications) {
    if (app.name == name) return app;
  }
  throw Error(ErrorKind::InvalidInput, "no application named " + name);
}

io::ProfileDocument simulate_profile(const Application& app, const NodeModel& node,
                                     const FrequencyGrid& grid, int threads) {
  return io::ProfileDocument{app.name, node.node_id, sweep_grid(app, node, grid, threads)};
}

BenchmarkSet benchmark_rows(const std::vector<io::ProfileDocument>& docs) {
  BenchmarkSet set;
  for (const auto& doc : docs) {
    if (set.contains(doc.benchmark)) {
      throw Error(ErrorKind::InvalidInput, "benchmark " + doc.benchmark + " appears twice");
    }
    try {
      set[doc.benchmark] = rows_from_sweep(doc.records).rows;
    } catch (const Error& e) {
      throw Error(e.kind(), "benchmark " + doc.benchmark + ": " + e.what());
    }
  }
  return set;
}

ComparisonResult compare_static_dynamic(const Application& app, const NodeModel& node,
                                        const TuningModel& tm, const FrequencyGrid& grid,
                                        const std::vector<int>& thread_candidates) {
  ComparisonResult r;
  r.baseline = run_static(app, node, default_system_config());
  r.best_static = best_static(app, node, grid, thread_candidates);
  r.dynamic = run_dynamic(app, node, tm);
  r.static_savings = compute_savings(r.baseline, r.best_static.report);
  r.dynamic_savings = compute_savings(r.baseline, r.dynamic);
  return r;
}

void cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream&) {
  const io::ExperimentSpec spec = io::read_experiment(o.experiment);
  if (spec.applications.empty()) {
    throw Error(ErrorKind::InvalidInput, o.experiment.string() + ": no applications");
  }
  std::filesystem::create_directories(o.out_dir);
  for (std::size_t i = 0; i < spec.applications.size(); ++i) {
    const Application& app = spec.applications[i];
    NodeModel node = resolve_node(spec, o.sim, i);
    node.seed = hash_string(node.seed, app.name.c_str());
    const io::ProfileDocument doc = simulate_profile(app, node, o.grid, o.threads);
    const auto path = o.out_dir / (app.name + ".json");
    io::write_json(path, io::to_json(doc));
    printf_to(out, "%-24s %-10s %4zu records -> %s\n", app.name.c_str(), node.node_id.c_str(),
              doc.records.size(), path.string().c_str());
  }
}

void cmd_train(const TrainOptions& o, std::ostream& out, std::ostream&) {
  const auto docs = io::read_profile_dir(o.profiles_dir);
  if (docs.size() < 2) {
    throw Error(ErrorKind::InvalidInput,
                "need >= 2 benchmarks, found " + std::to_string(docs.size()) + " in " +
                    o.profiles_dir.string());
  }
  const BenchmarkSet set = benchmark_rows(docs);
  std::vector<TrainingRow> rows;
  for (const auto& [name, r] : set) rows.insert(rows.end(), r.begin(), r.end());

  printf_to(out, "training on %zu benchmarks, %zu samples, %d epochs, lr %g, seed %llu\n",
            set.size(), rows.size(), o.training.epochs, o.training.learning_rate,
            static_cast<unsigned long long>(o.training.seed));
  const TrainResult result = train(rows, o.training);
  for (std::size_t e = 0; e < result.epoch_mse.size(); ++e) {
    printf_to(out, "epoch %3zu  mse %.6e\n", e + 1, result.epoch_mse[e]);
  }
  io::write_json(o.out_model, io::to_json(result.model));
  printf_to(out, "model written to %s\n", o.out_model.string().c_str());
}

void cmd_loocv(const LoocvOptions& o, std::ostream& out, std::ostream&) {
  const auto docs = io::read_profile_dir(o.profiles_dir);
  if (docs.size() < 2) {
    throw Error(ErrorKind::InvalidInput,
                "need >= 2 benchmarks, found " + std::to_string(docs.size()) + " in " +
                    o.profiles_dir.string());
  }
  const EvalReport report = loocv(benchmark_rows(docs), o.training);
  printf_to(out, "%-24s %10s\n", "benchmark", "MAPE [%]");
  for (const auto& [name, value] : report.per_benchmark_mape) {
    printf_to(out, "%-24s %10.2f\n", name.c_str(), value);
  }
  printf_to(out, "%-24s %10.2f\n", "mean", report.mean_mape);
  if (o.out_report) io::write_json(*o.out_report, io::to_json(report, o.training));
}

void cmd_tune(const TuneOptions& o, std::ostream& out, std::ostream& err) {
  const io::ExperimentSpec spec = io::read_experiment(o.experiment);
  const Application& app = find_application(spec, o.application);
  const NodeModel node = resolve_node(spec, o.sim);
  const EnergyModel model = io::read_energy_model(o.model);

  WorkflowOptions wf;
  wf.grid = o.grid;
  wf.sweep = sweep_for(o.sweep_lower, o.sweep_step, node);

  SimulatedNode provider(app, node);
  const auto profiles = profile_regions(app, node, wf.system_default);
  const WorkflowResult r = run_tuning_workflow(provider, profiles, model, wf);

  printf_to(out, "application %s on %s\n", app.name.c_str(), node.node_id.c_str());
  printf_to(out, "[1] significant regions (> %.0f ms): %zu of %zu\n",
            wf.significance_threshold * 1e3, r.significant.size(), profiles.size());
  for (const auto& name : r.significant) printf_to(out, "      %s\n", name.c_str());

  if (r.significant.empty()) {
    err << "warning: no significant regions; tuning model holds the default config only\n";
  } else {
    printf_to(out, "[2] thread sweep at %s|%s GHz\n", format_ghz(wf.system_default.core).c_str(),
              format_ghz(wf.system_default.uncore).c_str());
    for (const auto& [threads, energy] : r.threads.energies) {
      printf_to(out, "      %3d threads  %12.3f J\n", threads, energy);
    }
    printf_to(out, "      best: %d threads\n", r.threads.best_threads);
    printf_to(out, "[3] predicted global frequencies: %s|%s GHz\n",
              format_ghz(r.global.first).c_str(), format_ghz(r.global.second).c_str());
    printf_to(out, "[4] verified %zu neighboring frequency pairs\n", r.candidates.size());
    for (const auto& [region, c] : r.region_configs) {
      printf_to(out, "      %-36s %s\n", region.c_str(), to_string(c).c_str());
    }
  }
  printf_to(out, "[5] tuning model: %zu scenarios, default %s\n", r.tuning_model.scenarios.size(),
            to_string(r.tuning_model.default_config).c_str());
  if (!r.significant.empty()) {
    printf_to(out,
              "tuning time: exhaustive %.1f s vs model-based %.1f s (ratio %.1f, %ld runs, "
              "t = %.3f s)\n",
              r.time.exhaustive, r.time.model_based, r.time.exhaustive / r.time.model_based,
              r.measured_runs, r.time.t);
  }

  io::TuningModelDocument doc{r.tuning_model, {io::file_hash(o.model), o.sim.seed, o.grid}};
  io::write_json(o.out_tuning_model, io::to_json(doc));
  printf_to(out, "tuning model written to %s\n", o.out_tuning_model.string().c_str());
}

void cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream&) {
  const io::ExperimentSpec spec = io::read_experiment(o.experiment);
  const Application& app = find_application(spec, o.application);
  const NodeModel node = resolve_node(spec, o.sim);
  const io::TuningModelDocument tm = io::read_tuning_model(o.tuning_model);

  const auto candidates = sweep_for(o.sweep_lower, o.sweep_step, node).candidates();
  const ComparisonResult r = compare_static_dynamic(app, node, tm.model, o.grid, candidates);

  const double overhead_pct =
      r.dynamic.wall_time > 0.0 ? 100.0 * r.dynamic.switch_overhead_time / r.dynamic.wall_time : 0.0;
  printf_to(out, "application %s on %s (baseline %s)\n", app.name.c_str(), node.node_id.c_str(),
            to_string(default_system_config()).c_str());
  printf_to(out, "%-10s %-30s %9s %9s %9s\n", "tuning", "config", "job [%]", "cpu [%]", "time [%]");
  printf_to(out, "%-10s %-30s %9.2f %9.2f %9.2f\n", "static",
            to_string(r.best_static.config).c_str(), r.static_savings.job, r.static_savings.cpu,
            r.static_savings.time);
  printf_to(out, "%-10s %-30s %9.2f %9.2f %9.2f\n", "dynamic", "tuning model",
            r.dynamic_savings.job, r.dynamic_savings.cpu, r.dynamic_savings.time);
  printf_to(out, "switches: %ld, overhead %.6f s (%.4f%% of run time)\n", r.dynamic.switch_count,
            r.dynamic.switch_overhead_time, overhead_pct);

  if (o.out_report) {
    nlohmann::ordered_json j;
    j["schema_version"] = io::kSchemaVersion;
    j["kind"] = "comparison";
    j["application"] = app.name;
    j["baseline"] = io::to_json(r.baseline);
    j["static"] = io::to_json(r.best_static.report);
    j["static"]["config"] = io::to_json(r.best_static.config);
    j["dynamic"] = io::to_json(r.dynamic);
    auto savings = [](const Savings& s) {
      return nlohmann::ordered_json{{"job", s.job}, {"cpu", s.cpu}, {"time", s.time}};
    };
    j["static_savings"] = savings(r.static_savings);
    j["dynamic_savings"] = savings(r.dynamic_savings);
    io::write_json(*o.out_report, j);
  }
}

}  // namespace eatune
