#pragma once

#include <filesystem>
#include <ostream>
#include <optional>
#include <string>

#include "eatune/energy_model.hpp"
#include "eatune/io.hpp"
#include "eatune/simulator.hpp"
#include "eatune/tuning.hpp"

namespace eatune {

/// Process exit codes.
enum class ExitCode : int { Ok = 0, Usage = 1, Data = 2, Numerical = 3 };

ExitCode exit_code_for(ErrorKind kind);

/// Node/noise overrides shared by the simulator-driven commands.
struct SimulationOverrides {
  std::optional<double> noise;
  std::uint64_t seed = 0;
};

/// First node of `spec` with the overrides applied; node seed derives from `seed`.
NodeModel resolve_node(const io::ExperimentSpec& spec, const SimulationOverrides& o,
                       std::size_t index = 0);
const Application& find_application(const io::ExperimentSpec& spec, const std::string& name);

io::ProfileDocument simulate_profile(const Application& app, const NodeModel& node,
                                     const FrequencyGrid& grid, int threads);

/// Model rows per benchmark, keyed by benchmark name.
BenchmarkSet benchmark_rows(const std::vector<io::ProfileDocument>& docs);

struct ComparisonResult {
  RunReport baseline;
  StaticOptimum best_static;
  RunReport dynamic;
  Savings static_savings;
  Savings dynamic_savings;
};

/// Default run, exhaustive best static run, and a dynamic run under `tm`.
ComparisonResult compare_static_dynamic(const Application& app, const NodeModel& node,
                                        const TuningModel& tm, const FrequencyGrid& grid,
                                        const std::vector<int>& thread_candidates);

struct SimulateOptions {
  std::filesystem::path experiment;
  std::filesystem::path out_dir;
  FrequencyGrid grid;
  int threads = 24;
  SimulationOverrides sim;
};

struct TrainOptions {
  std::filesystem::path profiles_dir;
  std::filesystem::path out_model;
  TrainingConfig training{1e-3, 10};
};

struct LoocvOptions {
  std::filesystem::path profiles_dir;
  std::optional<std::filesystem::path> out_report;
  TrainingConfig training{1e-3, 5};
};

struct TuneOptions {
  std::filesystem::path experiment;
  std::string application;  // empty: first in the document
  std::filesystem::path model;
  std::filesystem::path out_tuning_model;
  FrequencyGrid grid;
  int sweep_lower = 12;
  int sweep_step = 4;
  SimulationOverrides sim;
};

struct CompareOptions {
  std::filesystem::path experiment;
  std::string application;
  std::filesystem::path tuning_model;
  std::optional<std::filesystem::path> out_report;
  FrequencyGrid grid;
  int sweep_lower = 12;
  int sweep_step = 4;
  SimulationOverrides sim;
};

// Each command writes its report to `out`, warnings to `err`, and throws
// eatune::Error on failure. run_command maps that to an exit code.
void cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err);
void cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err);
void cmd_loocv(const LoocvOptions& o, std::ostream& out, std::ostream& err);
void cmd_tune(const TuneOptions& o, std::ostream& out, std::ostream& err);
void cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream& err);

template <typename Fn>
ExitCode run_command(Fn&& fn, std::ostream& err) {
  try {
    fn();
    return ExitCode::Ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::Data;
  }
}

}  // namespace eatune
