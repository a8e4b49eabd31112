#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "eatune/domain.hpp"
#include "eatune/energy_model.hpp"
#include "eatune/simulator.hpp"
#include "eatune/tuning.hpp"

namespace eatune::io {

inline constexpr int kSchemaVersion = 1;

/// Per-benchmark measurement sweep; stands in for trace files.
struct ProfileDocument {
  std::string benchmark;
  std::string node_id;
  std::vector<PhaseSample> records;

  bool operator==(const ProfileDocument&) const = default;
};

struct TuningModelProvenance {
  std::string model_hash;
  std::uint64_t seed = 0;
  FrequencyGrid grid;

  bool operator==(const TuningModelProvenance&) const = default;
};

struct TuningModelDocument {
  TuningModel model;
  TuningModelProvenance provenance;

  bool operator==(const TuningModelDocument&) const = default;
};

/// Node plus the applications to run on it.
struct ExperimentSpec {
  std::vector<NodeModel> nodes;
  std::vector<Application> applications;
};

nlohmann::ordered_json to_json(const ProfileDocument& doc);
ProfileDocument profile_from_json(const nlohmann::json& j, const std::string& source);

nlohmann::ordered_json to_json(const EnergyModel& model);
EnergyModel energy_model_from_json(const nlohmann::json& j, const std::string& source);

nlohmann::ordered_json to_json(const TuningModelDocument& doc);
TuningModelDocument tuning_model_from_json(const nlohmann::json& j, const std::string& source);

nlohmann::ordered_json to_json(const EvalReport& report, const TrainingConfig& cfg);

nlohmann::ordered_json to_json(const RunReport& report);

nlohmann::ordered_json to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_from_json(const nlohmann::json& j, const std::string& source);

nlohmann::ordered_json to_json(const SystemConfig& c);
nlohmann::ordered_json to_json(const FrequencyGrid& g);

/// Parses "cf_min:cf_max[:step],ucf_min:ucf_max[:step]" in GHz.
FrequencyGrid parse_grid(const std::string& text);

/// Reads and parses a JSON file; failures are Parse errors naming the file.
nlohmann::json read_json(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

ProfileDocument read_profile(const std::filesystem::path& path);
/// All *.json profiles in `dir`, sorted by file name.
std::vector<ProfileDocument> read_profile_dir(const std::filesystem::path& dir);
EnergyModel read_energy_model(const std::filesystem::path& path);
TuningModelDocument read_tuning_model(const std::filesystem::path& path);
ExperimentSpec read_experiment(const std::filesystem::path& path);

/// FNV-1a over the file bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

}  // namespace eatune::io
