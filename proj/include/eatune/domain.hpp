#pragma once

#include <Eigen/Core>

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "eatune/error.hpp"

namespace eatune {

/// A clock frequency held as an integer number of 0.1 GHz steps, so lattice
/// membership and neighbor arithmetic are exact.
class Frequency {
 public:
  constexpr Frequency() = default;
  static constexpr Frequency from_deci(int deci_ghz) { return Frequency(deci_ghz); }

  /// Fails when `ghz` is more than 1e-9 GHz away from a multiple of 0.1 GHz.
  static std::optional<Frequency> try_from_ghz(double ghz);
  static Frequency from_ghz(double ghz);

  constexpr int deci() const { return deci_; }
  constexpr double ghz() const { return deci_ / 10.0; }

  constexpr auto operator<=>(const Frequency&) const = default;

 private:
  constexpr explicit Frequency(int deci) : deci_(deci) {}
  int deci_ = 0;
};

std::string format_ghz(Frequency f);
inline std::ostream& operator<<(std::ostream& os, Frequency f) { return os << format_ghz(f); }

struct SystemConfig {
  int omp_threads = 1;
  Frequency core;
  Frequency uncore;

  auto operator<=>(const SystemConfig&) const = default;
};

std::string to_string(const SystemConfig& c);
inline std::ostream& operator<<(std::ostream& os, const SystemConfig& c) { return os << to_string(c); }

/// Rectangular (CF, UCF) lattice. Default is the 14 x 18 point Haswell grid.
class FrequencyGrid {
 public:
  FrequencyGrid();
  FrequencyGrid(double cf_min, double cf_max, double cf_step,
                double ucf_min, double ucf_max, double ucf_step);

  Frequency cf_min() const { return cf_min_; }
  Frequency cf_max() const { return cf_max_; }
  int cf_step() const { return cf_step_; }
  Frequency ucf_min() const { return ucf_min_; }
  Frequency ucf_max() const { return ucf_max_; }
  int ucf_step() const { return ucf_step_; }

  bool contains_core(Frequency f) const;
  bool contains_uncore(Frequency f) const;

  std::vector<Frequency> core_values() const;
  std::vector<Frequency> uncore_values() const;
  std::size_t core_count() const;
  std::size_t uncore_count() const;
  std::size_t size() const { return core_count() * uncore_count(); }

  bool operator==(const FrequencyGrid&) const = default;

 private:
  Frequency cf_min_, cf_max_;
  int cf_step_ = 1;
  Frequency ucf_min_, ucf_max_;
  int ucf_step_ = 1;
};

bool validate_config(const SystemConfig& c, const FrequencyGrid& g);
/// GHz-valued overload; off-lattice frequencies are rejected.
bool validate_config(int omp_threads, double core_ghz, double uncore_ghz,
                     const FrequencyGrid& g);

/// The seven counters retained by VIF-guided selection, in fixed order.
enum class Counter : int { BrNtk, LdIns, L2Icr, BrMsp, ResStl, SrIns, L2Dcr };
inline constexpr int kCounterCount = 7;
inline constexpr std::array<std::string_view, kCounterCount> kCounterNames = {
    "BR_NTK", "LD_INS", "L2_ICR", "BR_MSP", "RES_STL", "SR_INS", "L2_DCR"};

using CounterValues = Eigen::Matrix<double, kCounterCount, 1>;

/// Raw counts per phase, or counts per second once normalized.
struct PmcVector {
  CounterValues values = CounterValues::Zero();
  bool normalized = false;

  PmcVector() = default;
  explicit PmcVector(const CounterValues& v, bool is_normalized = false);

  double operator[](Counter c) const { return values(static_cast<int>(c)); }
  bool operator==(const PmcVector& o) const {
    return normalized == o.normalized && values == o.values;
  }
};

/// One measured execution of the phase region under `config`.
struct PhaseSample {
  SystemConfig config;
  double duration = 0.0;     // seconds
  double node_energy = 0.0;  // joules
  std::optional<PmcVector> counters;  // raw counts
  std::string node_id;
  // Energy attributed to each instrumented region during this phase.
  std::map<std::string, double> region_energy;

  bool operator==(const PhaseSample&) const = default;
};

void check_sample(const PhaseSample& s);

struct RegionProfile {
  std::string region_name;
  int call_count = 1;
  double mean_exec_time = 0.0;
  std::vector<PhaseSample> samples;
};

struct Scenario {
  SystemConfig config;
  std::set<std::string> members;

  bool operator==(const Scenario&) const = default;
};

struct TuningModel {
  std::vector<Scenario> scenarios;
  SystemConfig default_config;

  /// Scenario configuration for `region`, or nullopt when unlisted.
  std::optional<SystemConfig> lookup(const std::string& region) const;
  bool operator==(const TuningModel&) const = default;
};

/// Node defaults: all cores, 2.5 GHz core, 3.0 GHz uncore.
SystemConfig default_system_config();

}  // namespace eatune
