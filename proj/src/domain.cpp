#include "eatune/domain.hpp"

#include <cmath>
#include <cstdio>

namespace eatune {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::InvalidConfig: return "invalid config";
    case ErrorKind::InvalidCalibration: return "invalid calibration";
    case ErrorKind::InvalidSample: return "invalid sample";
    case ErrorKind::DegenerateFeature: return "degenerate feature";
    case ErrorKind::CollinearFeature: return "collinear feature";
    case ErrorKind::InvalidTuningModel: return "invalid tuning model";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Numerical: return "numerical failure";
  }
  return "unknown";
}

std::optional<Frequency> Frequency::try_from_ghz(double ghz) {
  if (!std::isfinite(ghz)) return std::nullopt;
  const double scaled = ghz * 10.0;
  const double nearest = std::round(scaled);
  // 1e-9 GHz tolerance expressed in deci-GHz
  if (std::abs(scaled - nearest) > 1e-8) return std::nullopt;
  return Frequency(static_cast<int>(nearest));
}

Frequency Frequency::from_ghz(double ghz) {
  auto f = try_from_ghz(ghz);
  if (!f) {
    throw Error(ErrorKind::InvalidConfig,
                "frequency " + std::to_string(ghz) + " GHz is not on the 0.1 GHz lattice");
  }
  return *f;
}

std::string format_ghz(Frequency f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", f.ghz());
  return buf;
}

std::string to_string(const SystemConfig& c) {
  return std::to_string(c.omp_threads) + " threads, " + format_ghz(c.core) + "|" +
         format_ghz(c.uncore) + " GHz";
}

FrequencyGrid::FrequencyGrid() : FrequencyGrid(1.2, 2.5, 0.1, 1.3, 3.0, 0.1) {}

FrequencyGrid::FrequencyGrid(double cf_min, double cf_max, double cf_step,
                             double ucf_min, double ucf_max, double ucf_step)
    : cf_min_(Frequency::from_ghz(cf_min)),
      cf_max_(Frequency::from_ghz(cf_max)),
      cf_step_(Frequency::from_ghz(cf_step).deci()),
      ucf_min_(Frequency::from_ghz(ucf_min)),
      ucf_max_(Frequency::from_ghz(ucf_max)),
      ucf_step_(Frequency::from_ghz(ucf_step).deci()) {
  if (cf_min_ > cf_max_ || ucf_min_ > ucf_max_ || cf_step_ <= 0 || ucf_step_ <= 0) {
    throw Error(ErrorKind::InvalidConfig, "frequency grid bounds or steps are inconsistent");
  }
}

bool FrequencyGrid::contains_core(Frequency f) const {
  return f >= cf_min_ && f <= cf_max_ && (f.deci() - cf_min_.deci()) % cf_step_ == 0;
}

bool FrequencyGrid::contains_uncore(Frequency f) const {
  return f >= ucf_min_ && f <= ucf_max_ && (f.deci() - ucf_min_.deci()) % ucf_step_ == 0;
}

namespace {
std::vector<Frequency> enumerate(Frequency lo, Frequency hi, int step) {
  std::vector<Frequency> out;
  for (int d = lo.deci(); d <= hi.deci(); d += step) out.push_back(Frequency::from_deci(d));
  return out;
}
}  // namespace

std::vector<Frequency> FrequencyGrid::core_values() const {
  return enumerate(cf_min_, cf_max_, cf_step_);
}
std::vector<Frequency> FrequencyGrid::uncore_values() const {
  return enumerate(ucf_min_, ucf_max_, ucf_step_);
}
std::size_t FrequencyGrid::core_count() const {
  return static_cast<std::size_t>((cf_max_.deci() - cf_min_.deci()) / cf_step_ + 1);
}
std::size_t FrequencyGrid::uncore_count() const {
  return static_cast<std::size_t>((ucf_max_.deci() - ucf_min_.deci()) / ucf_step_ + 1);
}

bool validate_config(const SystemConfig& c, const FrequencyGrid& g) {
  return c.omp_threads >= 1 && g.contains_core(c.core) && g.contains_uncore(c.uncore);
}

bool validate_config(int omp_threads, double core_ghz, double uncore_ghz,
                     const FrequencyGrid& g) {
  auto cf = Frequency::try_from_ghz(core_ghz);
  auto ucf = Frequency::try_from_ghz(uncore_ghz);
  if (!cf || !ucf) return false;
  return validate_config(SystemConfig{omp_threads, *cf, *ucf}, g);
}

PmcVector::PmcVector(const CounterValues& v, bool is_normalized)
    : values(v), normalized(is_normalized) {
  if ((v.array() < 0.0).any() || !v.allFinite()) {
    throw Error(ErrorKind::InvalidSample, "performance counters must be finite and non-negative");
  }
}

void check_sample(const PhaseSample& s) {
  if (!(s.duration > 0.0)) {
    throw Error(ErrorKind::InvalidSample, "phase duration must be positive");
  }
  if (!(s.node_energy > 0.0)) {
    throw Error(ErrorKind::InvalidSample, "phase energy must be positive");
  }
}

std::optional<SystemConfig> TuningModel::lookup(const std::string& region) const {
  for (const auto& s : scenarios) {
    if (s.members.contains(region)) return s.config;
  }
  return std::nullopt;
}

SystemConfig default_system_config() {
  return SystemConfig{24, Frequency::from_deci(25), Frequency::from_deci(30)};
}

}  // namespace eatune
