#pragma once

#include "eatune/domain.hpp"

namespace eatune {

/// Runs one phase iteration of the application under test and reports node
/// energy for the phase plus energy attributed to each region. Calls must not
/// overlap; implementations own a single node.
class MeasurementProvider {
 public:
  virtual ~MeasurementProvider() = default;
  virtual PhaseSample measure(const SystemConfig& config, bool with_counters) = 0;
};

}  // namespace eatune
