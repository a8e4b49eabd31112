#pragma once

#include <stdexcept>
#include <string>

namespace eatune {

enum class ErrorKind {
  InvalidInput,
  InvalidConfig,
  InvalidCalibration,
  InvalidSample,
  DegenerateFeature,
  CollinearFeature,
  InvalidTuningModel,
  Parse,
  Numerical,
};

const char* to_string(ErrorKind kind);

// Single exception type for the toolkit; `kind` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace eatune
