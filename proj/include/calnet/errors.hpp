#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace calnet {

enum class ErrorKind {
  invalid_input,
  threshold_violation,
  not_minimal,
  not_alignable,
  calibration_failure,
  invalid_comparison,
  hypothesis_violation,
  no_coloring,
  inconsistent_assignment,
  non_transverse,
  invalid_geometry,
  unsupported,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class KindError : public Error {
 public:
  explicit KindError(const std::string& message) : Error(K, message) {}
};

using InvalidInput = KindError<ErrorKind::invalid_input>;
using ThresholdViolation = KindError<ErrorKind::threshold_violation>;
using NotMinimal = KindError<ErrorKind::not_minimal>;
using NotAlignable = KindError<ErrorKind::not_alignable>;
using CalibrationFailure = KindError<ErrorKind::calibration_failure>;
using InvalidComparison = KindError<ErrorKind::invalid_comparison>;
using HypothesisViolation = KindError<ErrorKind::hypothesis_violation>;
using NoColoring = KindError<ErrorKind::no_coloring>;
using InconsistentAssignment = KindError<ErrorKind::inconsistent_assignment>;
using NonTransverse = KindError<ErrorKind::non_transverse>;
using InvalidGeometry = KindError<ErrorKind::invalid_geometry>;
using Unsupported = KindError<ErrorKind::unsupported>;

}  // namespace calnet
