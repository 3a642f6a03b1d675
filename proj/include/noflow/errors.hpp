#pragma once

#include <stdexcept>
#include <string>

namespace noflow {

enum class ErrorCode {
  NonFiniteSlope,
  DegenerateCell,
  NegativeCoefficient,
  NonConvexFlux,
  KernelUnresolved,
  NegativeRadius,
  IncompatibleGrids,
  MassMismatch,
  NeedTwoPoints,
  ConfigInvalid,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteSlope: return "NonFiniteSlope";
    case ErrorCode::DegenerateCell: return "DegenerateCell";
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::NonConvexFlux: return "NonConvexFlux";
    case ErrorCode::KernelUnresolved: return "KernelUnresolved";
    case ErrorCode::NegativeRadius: return "NegativeRadius";
    case ErrorCode::IncompatibleGrids: return "IncompatibleGrids";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::NeedTwoPoints: return "NeedTwoPoints";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace noflow
