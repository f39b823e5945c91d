/// \file error.hpp
/// \brief Error kinds raised by the willmore library.
#pragma once

#include <stdexcept>
#include <string>

namespace willmore {

enum class ErrorKind {
  PointAtOrigin,
  InvalidMetric,
  InvalidBandLimit,
  ChartMismatch,
  NonzeroMean,
  GraphConditionViolated,
  DegenerateMeanCurvature,
  AmbiguousFlux,
  InvalidDomain,
  StepRejected,
  NonconvergentAreaProjection,
  MaxIterations,
  InsufficientSweep,
  ConfigError,
  GoldenMismatch,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PointAtOrigin: return "PointAtOrigin";
    case ErrorKind::InvalidMetric: return "InvalidMetric";
    case ErrorKind::InvalidBandLimit: return "InvalidBandLimit";
    case ErrorKind::ChartMismatch: return "ChartMismatch";
    case ErrorKind::NonzeroMean: return "NonzeroMean";
    case ErrorKind::GraphConditionViolated: return "GraphConditionViolated";
    case ErrorKind::DegenerateMeanCurvature: return "DegenerateMeanCurvature";
    case ErrorKind::AmbiguousFlux: return "AmbiguousFlux";
    case ErrorKind::InvalidDomain: return "InvalidDomain";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::NonconvergentAreaProjection: return "NonconvergentAreaProjection";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::InsufficientSweep: return "InsufficientSweep";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::GoldenMismatch: return "GoldenMismatch";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace willmore
