#pragma once

#include <stdexcept>
#include <string>

namespace skillmon {

/// Error codes for every failure the library reports. Tests and the CLI
/// dispatch on the code; the message carries context for humans.
enum class Errc {
  // graph construction / validation
  DuplicateId,
  UnknownNode,
  DuplicateEdge,
  CycleIntroduced,
  InvalidGraph,
  // requirement annotation
  UnknownEdge,
  DuplicateRequirementOnEdge,
  // metric evaluation / composition
  UnitMismatch,
  NegativeVariance,
  CorrelatedComposition,
  EmptyChildren,
  NonPositiveWeight,
  MissingChildLevel,
  // ability graph runtime
  MissingBinding,
  UnknownMetric,
  StructureMismatch,
  StaleTimestamp,
  NotInstantiated,
  // operating-mode machine
  IllegalTransition,
  MonitorNotReady,
  // simulation
  InvalidPerception,
  NonPositiveDt,
  // files and configuration
  ConfigError,
  IoError,
  ParseError,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace skillmon
