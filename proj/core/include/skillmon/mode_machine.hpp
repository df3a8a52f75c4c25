#pragma once

#include <set>
#include <string>

#include "skillmon/errors.hpp"

namespace skillmon {

/// Operating modes of the protective vehicle. Operation starts in Manual;
/// SafeHalt is the universal safe state and the only gateway into the
/// automated modes.
enum class OperatingMode { Manual, SafeHalt, Coupled, Follow };

/// Three-way discretization of a node's performance level.
enum class MonitorStatus { Ok, Degraded, Failed };

/// Level thresholds for assess(): Failed below failed_below, Degraded below
/// degraded_below, OK otherwise.
struct StatusThresholds {
  double degraded_below = 0.5;
  double failed_below = 0.1;

  void check() const;  // enforces 0 <= failed_below < degraded_below <= 1
};

MonitorStatus status_of(double level, const StatusThresholds& thresholds);

enum class RequestSource { Operator, Monitor };

struct TransitionRequest {
  RequestSource source = RequestSource::Operator;
  OperatingMode target = OperatingMode::SafeHalt;
};

/// Whether a Degraded overall status forces fallback out of the automated
/// modes. Failed always does.
enum class DegradedPolicy { Fallback, Continue };

const char* to_string(OperatingMode mode) noexcept;
const char* to_string(MonitorStatus status) noexcept;
const char* to_string(DegradedPolicy policy) noexcept;
OperatingMode parse_operating_mode(const std::string& token);
MonitorStatus parse_monitor_status(const std::string& token);
DegradedPolicy parse_degraded_policy(const std::string& token);

/// Modes reachable from `mode` by an operator request.
std::set<OperatingMode> allowed_transitions(OperatingMode mode);

/// Applies a transition request. Operator requests must follow
/// allowed_transitions() and may enter Coupled/Follow only at status OK;
/// monitor requests always reach SafeHalt and may target nothing else.
/// Throws IllegalTransition or MonitorNotReady.
OperatingMode request_transition(OperatingMode mode,
                                 const TransitionRequest& request,
                                 MonitorStatus status);

/// One evaluation-cycle advance: automated modes fall back to SafeHalt on
/// Failed (and on Degraded under the Fallback policy); Manual and SafeHalt
/// are unaffected by monitor status.
OperatingMode step(OperatingMode mode, MonitorStatus status,
                   DegradedPolicy policy = DegradedPolicy::Fallback);

}  // namespace skillmon
