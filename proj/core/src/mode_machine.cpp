#include "skillmon/mode_machine.hpp"

namespace skillmon {

void StatusThresholds::check() const {
  if (!(0.0 <= failed_below && failed_below < degraded_below &&
        degraded_below <= 1.0)) {
    throw Error(Errc::ConfigError,
                "thresholds need 0 <= failed_below < degraded_below <= 1");
  }
}

MonitorStatus status_of(double level, const StatusThresholds& thresholds) {
  thresholds.check();
  if (level < thresholds.failed_below) return MonitorStatus::Failed;
  if (level < thresholds.degraded_below) return MonitorStatus::Degraded;
  return MonitorStatus::Ok;
}

const char* to_string(OperatingMode mode) noexcept {
  switch (mode) {
    case OperatingMode::Manual: return "manual";
    case OperatingMode::SafeHalt: return "safe_halt";
    case OperatingMode::Coupled: return "coupled";
    case OperatingMode::Follow: return "follow";
  }
  return "?";
}

const char* to_string(MonitorStatus status) noexcept {
  switch (status) {
    case MonitorStatus::Ok: return "ok";
    case MonitorStatus::Degraded: return "degraded";
    case MonitorStatus::Failed: return "failed";
  }
  return "?";
}

const char* to_string(DegradedPolicy policy) noexcept {
  switch (policy) {
    case DegradedPolicy::Fallback: return "fallback";
    case DegradedPolicy::Continue: return "continue";
  }
  return "?";
}

OperatingMode parse_operating_mode(const std::string& token) {
  for (OperatingMode m : {OperatingMode::Manual, OperatingMode::SafeHalt,
                          OperatingMode::Coupled, OperatingMode::Follow}) {
    if (token == to_string(m)) return m;
  }
  throw Error(Errc::ParseError, "unknown operating mode '" + token + "'");
}

MonitorStatus parse_monitor_status(const std::string& token) {
  for (MonitorStatus s : {MonitorStatus::Ok, MonitorStatus::Degraded,
                          MonitorStatus::Failed}) {
    if (token == to_string(s)) return s;
  }
  throw Error(Errc::ParseError, "unknown monitor status '" + token + "'");
}

DegradedPolicy parse_degraded_policy(const std::string& token) {
  for (DegradedPolicy p : {DegradedPolicy::Fallback, DegradedPolicy::Continue}) {
    if (token == to_string(p)) return p;
  }
  throw Error(Errc::ParseError, "unknown degraded policy '" + token + "'");
}

std::set<OperatingMode> allowed_transitions(OperatingMode mode) {
  switch (mode) {
    case OperatingMode::Manual:
      return {OperatingMode::SafeHalt};
    case OperatingMode::SafeHalt:
      return {OperatingMode::Manual, OperatingMode::Coupled,
              OperatingMode::Follow};
    case OperatingMode::Coupled:
    case OperatingMode::Follow:
      return {OperatingMode::SafeHalt};
  }
  return {};
}

OperatingMode request_transition(OperatingMode mode,
                                 const TransitionRequest& request,
                                 MonitorStatus status) {
  if (request.source == RequestSource::Monitor) {
    if (request.target != OperatingMode::SafeHalt) {
      throw Error(Errc::IllegalTransition,
                  "monitor requests may only target safe_halt");
    }
    return OperatingMode::SafeHalt;
  }
  if (!allowed_transitions(mode).contains(request.target)) {
    throw Error(Errc::IllegalTransition,
                std::string("no transition ") + to_string(mode) + " -> " +
                    to_string(request.target));
  }
  const bool automated = request.target == OperatingMode::Coupled ||
                         request.target == OperatingMode::Follow;
  if (automated && status != MonitorStatus::Ok) {
    throw Error(Errc::MonitorNotReady,
                std::string("cannot enter ") + to_string(request.target) +
                    " with monitor status " + to_string(status));
  }
  return request.target;
}

OperatingMode step(OperatingMode mode, MonitorStatus status,
                   DegradedPolicy policy) {
  const bool automated =
      mode == OperatingMode::Coupled || mode == OperatingMode::Follow;
  if (!automated) return mode;
  if (status == MonitorStatus::Failed) return OperatingMode::SafeHalt;
  if (status == MonitorStatus::Degraded && policy == DegradedPolicy::Fallback) {
    return OperatingMode::SafeHalt;
  }
  return mode;
}

}  // namespace skillmon
