#include "skillmon/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace skillmon {

void FaultState::check() const {
  for (double v : {noise_sigma, variance_scale, controller_gain_scale}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(Errc::ConfigError, "fault scales must be finite and >= 0");
    }
  }
  if (!std::isfinite(disturbance_lateral)) {
    throw Error(Errc::ConfigError, "lateral disturbance must be finite");
  }
}

FaultSchedule::FaultSchedule(FaultState base, std::vector<Override> overrides)
    : base_(base), overrides_(std::move(overrides)) {
  base_.check();
  std::stable_sort(
      overrides_.begin(), overrides_.end(),
      [](const Override& a, const Override& b) { return a.t < b.t; });
  for (const auto& o : overrides_) {
    if (o.t < 0.0) {
      throw Error(Errc::ConfigError, "fault override with negative time");
    }
  }
}

FaultState FaultSchedule::at(double t) const {
  FaultState state = base_;
  for (const auto& o : overrides_) {
    if (o.t > t) break;
    if (o.noise_sigma) state.noise_sigma = *o.noise_sigma;
    if (o.marking_dropout) state.marking_dropout = *o.marking_dropout;
    if (o.variance_scale) state.variance_scale = *o.variance_scale;
    if (o.controller_gain_scale) {
      state.controller_gain_scale = *o.controller_gain_scale;
    }
    if (o.disturbance_lateral) {
      state.disturbance_lateral = *o.disturbance_lateral;
    }
  }
  state.check();
  return state;
}

void Scenario::check() const {
  if (!(dt > 0.0)) throw Error(Errc::ConfigError, "scenario dt must be > 0");
  if (!(duration >= dt)) {
    throw Error(Errc::ConfigError, "scenario duration must be >= dt");
  }
  if (!(lane_half_width > 0.0)) {
    throw Error(Errc::ConfigError, "lane half width must be > 0");
  }
  if (!(safe_halt_decel > 0.0)) {
    throw Error(Errc::ConfigError, "safe halt deceleration must be > 0");
  }
  if (!(vehicle.wheelbase > 0.0) || !(vehicle.steer_limit > 0.0) ||
      !(vehicle.v_max > 0.0)) {
    throw Error(Errc::ConfigError, "vehicle parameters must be positive");
  }
  if (command_speed < 0.0 || command_speed > vehicle.v_max + 1e-12) {
    throw Error(Errc::ConfigError,
                "command speed must be within [0, v_max]");
  }
  monitor.thresholds.check();
}

VehicleState step_vehicle(const VehicleState& state, double delta_cmd,
                          double dt, const VehicleParams& params,
                          double lateral_disturbance) {
  if (!(dt > 0.0)) {
    throw Error(Errc::NonPositiveDt, "dt must be > 0");
  }
  VehicleState next = state;
  next.delta = std::clamp(delta_cmd, -params.steer_limit, params.steer_limit);
  next.psi = state.psi +
             (state.v / params.wheelbase) * std::tan(next.delta) * dt;
  next.y = state.y + state.v * std::sin(next.psi) * dt +
           lateral_disturbance * dt;
  next.s = state.s + state.v * std::cos(next.psi) * dt;
  next.v = std::min(state.v, params.v_max);
  return next;
}

double control_lateral(const PerceptionOutput& perception,
                       const ControllerConfig& config, double gain_scale) {
  if (!perception.valid) {
    throw Error(Errc::InvalidPerception,
                "lateral controller needs a valid perception output");
  }
  const double error =
      perception.distance_to_left_marking - config.target_distance;
  const double raw =
      gain_scale * (config.kp * error - config.kd * perception.angle_to_marking);
  return std::clamp(raw, -config.steer_limit, config.steer_limit);
}

PerceptionOutput perceive(double true_distance, double true_angle,
                          const FaultState& fault, SimRng& rng,
                          double wheelbase) {
  fault.check();
  if (fault.marking_dropout) {
    return PerceptionOutput{};  // invalid, nothing reported
  }
  PerceptionOutput out;
  out.valid = true;
  out.distance_to_left_marking =
      rng.gaussian(true_distance, fault.noise_sigma);
  out.angle_to_marking = rng.gaussian(true_angle, fault.noise_sigma / wheelbase);
  out.variance = fault.noise_sigma * fault.noise_sigma * fault.variance_scale;
  return out;
}

namespace {

// Signal roles the loop knows how to produce.
const std::set<std::string>& known_roles() {
  static const std::set<std::string> roles{
      "lane_distance",   "lane_variance", "lane_valid",
      "steady_state_offset", "steering_angle", "camera_ok"};
  return roles;
}

// (metric id, component id) pairs a signal fans out to: every component of
// every node whose bound metrics transitively contain the atomic.
std::vector<std::pair<std::string, std::string>> fanout(
    const Scenario& scn, const std::string& metric_id) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [skill_id, binding] : scn.bindings) {
    bool bound = false;
    for (const auto& mid : binding.metric_ids) {
      if (scn.metrics.contains(mid) &&
          scn.metrics.history_of(mid).contains(metric_id)) {
        bound = true;
        break;
      }
    }
    if (!bound) continue;
    for (const auto& component : binding.components) {
      if (seen.insert({metric_id, component}).second) {
        out.emplace_back(metric_id, component);
      }
    }
  }
  return out;
}

}  // namespace

std::map<std::string, SignalTarget> resolve_signal_targets(
    const Scenario& scenario) {
  std::map<std::string, SignalTarget> targets;
  for (const auto& [role, metric_id] : scenario.signals) {
    if (!known_roles().contains(role)) {
      throw Error(Errc::ConfigError, "unknown signal role '" + role + "'");
    }
    if (!scenario.metrics.is_atomic(metric_id)) {
      throw Error(Errc::ConfigError, "signal '" + role +
                                         "' must map to an atomic metric, got '" +
                                         metric_id + "'");
    }
    SignalTarget target;
    target.destinations = fanout(scenario, metric_id);
    if (target.destinations.empty()) {
      throw Error(Errc::ConfigError,
                  "signal '" + role + "' metric '" + metric_id +
                      "' is not bound to any ability node");
    }
    target.unit = scenario.metrics.atomic(metric_id).spec.unit;
    targets.emplace(role, std::move(target));
  }
  return targets;
}

RunTrace run_scenario(const Scenario& scenario) {
  scenario.check();

  AbilityGraph::Config ag_config;
  ag_config.cycle_duration = scenario.dt;
  AbilityGraph ability = AbilityGraph::instantiate(
      scenario.graph, scenario.bindings, scenario.metrics, ag_config);

  const std::map<std::string, SignalTarget> targets =
      resolve_signal_targets(scenario);

  SimRng rng(scenario.seed);
  VehicleState state = scenario.initial_state;
  OperatingMode mode = scenario.monitor.initial_mode;
  double last_cmd = state.delta;

  RunTrace trace;
  trace.scenario_name = scenario.name;
  trace.dt = scenario.dt;
  trace.raw_scenario = scenario.raw_scenario;
  trace.raw_graph = scenario.raw_graph;
  trace.raw_requirements = scenario.raw_requirements;
  trace.raw_metrics = scenario.raw_metrics;
  trace.raw_bindings = scenario.raw_bindings;

  const auto step_count =
      static_cast<std::size_t>(std::llround(scenario.duration / scenario.dt));
  trace.steps.reserve(step_count);

  auto emit = [&](const std::string& role, double value, double t) {
    auto it = targets.find(role);
    if (it == targets.end()) return;  // role not wired in this scenario
    for (const auto& [metric_id, component] : it->second.destinations) {
      ability.ingest(
          SignalSample{metric_id, component, value, it->second.unit, t});
    }
  };

  for (std::size_t k = 0; k < step_count; ++k) {
    const double t = static_cast<double>(k) * scenario.dt;
    const FaultState fault = scenario.faults.at(t);

    const double true_distance = scenario.lane_half_width - state.y;
    const PerceptionOutput perc = perceive(
        true_distance, state.psi, fault, rng, scenario.vehicle.wheelbase);

    if (perc.valid) {
      emit("lane_distance", perc.distance_to_left_marking, t);
      emit("lane_variance", perc.variance, t);
      emit("lane_valid", 1.0, t);
      emit("steady_state_offset",
           std::abs(perc.distance_to_left_marking -
                    scenario.controller.target_distance),
           t);
    }
    emit("steering_angle", std::abs(state.delta) * kRadToDeg, t);
    emit("camera_ok", 1.0, t);

    ability.propagate();
    ability.assess(scenario.monitor.thresholds);
    const MonitorStatus overall = ability.overall_status();

    const OperatingMode next_mode =
        step(mode, overall, scenario.monitor.degraded_policy);
    if (next_mode != mode) {
      trace.mode_changes.push_back(
          ModeChangeRecord{k, t, mode, next_mode, "monitor"});
      mode = next_mode;
    }

    if (mode == OperatingMode::Follow && perc.valid) {
      last_cmd =
          control_lateral(perc, scenario.controller, fault.controller_gain_scale);
    }

    if (mode == OperatingMode::Follow) {
      state.v = std::min(scenario.command_speed, scenario.vehicle.v_max);
    } else if (mode == OperatingMode::SafeHalt) {
      state.v = std::max(0.0, state.v - scenario.safe_halt_decel * scenario.dt);
    }
    state = step_vehicle(state, last_cmd, scenario.dt, scenario.vehicle,
                         fault.disturbance_lateral);

    StepRecord record;
    record.t = t;
    record.y = state.y;
    record.psi = state.psi;
    record.v = state.v;
    record.delta = state.delta;
    if (perc.valid) record.distance = perc.distance_to_left_marking;
    record.valid = perc.valid;
    record.levels = ability.levels();
    record.status = ability.statuses();
    record.mode = mode;
    trace.steps.push_back(std::move(record));
  }
  return trace;
}

}  // namespace skillmon
