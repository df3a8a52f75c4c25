#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skillmon/ability_graph.hpp"
#include "skillmon/errors.hpp"
#include "skillmon/metrics.hpp"
#include "skillmon/mode_machine.hpp"
#include "skillmon/requirements.hpp"
#include "skillmon/sim_rng.hpp"
#include "skillmon/skill_graph.hpp"

namespace skillmon {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

struct VehicleParams {
  double wheelbase = 4.0;                 // m
  double steer_limit = 3.0 * kDegToRad;   // rad
  double v_max = 10.0 / 3.6;              // m/s
};

struct VehicleState {
  double s = 0.0;      // longitudinal position, m
  double y = 0.0;      // lateral offset from shoulder centerline, m
                       // (positive toward the left lane marking)
  double psi = 0.0;    // heading error, rad
  double v = 0.0;      // speed, m/s
  double delta = 0.0;  // applied steering angle, rad
};

struct PerceptionOutput {
  bool valid = false;
  double distance_to_left_marking = 0.0;  // m, meaningful only when valid
  double angle_to_marking = 0.0;          // rad, meaningful only when valid
  double variance = 0.0;                  // m^2, meaningful only when valid
};

struct FaultState {
  double noise_sigma = 0.0;            // m
  bool marking_dropout = false;
  double variance_scale = 1.0;
  double controller_gain_scale = 1.0;
  double disturbance_lateral = 0.0;    // m/s

  void check() const;  // scales must be >= 0
};

/// Piecewise-constant fault schedule: entries override the base state from
/// their start time onward.
class FaultSchedule {
 public:
  struct Override {
    double t = 0.0;
    std::optional<double> noise_sigma;
    std::optional<bool> marking_dropout;
    std::optional<double> variance_scale;
    std::optional<double> controller_gain_scale;
    std::optional<double> disturbance_lateral;
  };

  FaultSchedule() = default;
  FaultSchedule(FaultState base, std::vector<Override> overrides);

  FaultState at(double t) const;

  const FaultState& base() const noexcept { return base_; }
  const std::vector<Override>& overrides() const noexcept { return overrides_; }

 private:
  FaultState base_;
  std::vector<Override> overrides_;  // sorted by t
};

struct ControllerConfig {
  double target_distance = 0.56;          // m to the left marking
  double kp = 0.05;                       // rad per m of distance error
  double kd = 0.7;                        // rad per rad of heading error
  double steer_limit = 3.0 * kDegToRad;   // rad
};

struct MonitorConfig {
  StatusThresholds thresholds;
  DegradedPolicy degraded_policy = DegradedPolicy::Fallback;
  OperatingMode initial_mode = OperatingMode::Follow;
};

/// Signal roles the harness can feed; values are atomic metric ids.
/// Known roles: lane_distance, lane_variance, lane_valid,
/// steady_state_offset, steering_angle, camera_ok.
using SignalMap = std::map<std::string, std::string>;

/// A fully loaded closed-loop scenario. raw_* hold the source documents as
/// canonical JSON text for embedding into trace headers.
struct Scenario {
  std::string name;
  double duration = 60.0;   // s
  double dt = 0.1;          // s, also the evaluation cycle
  std::uint64_t seed = 0;
  double lane_half_width = 1.25;  // m, centerline to each marking
  double command_speed = 10.0 / 3.6;  // m/s held in Follow mode
  double safe_halt_decel = 1.0;       // m/s^2
  VehicleParams vehicle;
  VehicleState initial_state;
  ControllerConfig controller;
  MonitorConfig monitor;
  SignalMap signals;

  SkillGraph graph;
  RequirementSet requirements;
  MetricRegistry metrics;
  std::map<std::string, AbilityBinding> bindings;

  std::string raw_scenario;
  std::string raw_graph;
  std::string raw_requirements;
  std::string raw_metrics;
  std::string raw_bindings;
  FaultSchedule faults;

  void check() const;  // throws ConfigError
};

/// One simulation step of the kinematic single-track model. The command is
/// clamped to the steering limit; heading integrates before the position
/// update; speed is capped at v_max. Throws NonPositiveDt.
VehicleState step_vehicle(const VehicleState& state, double delta_cmd,
                          double dt, const VehicleParams& params,
                          double lateral_disturbance = 0.0);

/// PD lane-keeping law on (distance - target) and heading, scaled by
/// gain_scale, clamped to the steering limit. Throws InvalidPerception when
/// the perception output is invalid (callers hold the last command).
double control_lateral(const PerceptionOutput& perception,
                       const ControllerConfig& config, double gain_scale = 1.0);

/// Noisy lane-marking perception: Gaussian noise on distance and angle
/// (angle sigma = noise_sigma / wheelbase), reported variance
/// noise_sigma^2 * variance_scale. A marking dropout yields an invalid
/// output and nothing else.
PerceptionOutput perceive(double true_distance, double true_angle,
                          const FaultState& fault, SimRng& rng,
                          double wheelbase = 4.0);

/// Where one signal role's samples go: every (metric, component) pair whose
/// node binding transitively contains the signal's atomic metric.
struct SignalTarget {
  std::vector<std::pair<std::string, std::string>> destinations;
  std::string unit;
};

/// Resolves the scenario's signal map against bindings and metrics. Throws
/// ConfigError for unknown roles, non-atomic metrics, or unbound signals.
std::map<std::string, SignalTarget> resolve_signal_targets(
    const Scenario& scenario);

/// Per-step trace record. Vehicle fields hold the post-step state; distance
/// and valid are the perception output sampled at the start of the step;
/// levels/status/mode are the monitor outputs of the step.
struct StepRecord {
  double t = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double v = 0.0;
  double delta = 0.0;
  std::optional<double> distance;
  bool valid = false;
  std::map<std::string, double> levels;
  std::map<std::string, MonitorStatus> status;
  OperatingMode mode = OperatingMode::Manual;
};

struct ModeChangeRecord {
  std::size_t step = 0;  // record index the change belongs to
  double t = 0.0;
  OperatingMode from = OperatingMode::Manual;
  OperatingMode to = OperatingMode::Manual;
  std::string cause;  // "operator" | "monitor"
};

struct RunTrace {
  std::string scenario_name;
  std::vector<StepRecord> steps;
  std::vector<ModeChangeRecord> mode_changes;

  // header payload for serialization
  double dt = 0.1;
  std::string raw_scenario;
  std::string raw_graph;
  std::string raw_requirements;
  std::string raw_metrics;
  std::string raw_bindings;
};

/// Runs the closed loop: perceive, emit samples, ingest, propagate, assess,
/// advance the mode machine, control (Follow only), step the plant. SafeHalt
/// decelerates at the configured rate until standstill. Fully deterministic
/// for a fixed scenario. Throws ConfigError on inconsistent scenarios.
RunTrace run_scenario(const Scenario& scenario);

}  // namespace skillmon
