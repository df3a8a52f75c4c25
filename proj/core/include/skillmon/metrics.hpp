#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "skillmon/errors.hpp"

namespace skillmon {

/// Normalization rules for atomic performance metrics.
enum class MetricKind {
  MaxLimit,           // |m| measured against an upper limit
  MinDistance,        // margin above a minimum distance
  MaxOvershoot,       // control overshoot against an allowed maximum
  Range,              // value inside [lower, upper]
  VarianceBound,      // non-negative variance against an upper bound
  ValidityFlag,       // boolean plausibility result
  SteadyStateOffset,  // steady-state control offset against an allowed maximum
  Overshoot,          // transient overshoot against an allowed maximum
};

const char* to_string(MetricKind kind) noexcept;
MetricKind parse_metric_kind(const std::string& token);

enum class EstimationBias { Optimistic, Pessimistic, Unknown };

const char* to_string(EstimationBias bias) noexcept;
EstimationBias parse_estimation_bias(const std::string& token);

/// How an atomic metric maps a raw measurement onto [0, 1].
///
/// threshold is the limit for the MaxLimit family and VarianceBound, and the
/// minimum for MinDistance. band is the width over which the level falls off
/// linearly (MinDistance: margin above the minimum that counts as full
/// performance, defaults to the minimum itself; Range: falloff outside the
/// bounds, defaults to half the range width).
struct MetricSpec {
  MetricKind kind = MetricKind::MaxLimit;
  double threshold = 0.0;
  double lower = 0.0;  // Range only
  double upper = 0.0;  // Range only
  double band = 0.0;   // 0 = use the kind's default
  std::string unit;

  void check() const;  // throws ConfigError on inconsistent fields
  double falloff_band() const;
};

struct AtomicMetric {
  std::string id;
  MetricSpec spec;
  double weight = 1.0;  // in (0, 1]
  EstimationBias bias = EstimationBias::Unknown;
  int grace_cycles = 3;  // evaluation cycles a stale sample keeps its value
};

enum class CompositionRule { WeightedMean, Min };

const char* to_string(CompositionRule rule) noexcept;
CompositionRule parse_composition_rule(const std::string& token);

/// Aggregation of lower-level metrics. The history records every atomic
/// metric the composition transitively rests on; compose() refuses children
/// with overlapping histories unless the overlap is explicitly allowed.
struct ComposedMetric {
  std::string id;
  std::vector<std::string> children;
  std::vector<double> weights;  // normalized, sums to 1
  CompositionRule rule = CompositionRule::WeightedMean;
  std::set<std::string> history;       // constituent atomic ids
  std::set<std::string> allow_shared;  // atomics allowed to repeat
  EstimationBias bias = EstimationBias::Unknown;
};

/// Normalized performance in [0, 1]; 1 = full performance, 0 = requirement
/// violated.
class PerformanceLevel {
 public:
  PerformanceLevel() = default;
  explicit PerformanceLevel(double value);  // throws ConfigError outside [0,1]
  static PerformanceLevel clamped(double value) noexcept;

  double value() const noexcept { return value_; }
  auto operator<=>(const PerformanceLevel&) const = default;

 private:
  double value_ = 0.0;
};

struct Measurement {
  double value = 0.0;
  std::string unit;
};

/// Normalizes one measurement. Throws UnitMismatch when the measurement unit
/// differs from the spec unit and NegativeVariance for negative variance
/// samples.
PerformanceLevel evaluate_atomic(const AtomicMetric& metric,
                                 const Measurement& measurement);

/// Aggregates child levels per the composed metric's rule. Every child id
/// must be present in child_levels (MissingChildLevel otherwise).
PerformanceLevel evaluate_composed(
    const ComposedMetric& metric,
    const std::map<std::string, PerformanceLevel>& child_levels);

std::set<std::string> history(const AtomicMetric& metric);
std::set<std::string> history(const ComposedMetric& metric);

/// Id-keyed store of metric definitions. Compositions are resolved and
/// checked against the correlation rule at insertion time.
class MetricRegistry {
 public:
  void add_atomic(AtomicMetric metric);  // throws DuplicateId, ConfigError

  /// Builds, checks, and stores a composed metric from already-registered
  /// children. Weights are normalized to sum 1. Throws EmptyChildren,
  /// NonPositiveWeight, UnknownMetric, DuplicateId, or CorrelatedComposition
  /// (two children share an atomic id not listed in allow_shared).
  const ComposedMetric& compose(const std::string& id,
                                const std::vector<std::string>& children,
                                const std::vector<double>& weights,
                                CompositionRule rule,
                                const std::set<std::string>& allow_shared = {});

  bool contains(const std::string& id) const;
  bool is_atomic(const std::string& id) const;
  const AtomicMetric& atomic(const std::string& id) const;      // UnknownMetric
  const ComposedMetric& composed(const std::string& id) const;  // UnknownMetric

  /// Transitive set of atomic ids under `id`.
  std::set<std::string> history_of(const std::string& id) const;

  /// Recursively evaluates `id`: atomics through atom_level, compositions per
  /// their rule over the children.
  PerformanceLevel evaluate(
      const std::string& id,
      const std::function<PerformanceLevel(const AtomicMetric&)>& atom_level)
      const;

  const std::vector<std::string>& ids() const noexcept { return order_; }

 private:
  std::map<std::string, AtomicMetric> atomics_;
  std::map<std::string, ComposedMetric> composed_;
  std::vector<std::string> order_;  // insertion order
};

}  // namespace skillmon
