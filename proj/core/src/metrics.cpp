#include "skillmon/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace skillmon {

const char* to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::MaxLimit: return "max_limit";
    case MetricKind::MinDistance: return "min_distance";
    case MetricKind::MaxOvershoot: return "max_overshoot";
    case MetricKind::Range: return "range";
    case MetricKind::VarianceBound: return "variance_bound";
    case MetricKind::ValidityFlag: return "validity_flag";
    case MetricKind::SteadyStateOffset: return "steady_state_offset";
    case MetricKind::Overshoot: return "overshoot";
  }
  return "?";
}

MetricKind parse_metric_kind(const std::string& token) {
  for (MetricKind k :
       {MetricKind::MaxLimit, MetricKind::MinDistance, MetricKind::MaxOvershoot,
        MetricKind::Range, MetricKind::VarianceBound, MetricKind::ValidityFlag,
        MetricKind::SteadyStateOffset, MetricKind::Overshoot}) {
    if (token == to_string(k)) return k;
  }
  throw Error(Errc::ParseError, "unknown metric kind '" + token + "'");
}

const char* to_string(EstimationBias bias) noexcept {
  switch (bias) {
    case EstimationBias::Optimistic: return "optimistic";
    case EstimationBias::Pessimistic: return "pessimistic";
    case EstimationBias::Unknown: return "unknown";
  }
  return "?";
}

EstimationBias parse_estimation_bias(const std::string& token) {
  for (EstimationBias b : {EstimationBias::Optimistic,
                           EstimationBias::Pessimistic,
                           EstimationBias::Unknown}) {
    if (token == to_string(b)) return b;
  }
  throw Error(Errc::ParseError, "unknown estimation bias '" + token + "'");
}

const char* to_string(CompositionRule rule) noexcept {
  switch (rule) {
    case CompositionRule::WeightedMean: return "weighted_mean";
    case CompositionRule::Min: return "min";
  }
  return "?";
}

CompositionRule parse_composition_rule(const std::string& token) {
  for (CompositionRule r :
       {CompositionRule::WeightedMean, CompositionRule::Min}) {
    if (token == to_string(r)) return r;
  }
  throw Error(Errc::ParseError, "unknown composition rule '" + token + "'");
}

void MetricSpec::check() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(threshold) || !finite(lower) || !finite(upper) || !finite(band)) {
    throw Error(Errc::ConfigError, "metric spec has non-finite numbers");
  }
  if (band < 0.0) {
    throw Error(Errc::ConfigError, "metric band must be >= 0");
  }
  switch (kind) {
    case MetricKind::MaxLimit:
    case MetricKind::MaxOvershoot:
    case MetricKind::SteadyStateOffset:
    case MetricKind::Overshoot:
    case MetricKind::VarianceBound:
      if (threshold <= 0.0) {
        throw Error(Errc::ConfigError,
                    std::string(to_string(kind)) + " needs a positive threshold");
      }
      break;
    case MetricKind::MinDistance:
      if (threshold <= 0.0) {
        throw Error(Errc::ConfigError, "min_distance needs a positive minimum");
      }
      break;
    case MetricKind::Range:
      if (!(lower < upper)) {
        throw Error(Errc::ConfigError, "range needs lower < upper");
      }
      break;
    case MetricKind::ValidityFlag:
      break;
  }
  if (unit.empty() && kind != MetricKind::ValidityFlag) {
    throw Error(Errc::ConfigError, "metric unit must be non-empty");
  }
}

double MetricSpec::falloff_band() const {
  if (band > 0.0) return band;
  if (kind == MetricKind::MinDistance) return threshold;
  if (kind == MetricKind::Range) return (upper - lower) / 2.0;
  return 0.0;
}

PerformanceLevel::PerformanceLevel(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(Errc::ConfigError, "performance level outside [0, 1]");
  }
}

PerformanceLevel PerformanceLevel::clamped(double value) noexcept {
  if (std::isnan(value)) return PerformanceLevel{};
  PerformanceLevel level;
  level.value_ = std::clamp(value, 0.0, 1.0);
  return level;
}

PerformanceLevel evaluate_atomic(const AtomicMetric& metric,
                                 const Measurement& measurement) {
  const MetricSpec& spec = metric.spec;
  if (measurement.unit != spec.unit) {
    throw Error(Errc::UnitMismatch, "metric '" + metric.id + "' expects unit '" +
                                        spec.unit + "', got '" +
                                        measurement.unit + "'");
  }
  const double m = measurement.value;
  switch (spec.kind) {
    case MetricKind::MaxLimit:
    case MetricKind::MaxOvershoot:
    case MetricKind::SteadyStateOffset:
    case MetricKind::Overshoot:
      return PerformanceLevel::clamped(1.0 - std::abs(m) / spec.threshold);
    case MetricKind::MinDistance:
      return PerformanceLevel::clamped((m - spec.threshold) /
                                       spec.falloff_band());
    case MetricKind::Range: {
      if (m >= spec.lower && m <= spec.upper) return PerformanceLevel{1.0};
      const double outside =
          m < spec.lower ? spec.lower - m : m - spec.upper;
      return PerformanceLevel::clamped(1.0 - outside / spec.falloff_band());
    }
    case MetricKind::VarianceBound:
      if (m < 0.0) {
        throw Error(Errc::NegativeVariance,
                    "metric '" + metric.id + "' got variance " +
                        std::to_string(m));
      }
      return PerformanceLevel::clamped(1.0 - m / spec.threshold);
    case MetricKind::ValidityFlag:
      return PerformanceLevel{m != 0.0 ? 1.0 : 0.0};
  }
  return PerformanceLevel{};
}

PerformanceLevel evaluate_composed(
    const ComposedMetric& metric,
    const std::map<std::string, PerformanceLevel>& child_levels) {
  double weighted = 0.0;
  double minimum = 1.0;
  for (std::size_t i = 0; i < metric.children.size(); ++i) {
    auto it = child_levels.find(metric.children[i]);
    if (it == child_levels.end()) {
      throw Error(Errc::MissingChildLevel,
                  "no level for child '" + metric.children[i] + "' of '" +
                      metric.id + "'");
    }
    weighted += metric.weights[i] * it->second.value();
    minimum = std::min(minimum, it->second.value());
  }
  return metric.rule == CompositionRule::WeightedMean
             ? PerformanceLevel::clamped(weighted)
             : PerformanceLevel::clamped(minimum);
}

std::set<std::string> history(const AtomicMetric& metric) {
  return {metric.id};
}

std::set<std::string> history(const ComposedMetric& metric) {
  return metric.history;
}

void MetricRegistry::add_atomic(AtomicMetric metric) {
  if (contains(metric.id)) {
    throw Error(Errc::DuplicateId, "metric id '" + metric.id + "' already exists");
  }
  metric.spec.check();
  if (!(metric.weight > 0.0 && metric.weight <= 1.0)) {
    throw Error(Errc::ConfigError,
                "metric '" + metric.id + "' weight must be in (0, 1]");
  }
  if (metric.grace_cycles < 0) {
    throw Error(Errc::ConfigError,
                "metric '" + metric.id + "' grace_cycles must be >= 0");
  }
  order_.push_back(metric.id);
  atomics_.emplace(metric.id, std::move(metric));
}

const ComposedMetric& MetricRegistry::compose(
    const std::string& id, const std::vector<std::string>& children,
    const std::vector<double>& weights, CompositionRule rule,
    const std::set<std::string>& allow_shared) {
  if (contains(id)) {
    throw Error(Errc::DuplicateId, "metric id '" + id + "' already exists");
  }
  if (children.empty()) {
    throw Error(Errc::EmptyChildren, "composed metric '" + id + "' has no children");
  }
  if (weights.size() != children.size()) {
    throw Error(Errc::ConfigError,
                "composed metric '" + id + "' needs one weight per child");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(Errc::NonPositiveWeight,
                  "composed metric '" + id + "' has a non-positive weight");
    }
    total += w;
  }

  ComposedMetric metric;
  metric.id = id;
  metric.children = children;
  metric.rule = rule;
  metric.allow_shared = allow_shared;
  for (double w : weights) metric.weights.push_back(w / total);

  bool all_pessimistic = true;
  for (const auto& child : children) {
    if (!contains(child)) {
      throw Error(Errc::UnknownMetric, "composed metric '" + id +
                                           "' references unknown child '" +
                                           child + "'");
    }
    const EstimationBias child_bias =
        is_atomic(child) ? atomic(child).bias : composed(child).bias;
    all_pessimistic =
        all_pessimistic && child_bias == EstimationBias::Pessimistic;

    for (const auto& atom : history_of(child)) {
      if (!metric.history.insert(atom).second && !allow_shared.contains(atom)) {
        throw Error(Errc::CorrelatedComposition,
                    "composed metric '" + id + "' would fuse atomic '" + atom +
                        "' more than once");
      }
    }
  }
  metric.bias =
      all_pessimistic ? EstimationBias::Pessimistic : EstimationBias::Unknown;

  order_.push_back(id);
  return composed_.emplace(id, std::move(metric)).first->second;
}

bool MetricRegistry::contains(const std::string& id) const {
  return atomics_.contains(id) || composed_.contains(id);
}

bool MetricRegistry::is_atomic(const std::string& id) const {
  return atomics_.contains(id);
}

const AtomicMetric& MetricRegistry::atomic(const std::string& id) const {
  auto it = atomics_.find(id);
  if (it == atomics_.end()) {
    throw Error(Errc::UnknownMetric, "no atomic metric '" + id + "'");
  }
  return it->second;
}

const ComposedMetric& MetricRegistry::composed(const std::string& id) const {
  auto it = composed_.find(id);
  if (it == composed_.end()) {
    throw Error(Errc::UnknownMetric, "no composed metric '" + id + "'");
  }
  return it->second;
}

std::set<std::string> MetricRegistry::history_of(const std::string& id) const {
  if (is_atomic(id)) return {id};
  return composed(id).history;
}

PerformanceLevel MetricRegistry::evaluate(
    const std::string& id,
    const std::function<PerformanceLevel(const AtomicMetric&)>& atom_level)
    const {
  if (is_atomic(id)) return atom_level(atomic(id));
  const ComposedMetric& metric = composed(id);
  std::map<std::string, PerformanceLevel> child_levels;
  for (const auto& child : metric.children) {
    child_levels.emplace(child, evaluate(child, atom_level));
  }
  return evaluate_composed(metric, child_levels);
}

}  // namespace skillmon
