#include "skillmon/ability_graph.hpp"

#include <algorithm>

namespace skillmon {

const char* to_string(DependencyRelationType type) noexcept {
  switch (type) {
    case DependencyRelationType::MainNode: return "main_node";
    case DependencyRelationType::SubNode: return "sub_node";
    case DependencyRelationType::DataSink: return "data_sink";
    case DependencyRelationType::DataSource: return "data_source";
  }
  return "?";
}

const char* to_string(RedundancyRule rule) noexcept {
  switch (rule) {
    case RedundancyRule::Single: return "single";
    case RedundancyRule::MaxOfRedundant: return "max";
  }
  return "?";
}

RedundancyRule parse_redundancy_rule(const std::string& token) {
  for (RedundancyRule r :
       {RedundancyRule::Single, RedundancyRule::MaxOfRedundant}) {
    if (token == to_string(r)) return r;
  }
  throw Error(Errc::ParseError, "unknown redundancy rule '" + token + "'");
}

namespace {

DependencyRelationType relation_for(SkillCategory category, bool is_root) {
  if (is_root) return DependencyRelationType::MainNode;
  if (category == SkillCategory::Sensor) return DependencyRelationType::DataSource;
  if (category == SkillCategory::Actuator) return DependencyRelationType::DataSink;
  return DependencyRelationType::SubNode;
}

double combine(CompositionRule rule, const std::vector<double>& values) {
  if (values.empty()) return 1.0;
  if (rule == CompositionRule::Min) {
    return *std::min_element(values.begin(), values.end());
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

AbilityGraph AbilityGraph::instantiate(
    const SkillGraph& graph,
    const std::map<std::string, AbilityBinding>& bindings,
    const MetricRegistry& metrics) {
  return instantiate(graph, bindings, metrics, Config{});
}

AbilityGraph AbilityGraph::instantiate(
    const SkillGraph& graph, const std::map<std::string, AbilityBinding>& bindings,
    const MetricRegistry& metrics, const Config& config) {
  if (config.cycle_duration <= 0.0) {
    throw Error(Errc::ConfigError, "cycle_duration must be > 0");
  }
  auto violations = graph.validate();
  if (!violations.empty()) {
    throw Error(Errc::InvalidGraph,
                "skill graph does not validate: " + violations.front().message);
  }

  AbilityGraph ag;
  ag.graph_ = graph;
  ag.metrics_ = metrics;
  ag.config_ = config;
  ag.runtime_ = std::make_unique<Runtime>();

  auto topo = graph.topological_order();
  ag.reverse_topo_.assign(topo.rbegin(), topo.rend());
  ag.main_id_ = topo.front();

  for (const auto& skill : graph.nodes()) {
    auto it = bindings.find(skill.id);
    if (it == bindings.end()) {
      throw Error(Errc::MissingBinding, skill.id);
    }
    const AbilityBinding& binding = it->second;
    if (binding.components.empty()) {
      throw Error(Errc::MissingBinding,
                  "no component bound to skill '" + skill.id + "'");
    }
    if (binding.redundancy == RedundancyRule::MaxOfRedundant &&
        binding.components.size() < 2) {
      throw Error(Errc::StructureMismatch,
                  "skill '" + skill.id +
                      "' declares redundancy over fewer than two components");
    }
    for (const auto& mid : binding.metric_ids) {
      if (!metrics.contains(mid)) {
        throw Error(Errc::UnknownMetric,
                    "binding of '" + skill.id + "' references unknown metric '" +
                        mid + "'");
      }
      for (const auto& atom : metrics.history_of(mid)) {
        ag.bound_atomics_.insert(atom);
      }
    }

    AbilityNode node;
    node.skill_id = skill.id;
    node.category = skill.category;
    node.relation_type = relation_for(skill.category, skill.id == ag.main_id_);
    node.components = binding.components;
    node.metric_ids = binding.metric_ids;
    node.rule = binding.rule;
    node.redundancy = binding.redundancy;
    ag.node_index_.emplace(skill.id, ag.nodes_.size());
    ag.nodes_.push_back(std::move(node));
  }
  for (const auto& entry : bindings) {
    if (!graph.has_node(entry.first)) {
      throw Error(Errc::StructureMismatch,
                  "binding references unknown skill '" + entry.first + "'");
    }
  }

  for (const auto& n : graph.nodes()) {
    ag.children_.emplace(n.id, graph.dependencies_of(n.id));
    ag.runtime_->levels.emplace(n.id, 1.0);
    ag.runtime_->statuses.emplace(n.id, MonitorStatus::Ok);
  }
  return ag;
}

void AbilityGraph::require_instantiated() const {
  if (!runtime_ || nodes_.empty()) {
    throw Error(Errc::NotInstantiated, "ability graph is empty");
  }
}

void AbilityGraph::ingest(const SignalSample& sample) {
  require_instantiated();
  if (!metrics_.is_atomic(sample.metric_id) ||
      !bound_atomics_.contains(sample.metric_id)) {
    throw Error(Errc::UnknownMetric, "sample for metric '" + sample.metric_id +
                                         "' which is not bound in this graph");
  }
  const AtomicMetric& metric = metrics_.atomic(sample.metric_id);
  if (sample.unit != metric.spec.unit) {
    throw Error(Errc::UnitMismatch,
                "sample for '" + sample.metric_id + "' has unit '" + sample.unit +
                    "', expected '" + metric.spec.unit + "'");
  }
  if (metric.spec.kind == MetricKind::VarianceBound && sample.value < 0.0) {
    throw Error(Errc::NegativeVariance,
                "sample for '" + sample.metric_id + "' is negative");
  }

  std::lock_guard lock(runtime_->store_mutex);
  auto key = std::make_pair(sample.metric_id, sample.component_id);
  auto it = runtime_->store.find(key);
  if (it != runtime_->store.end() && sample.timestamp < it->second.timestamp) {
    throw Error(Errc::StaleTimestamp,
                "sample for '" + sample.metric_id + "'/" + sample.component_id +
                    " is older than the stored one");
  }
  runtime_->store[key] = StoredSample{sample.value, sample.unit, sample.timestamp};
  runtime_->newest_timestamp =
      runtime_->any_sample
          ? std::max(runtime_->newest_timestamp, sample.timestamp)
          : sample.timestamp;
  runtime_->any_sample = true;
}

double AbilityGraph::sample_level(const AtomicMetric& metric,
                                  const std::string& component,
                                  const SampleStore& store, double now,
                                  bool any_sample) const {
  auto it = store.find({metric.id, component});
  if (it == store.end()) return 0.0;  // never observed
  if (any_sample) {
    const double age = now - it->second.timestamp;
    const double horizon = metric.grace_cycles * config_.cycle_duration;
    if (age > horizon * (1.0 + 1e-9) + 1e-12) return 0.0;  // grace expired
  }
  return evaluate_atomic(metric, {it->second.value, it->second.unit}).value();
}

void AbilityGraph::propagate() {
  require_instantiated();

  SampleStore store;
  double now = 0.0;
  bool any_sample = false;
  {
    std::lock_guard lock(runtime_->store_mutex);
    store = runtime_->store;
    now = runtime_->newest_timestamp;
    any_sample = runtime_->any_sample;
  }

  std::map<std::string, double> levels;
  for (const auto& skill_id : reverse_topo_) {
    const AbilityNode& node = nodes_[node_index_.at(skill_id)];

    std::vector<double> parts;
    if (!node.metric_ids.empty()) {
      std::vector<double> per_component;
      per_component.reserve(node.components.size());
      for (const auto& component : node.components) {
        std::vector<double> per_metric;
        per_metric.reserve(node.metric_ids.size());
        for (const auto& mid : node.metric_ids) {
          per_metric.push_back(
              metrics_
                  .evaluate(mid,
                            [&](const AtomicMetric& atom) {
                              return PerformanceLevel::clamped(sample_level(
                                  atom, component, store, now, any_sample));
                            })
                  .value());
        }
        per_component.push_back(combine(node.rule, per_metric));
      }
      parts.push_back(node.redundancy == RedundancyRule::MaxOfRedundant
                          ? *std::max_element(per_component.begin(),
                                              per_component.end())
                          : *std::min_element(per_component.begin(),
                                              per_component.end()));
    }
    for (const auto& child : children_.at(skill_id)) {
      parts.push_back(levels.at(child));
    }
    levels[skill_id] = combine(node.rule, parts);
  }

  std::lock_guard lock(runtime_->publish_mutex);
  runtime_->levels = std::move(levels);
}

std::map<std::string, MonitorStatus> AbilityGraph::assess(
    const StatusThresholds& thresholds) {
  require_instantiated();
  thresholds.check();
  std::lock_guard lock(runtime_->publish_mutex);
  for (const auto& [id, level] : runtime_->levels) {
    runtime_->statuses[id] = status_of(level, thresholds);
  }
  return runtime_->statuses;
}

std::map<std::string, double> AbilityGraph::levels() const {
  require_instantiated();
  std::lock_guard lock(runtime_->publish_mutex);
  return runtime_->levels;
}

std::vector<EdgeLevel> AbilityGraph::edge_levels() const {
  require_instantiated();
  std::lock_guard lock(runtime_->publish_mutex);
  std::vector<EdgeLevel> out;
  out.reserve(graph_.edges().size());
  for (const auto& e : graph_.edges()) {
    out.push_back(EdgeLevel{
        e.from, e.to, PerformanceLevel::clamped(runtime_->levels.at(e.to))});
  }
  return out;
}

std::map<std::string, MonitorStatus> AbilityGraph::statuses() const {
  require_instantiated();
  std::lock_guard lock(runtime_->publish_mutex);
  return runtime_->statuses;
}

double AbilityGraph::level(const std::string& skill_id) const {
  require_instantiated();
  std::lock_guard lock(runtime_->publish_mutex);
  auto it = runtime_->levels.find(skill_id);
  if (it == runtime_->levels.end()) {
    throw Error(Errc::UnknownNode, "no ability node '" + skill_id + "'");
  }
  return it->second;
}

MonitorStatus AbilityGraph::status(const std::string& skill_id) const {
  require_instantiated();
  std::lock_guard lock(runtime_->publish_mutex);
  auto it = runtime_->statuses.find(skill_id);
  if (it == runtime_->statuses.end()) {
    throw Error(Errc::UnknownNode, "no ability node '" + skill_id + "'");
  }
  return it->second;
}

MonitorStatus AbilityGraph::overall_status() const {
  return status(main_id_);
}

const AbilityNode& AbilityGraph::node(const std::string& skill_id) const {
  auto it = node_index_.find(skill_id);
  if (it == node_index_.end()) {
    throw Error(Errc::UnknownNode, "no ability node '" + skill_id + "'");
  }
  return nodes_[it->second];
}

}  // namespace skillmon
