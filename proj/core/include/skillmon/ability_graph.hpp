#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "skillmon/errors.hpp"
#include "skillmon/metrics.hpp"
#include "skillmon/mode_machine.hpp"
#include "skillmon/skill_graph.hpp"

namespace skillmon {

/// Role of an ability node inside the dependency graph. Derived from the
/// structure: the root is the main node, sensors source data, actuators sink
/// it, everything else is a sub node.
enum class DependencyRelationType { MainNode, SubNode, DataSink, DataSource };

const char* to_string(DependencyRelationType type) noexcept;

enum class RedundancyRule { Single, MaxOfRedundant };

const char* to_string(RedundancyRule rule) noexcept;
RedundancyRule parse_redundancy_rule(const std::string& token);

/// Per-skill runtime configuration: which software components implement the
/// ability, which metrics are evaluated at the node, and how own metrics and
/// child levels are aggregated.
struct AbilityBinding {
  std::vector<std::string> components;
  std::vector<std::string> metric_ids;
  CompositionRule rule = CompositionRule::Min;
  RedundancyRule redundancy = RedundancyRule::Single;
};

struct AbilityNode {
  std::string skill_id;
  DependencyRelationType relation_type = DependencyRelationType::SubNode;
  SkillCategory category = SkillCategory::Main;
  std::vector<std::string> components;
  std::vector<std::string> metric_ids;
  CompositionRule rule = CompositionRule::Min;
  RedundancyRule redundancy = RedundancyRule::Single;
};

/// One measurement delivered to the monitor, keyed by metric and producing
/// component.
struct SignalSample {
  std::string metric_id;
  std::string component_id;
  double value = 0.0;
  std::string unit;
  double timestamp = 0.0;
};

/// Per-edge performance level: every edge into a node carries the node's
/// level.
struct EdgeLevel {
  std::string from;
  std::string to;
  PerformanceLevel level;
};

/// Runtime instantiation of a skill graph.
///
/// Structure mirrors the source graph one-to-one. ingest() may be called from
/// several producer threads; propagate()/assess() belong on one evaluation
/// thread and work on a snapshot of the sample store taken at cycle start.
/// levels()/statuses() return the last published snapshot without blocking
/// producers.
///
/// Freshness: a sample older than grace_cycles * cycle_duration (measured
/// against the newest ingested timestamp) no longer holds its value and the
/// metric reports level 0; a metric that never received a sample reports 0 as
/// well.
class AbilityGraph {
 public:
  struct Config {
    double cycle_duration = 1.0;  // seconds per evaluation cycle
  };

  AbilityGraph() = default;

  /// Builds the runtime graph. The skill graph must validate; every node
  /// needs a binding with at least one component; metric ids must resolve in
  /// the registry; MaxOfRedundant requires two or more components. All levels
  /// start at 1.0, all statuses at OK.
  /// Throws InvalidGraph, MissingBinding, UnknownMetric, or StructureMismatch.
  static AbilityGraph instantiate(
      const SkillGraph& graph,
      const std::map<std::string, AbilityBinding>& bindings,
      const MetricRegistry& metrics, const Config& config);
  static AbilityGraph instantiate(
      const SkillGraph& graph,
      const std::map<std::string, AbilityBinding>& bindings,
      const MetricRegistry& metrics);

  /// Stores the latest value per (metric, component). Thread-safe.
  /// Throws NotInstantiated, UnknownMetric (id not an atomic metric bound in
  /// this graph), UnitMismatch, NegativeVariance, or StaleTimestamp (older
  /// than the stored sample for the same key).
  void ingest(const SignalSample& sample);

  /// Recomputes all node levels bottom-up from the current sample store and
  /// publishes them. Throws NotInstantiated.
  void propagate();

  /// Discretizes the published levels into per-node statuses.
  /// Throws NotInstantiated or ConfigError (bad thresholds).
  std::map<std::string, MonitorStatus> assess(const StatusThresholds& thresholds);

  bool instantiated() const noexcept { return !nodes_.empty(); }

  std::map<std::string, double> levels() const;         // node id -> level
  std::vector<EdgeLevel> edge_levels() const;           // per-edge replication
  std::map<std::string, MonitorStatus> statuses() const;
  double level(const std::string& skill_id) const;
  MonitorStatus status(const std::string& skill_id) const;
  MonitorStatus overall_status() const;  // status of the main node

  const std::vector<AbilityNode>& nodes() const noexcept { return nodes_; }
  const AbilityNode& node(const std::string& skill_id) const;
  const SkillGraph& skill_graph() const noexcept { return graph_; }
  const std::string& main_node() const noexcept { return main_id_; }

 private:
  struct StoredSample {
    double value = 0.0;
    std::string unit;
    double timestamp = 0.0;
  };
  using SampleStore = std::map<std::pair<std::string, std::string>, StoredSample>;

  // Synchronized runtime state, behind a pointer so graphs stay movable.
  struct Runtime {
    std::mutex store_mutex;
    SampleStore store;
    double newest_timestamp = 0.0;
    bool any_sample = false;

    std::mutex publish_mutex;
    std::map<std::string, double> levels;
    std::map<std::string, MonitorStatus> statuses;
  };

  void require_instantiated() const;
  double sample_level(const AtomicMetric& metric, const std::string& component,
                      const SampleStore& store, double now, bool any_sample)
      const;

  SkillGraph graph_;
  MetricRegistry metrics_;
  Config config_;
  std::vector<AbilityNode> nodes_;
  std::map<std::string, std::size_t> node_index_;
  std::vector<std::string> reverse_topo_;
  std::map<std::string, std::vector<std::string>> children_;
  std::set<std::string> bound_atomics_;
  std::string main_id_;
  std::unique_ptr<Runtime> runtime_;
};

}  // namespace skillmon
