#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "skillmon/errors.hpp"

namespace skillmon {

/// Node categories of a skill graph. Every node carries exactly one.
enum class SkillCategory {
  Main,
  ObservableExternalBehavior,
  Perception,
  Planning,
  Action,
  Sensor,
  Actuator,
};

const char* to_string(SkillCategory category) noexcept;
SkillCategory parse_skill_category(const std::string& token);

struct SkillNode {
  std::string id;           // unique, lowercase snake-case token
  std::string name;         // human-readable label
  SkillCategory category = SkillCategory::Main;
  std::string description;
};

/// Directed dependency: `from` depends on `to`. Requirement ids annotate the
/// edge; the definitions live in a requirement document.
struct SkillEdge {
  std::string from;
  std::string to;
  std::vector<std::string> requirements;
};

enum class ViolationKind {
  EmptyNodeId,
  DuplicateNodeId,
  UnknownEdgeEndpoint,
  SelfLoopEdge,
  DuplicateEdge,
  CycleDetected,
  NoMainNode,
  MultipleMainNodes,
  MainHasIncomingEdge,
  SensorNotLeaf,
  ActuatorNotLeaf,
  UnreachableNode,
};

const char* to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::vector<std::string> subjects;  // offending node/edge ids
  std::string message;
};

/// Directed acyclic graph of categorized skills.
///
/// add_skill/add_dependency keep structural invariants (unique ids, existing
/// endpoints, acyclicity) by construction; category rules (single main node,
/// sensors/actuators as leaves, reachability) are checked by validate().
/// from_parts() bypasses all checks so that documents read from disk can be
/// diagnosed with validate() instead of failing mid-load.
///
/// Values are immutable once building is done; const graphs are safe to share
/// across threads.
class SkillGraph {
 public:
  SkillGraph() = default;
  explicit SkillGraph(std::string maneuver) : maneuver_(std::move(maneuver)) {}

  static SkillGraph from_parts(std::string maneuver,
                               std::vector<SkillNode> nodes,
                               std::vector<SkillEdge> edges);

  /// Adds a node. Throws DuplicateId if the id is already present.
  void add_skill(SkillNode node);

  /// Adds the dependency edge from -> to.
  /// Throws UnknownNode, DuplicateEdge, or CycleIntroduced (the graph is left
  /// unchanged on failure; a self-loop counts as a cycle).
  void add_dependency(const std::string& from, const std::string& to);

  /// Appends a requirement id to an existing edge.
  /// Throws UnknownEdge or DuplicateRequirementOnEdge.
  void attach_requirement(const std::string& from, const std::string& to,
                          const std::string& requirement_id);

  /// Checks every graph invariant. Empty result means the graph is valid.
  std::vector<Violation> validate() const;

  /// Node ids ordered so that every edge goes from an earlier to a later
  /// position; ties broken by ascending id. Throws InvalidGraph when
  /// validate() reports violations.
  std::vector<std::string> topological_order() const;

  /// GraphViz DOT rendering with one node statement per skill (category as
  /// fill color) and one edge statement per dependency. Throws InvalidGraph.
  std::string export_dot() const;

  const std::string& maneuver() const noexcept { return maneuver_; }
  const std::vector<SkillNode>& nodes() const noexcept { return nodes_; }
  const std::vector<SkillEdge>& edges() const noexcept { return edges_; }

  bool has_node(const std::string& id) const;
  bool has_edge(const std::string& from, const std::string& to) const;
  const SkillNode& node(const std::string& id) const;  // throws UnknownNode
  const SkillEdge* find_edge(const std::string& from,
                             const std::string& to) const;

  /// Ids of direct dependencies of `id` (edge targets), in edge order.
  std::vector<std::string> dependencies_of(const std::string& id) const;

 private:
  std::optional<std::size_t> index_of(const std::string& id) const;
  bool creates_cycle(const std::string& from, const std::string& to) const;

  std::string maneuver_;
  std::vector<SkillNode> nodes_;  // insertion order
  std::vector<SkillEdge> edges_;  // insertion order
  std::unordered_map<std::string, std::size_t> index_;  // id -> first index
};

}  // namespace skillmon
