#include "skillmon/skill_graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace skillmon {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::CycleIntroduced: return "CycleIntroduced";
    case Errc::InvalidGraph: return "InvalidGraph";
    case Errc::UnknownEdge: return "UnknownEdge";
    case Errc::DuplicateRequirementOnEdge: return "DuplicateRequirementOnEdge";
    case Errc::UnitMismatch: return "UnitMismatch";
    case Errc::NegativeVariance: return "NegativeVariance";
    case Errc::CorrelatedComposition: return "CorrelatedComposition";
    case Errc::EmptyChildren: return "EmptyChildren";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::MissingChildLevel: return "MissingChildLevel";
    case Errc::MissingBinding: return "MissingBinding";
    case Errc::UnknownMetric: return "UnknownMetric";
    case Errc::StructureMismatch: return "StructureMismatch";
    case Errc::StaleTimestamp: return "StaleTimestamp";
    case Errc::NotInstantiated: return "NotInstantiated";
    case Errc::IllegalTransition: return "IllegalTransition";
    case Errc::MonitorNotReady: return "MonitorNotReady";
    case Errc::InvalidPerception: return "InvalidPerception";
    case Errc::NonPositiveDt: return "NonPositiveDt";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
  }
  return "Error";
}

const char* to_string(SkillCategory category) noexcept {
  switch (category) {
    case SkillCategory::Main: return "main";
    case SkillCategory::ObservableExternalBehavior:
      return "observable_external_behavior";
    case SkillCategory::Perception: return "perception";
    case SkillCategory::Planning: return "planning";
    case SkillCategory::Action: return "action";
    case SkillCategory::Sensor: return "sensor";
    case SkillCategory::Actuator: return "actuator";
  }
  return "?";
}

SkillCategory parse_skill_category(const std::string& token) {
  for (SkillCategory c :
       {SkillCategory::Main, SkillCategory::ObservableExternalBehavior,
        SkillCategory::Perception, SkillCategory::Planning,
        SkillCategory::Action, SkillCategory::Sensor,
        SkillCategory::Actuator}) {
    if (token == to_string(c)) return c;
  }
  throw Error(Errc::ParseError, "unknown skill category '" + token + "'");
}

const char* to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::EmptyNodeId: return "EmptyNodeId";
    case ViolationKind::DuplicateNodeId: return "DuplicateNodeId";
    case ViolationKind::UnknownEdgeEndpoint: return "UnknownEdgeEndpoint";
    case ViolationKind::SelfLoopEdge: return "SelfLoopEdge";
    case ViolationKind::DuplicateEdge: return "DuplicateEdge";
    case ViolationKind::CycleDetected: return "CycleDetected";
    case ViolationKind::NoMainNode: return "NoMainNode";
    case ViolationKind::MultipleMainNodes: return "MultipleMainNodes";
    case ViolationKind::MainHasIncomingEdge: return "MainHasIncomingEdge";
    case ViolationKind::SensorNotLeaf: return "SensorNotLeaf";
    case ViolationKind::ActuatorNotLeaf: return "ActuatorNotLeaf";
    case ViolationKind::UnreachableNode: return "UnreachableNode";
  }
  return "?";
}

SkillGraph SkillGraph::from_parts(std::string maneuver,
                                  std::vector<SkillNode> nodes,
                                  std::vector<SkillEdge> edges) {
  SkillGraph g(std::move(maneuver));
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
    g.index_.emplace(g.nodes_[i].id, i);  // keeps first index on duplicates
  }
  return g;
}

void SkillGraph::add_skill(SkillNode node) {
  if (index_.contains(node.id)) {
    throw Error(Errc::DuplicateId, "skill id '" + node.id + "' already exists");
  }
  index_.emplace(node.id, nodes_.size());
  nodes_.push_back(std::move(node));
}

void SkillGraph::add_dependency(const std::string& from,
                                const std::string& to) {
  for (const auto& id : {from, to}) {
    if (!index_.contains(id)) {
      throw Error(Errc::UnknownNode, "no skill with id '" + id + "'");
    }
  }
  if (find_edge(from, to) != nullptr) {
    throw Error(Errc::DuplicateEdge, "edge " + from + " -> " + to +
                                         " already exists");
  }
  if (from == to || creates_cycle(from, to)) {
    throw Error(Errc::CycleIntroduced,
                "edge " + from + " -> " + to + " would close a cycle");
  }
  edges_.push_back(SkillEdge{from, to, {}});
}

void SkillGraph::attach_requirement(const std::string& from,
                                    const std::string& to,
                                    const std::string& requirement_id) {
  auto it = std::find_if(edges_.begin(), edges_.end(), [&](const SkillEdge& e) {
    return e.from == from && e.to == to;
  });
  if (it == edges_.end()) {
    throw Error(Errc::UnknownEdge, "no edge " + from + " -> " + to);
  }
  if (std::find(it->requirements.begin(), it->requirements.end(),
                requirement_id) != it->requirements.end()) {
    throw Error(Errc::DuplicateRequirementOnEdge,
                "requirement '" + requirement_id + "' already on edge " +
                    from + " -> " + to);
  }
  it->requirements.push_back(requirement_id);
}

bool SkillGraph::has_node(const std::string& id) const {
  return index_.contains(id);
}

bool SkillGraph::has_edge(const std::string& from, const std::string& to) const {
  return find_edge(from, to) != nullptr;
}

const SkillNode& SkillGraph::node(const std::string& id) const {
  auto idx = index_of(id);
  if (!idx) throw Error(Errc::UnknownNode, "no skill with id '" + id + "'");
  return nodes_[*idx];
}

const SkillEdge* SkillGraph::find_edge(const std::string& from,
                                       const std::string& to) const {
  for (const auto& e : edges_) {
    if (e.from == from && e.to == to) return &e;
  }
  return nullptr;
}

std::vector<std::string> SkillGraph::dependencies_of(
    const std::string& id) const {
  std::vector<std::string> out;
  for (const auto& e : edges_) {
    if (e.from == id) out.push_back(e.to);
  }
  return out;
}

std::optional<std::size_t> SkillGraph::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// Would adding from -> to close a directed cycle? True iff `from` is already
// reachable from `to` along existing edges.
bool SkillGraph::creates_cycle(const std::string& from,
                               const std::string& to) const {
  std::set<std::string> seen;
  std::vector<std::string> stack{to};
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    if (cur == from) return true;
    if (!seen.insert(cur).second) continue;
    for (const auto& e : edges_) {
      if (e.from == cur) stack.push_back(e.to);
    }
  }
  return false;
}

std::vector<Violation> SkillGraph::validate() const {
  std::vector<Violation> out;
  auto add = [&](ViolationKind kind, std::vector<std::string> subjects,
                 std::string message) {
    out.push_back(Violation{kind, std::move(subjects), std::move(message)});
  };

  std::set<std::string> ids;
  std::set<std::string> duplicate_ids;
  for (const auto& n : nodes_) {
    if (n.id.empty()) add(ViolationKind::EmptyNodeId, {}, "node with empty id");
    if (!ids.insert(n.id).second && duplicate_ids.insert(n.id).second) {
      add(ViolationKind::DuplicateNodeId, {n.id},
          "node id '" + n.id + "' appears more than once");
    }
  }

  std::set<std::pair<std::string, std::string>> edge_keys;
  bool endpoints_ok = true;
  for (const auto& e : edges_) {
    std::string key = e.from + " -> " + e.to;
    for (const auto& endpoint : {e.from, e.to}) {
      if (!ids.contains(endpoint)) {
        add(ViolationKind::UnknownEdgeEndpoint, {e.from, e.to},
            "edge " + key + " references unknown node '" + endpoint + "'");
        endpoints_ok = false;
      }
    }
    if (e.from == e.to) {
      add(ViolationKind::SelfLoopEdge, {e.from}, "self loop on " + key);
    }
    if (!edge_keys.insert({e.from, e.to}).second) {
      add(ViolationKind::DuplicateEdge, {e.from, e.to},
          "edge " + key + " appears more than once");
    }
  }

  // Cycle detection (three-color DFS); skipped when endpoints are broken.
  if (endpoints_ok && duplicate_ids.empty()) {
    std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
    bool cyclic = false;
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
      color[id] = 1;
      for (const auto& e : edges_) {
        if (e.from != id || cyclic) continue;
        int c = color[e.to];
        if (c == 1) {
          cyclic = true;
          return;
        }
        if (c == 0) visit(e.to);
      }
      color[id] = 2;
    };
    for (const auto& n : nodes_) {
      if (!cyclic && color[n.id] == 0) visit(n.id);
    }
    if (cyclic) {
      add(ViolationKind::CycleDetected, {}, "graph contains a directed cycle");
    }
  }

  std::vector<std::string> mains;
  for (const auto& n : nodes_) {
    if (n.category == SkillCategory::Main) mains.push_back(n.id);
  }
  if (mains.empty() && !nodes_.empty()) {
    add(ViolationKind::NoMainNode, {}, "no node of category main");
  }
  if (mains.size() > 1) {
    add(ViolationKind::MultipleMainNodes, mains,
        "more than one node of category main");
  }
  for (const auto& main_id : mains) {
    for (const auto& e : edges_) {
      if (e.to == main_id) {
        add(ViolationKind::MainHasIncomingEdge, {main_id},
            "main node '" + main_id + "' has incoming edge from '" + e.from +
                "'");
      }
    }
  }

  for (const auto& n : nodes_) {
    if (n.category != SkillCategory::Sensor &&
        n.category != SkillCategory::Actuator) {
      continue;
    }
    for (const auto& e : edges_) {
      if (e.from == n.id) {
        add(n.category == SkillCategory::Sensor ? ViolationKind::SensorNotLeaf
                                                : ViolationKind::ActuatorNotLeaf,
            {n.id},
            std::string(to_string(n.category)) + " node '" + n.id +
                "' has outgoing edge to '" + e.to + "'");
      }
    }
  }

  if (mains.size() == 1) {
    std::set<std::string> reachable{mains.front()};
    std::vector<std::string> stack{mains.front()};
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      for (const auto& e : edges_) {
        if (e.from == cur && reachable.insert(e.to).second) {
          stack.push_back(e.to);
        }
      }
    }
    for (const auto& n : nodes_) {
      if (!reachable.contains(n.id)) {
        add(ViolationKind::UnreachableNode, {n.id},
            "node '" + n.id + "' is not reachable from the main node");
      }
    }
  }

  return out;
}

std::vector<std::string> SkillGraph::topological_order() const {
  auto violations = validate();
  if (!violations.empty()) {
    throw Error(Errc::InvalidGraph,
                "graph does not validate: " + violations.front().message);
  }

  std::map<std::string, int> in_degree;
  for (const auto& n : nodes_) in_degree[n.id] = 0;
  for (const auto& e : edges_) ++in_degree[e.to];

  // Kahn's algorithm with a min-heap on id for deterministic tie-breaking.
  std::priority_queue<std::string, std::vector<std::string>,
                      std::greater<std::string>>
      ready;
  for (const auto& [id, deg] : in_degree) {
    if (deg == 0) ready.push(id);
  }
  std::vector<std::string> order;
  order.reserve(nodes_.size());
  while (!ready.empty()) {
    std::string cur = ready.top();
    ready.pop();
    order.push_back(cur);
    for (const auto& e : edges_) {
      if (e.from == cur && --in_degree[e.to] == 0) ready.push(e.to);
    }
  }
  return order;
}

namespace {

const char* fill_color(SkillCategory category) {
  switch (category) {
    case SkillCategory::Main: return "grey";
    case SkillCategory::ObservableExternalBehavior: return "yellow";
    case SkillCategory::Perception: return "green";
    case SkillCategory::Planning: return "lightblue";
    case SkillCategory::Action: return "orange";
    case SkillCategory::Sensor: return "blue";
    case SkillCategory::Actuator: return "red";
  }
  return "white";
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string SkillGraph::export_dot() const {
  auto violations = validate();
  if (!violations.empty()) {
    throw Error(Errc::InvalidGraph,
                "graph does not validate: " + violations.front().message);
  }
  std::ostringstream os;
  os << "digraph skills {\n";
  os << "  rankdir=TB;\n";
  os << "  node [style=filled];\n";
  for (const auto& n : nodes_) {
    os << "  \"" << dot_escape(n.id) << "\" [label=\"" << dot_escape(n.name)
       << "\", fillcolor=\"" << fill_color(n.category) << "\"];\n";
  }
  for (const auto& e : edges_) {
    os << "  \"" << dot_escape(e.from) << "\" -> \"" << dot_escape(e.to)
       << "\"";
    if (!e.requirements.empty()) {
      std::string label;
      for (const auto& r : e.requirements) {
        if (!label.empty()) label += ", ";
        label += r;
      }
      os << " [label=\"" << dot_escape(label) << "\"]";
    }
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace skillmon
