#include "skillmon/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace skillmon {

namespace {

using nlohmann::json;

json parse_document(const std::string& text, const std::string& context) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, context + ": " + e.what());
  }
}

void expect_object(const json& value, const std::string& context) {
  if (!value.is_object()) {
    throw Error(Errc::ParseError, context + " must be a JSON object");
  }
}

void expect_fields(const json& obj, const std::set<std::string>& allowed,
                   const std::string& context) {
  for (const auto& [key, unused] : obj.items()) {
    if (!allowed.contains(key)) {
      throw Error(Errc::ParseError,
                  context + ": unknown field '" + key + "'");
    }
  }
}

const json& require(const json& obj, const char* key,
                    const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(Errc::ParseError,
                context + ": missing field '" + std::string(key) + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& context) {
  const json& v = require(obj, key, context);
  if (!v.is_string()) {
    throw Error(Errc::ParseError,
                context + ": field '" + std::string(key) + "' must be a string");
  }
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key,
                      const std::string& context) {
  const json& v = require(obj, key, context);
  if (!v.is_number()) {
    throw Error(Errc::ParseError,
                context + ": field '" + std::string(key) + "' must be a number");
  }
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback,
                 const std::string& context) {
  if (!obj.contains(key)) return fallback;
  return require_number(obj, key, context);
}

std::string string_or(const json& obj, const char* key,
                      const std::string& fallback, const std::string& context) {
  if (!obj.contains(key)) return fallback;
  return require_string(obj, key, context);
}

std::vector<std::string> string_array(const json& value,
                                      const std::string& context) {
  if (!value.is_array()) {
    throw Error(Errc::ParseError, context + " must be an array of strings");
  }
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) {
      throw Error(Errc::ParseError, context + " must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot read '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

SkillGraph parse_skill_graph(const std::string& json_text) {
  const json doc = parse_document(json_text, "graph document");
  expect_object(doc, "graph document");
  expect_fields(doc, {"maneuver", "nodes", "edges"}, "graph document");

  std::vector<SkillNode> nodes;
  for (const json& n : require(doc, "nodes", "graph document")) {
    expect_object(n, "graph node");
    expect_fields(n, {"id", "name", "category", "description"}, "graph node");
    SkillNode node;
    node.id = require_string(n, "id", "graph node");
    const std::string context = "graph node '" + node.id + "'";
    node.name = require_string(n, "name", context);
    node.category = parse_skill_category(require_string(n, "category", context));
    node.description = string_or(n, "description", "", context);
    nodes.push_back(std::move(node));
  }

  std::vector<SkillEdge> edges;
  for (const json& e : require(doc, "edges", "graph document")) {
    expect_object(e, "graph edge");
    expect_fields(e, {"from", "to", "requirements"}, "graph edge");
    SkillEdge edge;
    edge.from = require_string(e, "from", "graph edge");
    edge.to = require_string(e, "to", "graph edge");
    if (e.contains("requirements")) {
      edge.requirements = string_array(
          e["requirements"], "edge " + edge.from + " -> " + edge.to +
                                 " requirements");
    }
    edges.push_back(std::move(edge));
  }

  return SkillGraph::from_parts(
      string_or(doc, "maneuver", "", "graph document"), std::move(nodes),
      std::move(edges));
}

SkillGraph load_skill_graph(const std::filesystem::path& path) {
  try {
    return parse_skill_graph(read_text_file(path));
  } catch (Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

RequirementSet parse_requirements(const std::string& json_text) {
  const json doc = parse_document(json_text, "requirement document");
  expect_object(doc, "requirement document");
  expect_fields(doc, {"goals", "requirements", "limits"},
                "requirement document");

  RequirementSet out;
  for (const json& g : require(doc, "goals", "requirement document")) {
    expect_object(g, "safety goal");
    expect_fields(g, {"id", "text", "asil", "hazardous_event"}, "safety goal");
    SafetyGoal goal;
    goal.id = require_string(g, "id", "safety goal");
    const std::string context = "safety goal '" + goal.id + "'";
    goal.text = require_string(g, "text", context);
    goal.asil = parse_asil(require_string(g, "asil", context));
    goal.hazardous_event = string_or(g, "hazardous_event", "", context);
    if (!out.goals.emplace(goal.id, goal).second) {
      throw Error(Errc::ConfigError, "duplicate safety goal id '" + goal.id + "'");
    }
  }

  for (const json& r : require(doc, "requirements", "requirement document")) {
    expect_object(r, "requirement");
    expect_fields(r, {"id", "goal", "kind", "threshold", "lower", "upper",
                      "unit", "subject"},
                  "requirement");
    Requirement req;
    req.id = require_string(r, "id", "requirement");
    const std::string context = "requirement '" + req.id + "'";
    req.goal = require_string(r, "goal", context);
    req.kind = parse_requirement_kind(require_string(r, "kind", context));
    req.unit = require_string(r, "unit", context);
    req.subject = string_or(r, "subject", "", context);
    if (req.kind == RequirementKind::Range) {
      req.lower = require_number(r, "lower", context);
      req.upper = require_number(r, "upper", context);
    } else {
      req.threshold = require_number(r, "threshold", context);
    }
    req.check();
    if (!out.goals.contains(req.goal)) {
      throw Error(Errc::ConfigError,
                  context + " references unknown goal '" + req.goal + "'");
    }
    if (!out.requirements.emplace(req.id, req).second) {
      throw Error(Errc::ConfigError, "duplicate requirement id '" + req.id + "'");
    }
  }

  if (doc.contains("limits")) {
    expect_object(doc["limits"], "limits");
    for (const auto& [key, value] : doc["limits"].items()) {
      if (!value.is_number()) {
        throw Error(Errc::ParseError, "limit '" + key + "' must be a number");
      }
      out.limits.emplace(key, value.get<double>());
    }
  }
  return out;
}

RequirementSet load_requirements(const std::filesystem::path& path) {
  try {
    return parse_requirements(read_text_file(path));
  } catch (Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

AsilTable parse_asil_table(const std::string& json_text) {
  const json doc = parse_document(json_text, "ASIL table");
  if (!doc.is_array()) {
    throw Error(Errc::ParseError, "ASIL table must be a JSON array");
  }
  std::vector<std::pair<SecTriple, Asil>> rows;
  for (const json& row : doc) {
    expect_object(row, "ASIL table row");
    expect_fields(row, {"severity", "exposure", "controllability", "asil"},
                  "ASIL table row");
    SecTriple sec;
    sec.severity = parse_severity(require_string(row, "severity", "ASIL row"));
    sec.exposure = parse_exposure(require_string(row, "exposure", "ASIL row"));
    sec.controllability =
        parse_controllability(require_string(row, "controllability", "ASIL row"));
    rows.emplace_back(sec, parse_asil(require_string(row, "asil", "ASIL row")));
  }
  return AsilTable(rows);
}

AsilTable load_asil_table(const std::filesystem::path& path) {
  try {
    return parse_asil_table(read_text_file(path));
  } catch (Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

MetricRegistry parse_metrics(const std::string& json_text) {
  const json doc = parse_document(json_text, "metric document");
  expect_object(doc, "metric document");
  expect_fields(doc, {"atomics", "composed"}, "metric document");

  MetricRegistry registry;
  for (const json& a : require(doc, "atomics", "metric document")) {
    expect_object(a, "atomic metric");
    expect_fields(a,
                  {"id", "kind", "unit", "threshold", "lower", "upper", "band",
                   "weight", "bias", "grace_cycles"},
                  "atomic metric");
    AtomicMetric metric;
    metric.id = require_string(a, "id", "atomic metric");
    const std::string context = "atomic metric '" + metric.id + "'";
    metric.spec.kind = parse_metric_kind(require_string(a, "kind", context));
    metric.spec.unit = string_or(a, "unit", "", context);
    metric.spec.threshold = number_or(a, "threshold", 0.0, context);
    metric.spec.lower = number_or(a, "lower", 0.0, context);
    metric.spec.upper = number_or(a, "upper", 0.0, context);
    metric.spec.band = number_or(a, "band", 0.0, context);
    metric.weight = number_or(a, "weight", 1.0, context);
    metric.bias = parse_estimation_bias(string_or(a, "bias", "unknown", context));
    metric.grace_cycles =
        static_cast<int>(number_or(a, "grace_cycles", 3.0, context));
    registry.add_atomic(std::move(metric));
  }

  if (doc.contains("composed")) {
    for (const json& c : doc["composed"]) {
      expect_object(c, "composed metric");
      expect_fields(c, {"id", "children", "weights", "rule", "allow_shared"},
                    "composed metric");
      const std::string id = require_string(c, "id", "composed metric");
      const std::string context = "composed metric '" + id + "'";
      const std::vector<std::string> children =
          string_array(require(c, "children", context), context + " children");
      std::vector<double> weights;
      if (c.contains("weights")) {
        for (const json& w : c["weights"]) {
          if (!w.is_number()) {
            throw Error(Errc::ParseError, context + ": weights must be numbers");
          }
          weights.push_back(w.get<double>());
        }
      } else {
        weights.assign(children.size(), 1.0);
      }
      const CompositionRule rule = parse_composition_rule(
          string_or(c, "rule", "weighted_mean", context));
      std::set<std::string> allow_shared;
      if (c.contains("allow_shared")) {
        for (const auto& atom :
             string_array(c["allow_shared"], context + " allow_shared")) {
          allow_shared.insert(atom);
        }
      }
      registry.compose(id, children, weights, rule, allow_shared);
    }
  }
  return registry;
}

MetricRegistry load_metrics(const std::filesystem::path& path) {
  try {
    return parse_metrics(read_text_file(path));
  } catch (Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::map<std::string, AbilityBinding> parse_bindings(
    const std::string& json_text) {
  const json doc = parse_document(json_text, "binding document");
  expect_object(doc, "binding document");
  expect_fields(doc, {"bindings"}, "binding document");
  const json& bindings = require(doc, "bindings", "binding document");
  expect_object(bindings, "bindings");

  std::map<std::string, AbilityBinding> out;
  for (const auto& [skill_id, b] : bindings.items()) {
    const std::string context = "binding '" + skill_id + "'";
    expect_object(b, context);
    expect_fields(b, {"components", "metrics", "rule", "redundancy"}, context);
    AbilityBinding binding;
    binding.components =
        string_array(require(b, "components", context), context + " components");
    if (b.contains("metrics")) {
      binding.metric_ids = string_array(b["metrics"], context + " metrics");
    }
    binding.rule =
        parse_composition_rule(string_or(b, "rule", "min", context));
    binding.redundancy =
        parse_redundancy_rule(string_or(b, "redundancy", "single", context));
    out.emplace(skill_id, std::move(binding));
  }
  return out;
}

std::map<std::string, AbilityBinding> load_bindings(
    const std::filesystem::path& path) {
  try {
    return parse_bindings(read_text_file(path));
  } catch (Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

namespace {

FaultSchedule parse_faults(const json& doc, const std::string& context) {
  FaultState base;
  std::vector<FaultSchedule::Override> overrides;
  if (doc.is_null()) return FaultSchedule(base, overrides);
  expect_object(doc, context);
  expect_fields(doc, {"base", "schedule"}, context);

  auto read_state_fields = [&](const json& obj, const std::string& ctx,
                               auto&& set_sigma, auto&& set_dropout,
                               auto&& set_vscale, auto&& set_gscale,
                               auto&& set_dist) {
    expect_fields(obj,
                  {"t", "noise_sigma", "marking_dropout", "variance_scale",
                   "controller_gain_scale", "disturbance_lateral"},
                  ctx);
    if (obj.contains("noise_sigma")) {
      set_sigma(require_number(obj, "noise_sigma", ctx));
    }
    if (obj.contains("marking_dropout")) {
      const json& v = obj["marking_dropout"];
      if (!v.is_boolean()) {
        throw Error(Errc::ParseError, ctx + ": marking_dropout must be boolean");
      }
      set_dropout(v.get<bool>());
    }
    if (obj.contains("variance_scale")) {
      set_vscale(require_number(obj, "variance_scale", ctx));
    }
    if (obj.contains("controller_gain_scale")) {
      set_gscale(require_number(obj, "controller_gain_scale", ctx));
    }
    if (obj.contains("disturbance_lateral")) {
      set_dist(require_number(obj, "disturbance_lateral", ctx));
    }
  };

  if (doc.contains("base")) {
    const json& b = doc["base"];
    expect_object(b, context + " base");
    if (b.contains("t")) {
      throw Error(Errc::ParseError, context + " base must not set 't'");
    }
    read_state_fields(
        b, context + " base", [&](double v) { base.noise_sigma = v; },
        [&](bool v) { base.marking_dropout = v; },
        [&](double v) { base.variance_scale = v; },
        [&](double v) { base.controller_gain_scale = v; },
        [&](double v) { base.disturbance_lateral = v; });
  }
  if (doc.contains("schedule")) {
    for (const json& entry : doc["schedule"]) {
      expect_object(entry, context + " schedule entry");
      FaultSchedule::Override o;
      o.t = require_number(entry, "t", context + " schedule entry");
      read_state_fields(
          entry, context + " schedule entry",
          [&](double v) { o.noise_sigma = v; },
          [&](bool v) { o.marking_dropout = v; },
          [&](double v) { o.variance_scale = v; },
          [&](double v) { o.controller_gain_scale = v; },
          [&](double v) { o.disturbance_lateral = v; });
      overrides.push_back(std::move(o));
    }
  }
  return FaultSchedule(base, overrides);
}

}  // namespace

Scenario parse_scenario(const std::string& scenario_text,
                        const std::string& graph_text,
                        const std::string& requirements_text,
                        const std::string& metrics_text,
                        const std::string& bindings_text) {
  const json doc = parse_document(scenario_text, "scenario document");
  expect_object(doc, "scenario document");
  expect_fields(doc,
                {"name", "duration", "dt", "seed", "lane", "speed_kmh",
                 "safe_halt_decel", "vehicle", "controller", "monitor", "files",
                 "signals", "faults"},
                "scenario document");

  Scenario scn;
  scn.name = string_or(doc, "name", "", "scenario");
  scn.duration = require_number(doc, "duration", "scenario");
  scn.dt = require_number(doc, "dt", "scenario");
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned() && !s.is_number_integer()) {
      throw Error(Errc::ParseError, "scenario seed must be an integer");
    }
    scn.seed = s.get<std::uint64_t>();
  }

  if (doc.contains("lane")) {
    const json& lane = doc["lane"];
    expect_object(lane, "scenario lane");
    expect_fields(lane, {"half_width"}, "scenario lane");
    scn.lane_half_width = number_or(lane, "half_width", 1.25, "scenario lane");
  }

  if (doc.contains("vehicle")) {
    const json& v = doc["vehicle"];
    expect_object(v, "scenario vehicle");
    expect_fields(v, {"wheelbase", "steer_limit_deg", "max_speed_kmh", "initial"},
                  "scenario vehicle");
    scn.vehicle.wheelbase = number_or(v, "wheelbase", 4.0, "vehicle");
    scn.vehicle.steer_limit =
        number_or(v, "steer_limit_deg", 3.0, "vehicle") * kDegToRad;
    scn.vehicle.v_max = number_or(v, "max_speed_kmh", 10.0, "vehicle") / 3.6;
  }

  if (doc.contains("controller")) {
    const json& c = doc["controller"];
    expect_object(c, "scenario controller");
    expect_fields(c, {"target_distance", "kp", "kd"}, "scenario controller");
    scn.controller.target_distance =
        number_or(c, "target_distance", 0.56, "controller");
    scn.controller.kp = number_or(c, "kp", 0.05, "controller");
    scn.controller.kd = number_or(c, "kd", 0.7, "controller");
  }
  scn.controller.steer_limit = scn.vehicle.steer_limit;

  if (doc.contains("monitor")) {
    const json& m = doc["monitor"];
    expect_object(m, "scenario monitor");
    expect_fields(m,
                  {"degraded_below", "failed_below", "degraded_policy",
                   "initial_mode"},
                  "scenario monitor");
    scn.monitor.thresholds.degraded_below =
        number_or(m, "degraded_below", 0.5, "monitor");
    scn.monitor.thresholds.failed_below =
        number_or(m, "failed_below", 0.1, "monitor");
    scn.monitor.degraded_policy = parse_degraded_policy(
        string_or(m, "degraded_policy", "fallback", "monitor"));
    scn.monitor.initial_mode =
        parse_operating_mode(string_or(m, "initial_mode", "follow", "monitor"));
  }

  scn.command_speed = number_or(doc, "speed_kmh", 10.0, "scenario") / 3.6;
  scn.safe_halt_decel = number_or(doc, "safe_halt_decel", 1.0, "scenario");

  if (doc.contains("signals")) {
    const json& signals = doc["signals"];
    expect_object(signals, "scenario signals");
    for (const auto& [role, metric] : signals.items()) {
      if (!metric.is_string()) {
        throw Error(Errc::ParseError,
                    "signal '" + role + "' must map to a metric id string");
      }
      scn.signals.emplace(role, metric.get<std::string>());
    }
  }

  scn.faults = parse_faults(doc.contains("faults") ? doc["faults"] : json(),
                            "scenario faults");

  // initial vehicle state: defaults put the vehicle on target at command speed
  scn.initial_state.y = scn.lane_half_width - scn.controller.target_distance;
  scn.initial_state.v = scn.monitor.initial_mode == OperatingMode::Follow
                            ? scn.command_speed
                            : 0.0;
  if (doc.contains("vehicle") && doc["vehicle"].contains("initial")) {
    const json& init = doc["vehicle"]["initial"];
    expect_object(init, "vehicle initial state");
    expect_fields(init, {"y", "psi", "s", "delta_deg", "v_kmh"},
                  "vehicle initial state");
    scn.initial_state.y = number_or(init, "y", scn.initial_state.y, "initial");
    scn.initial_state.psi = number_or(init, "psi", 0.0, "initial");
    scn.initial_state.s = number_or(init, "s", 0.0, "initial");
    scn.initial_state.delta =
        number_or(init, "delta_deg", 0.0, "initial") * kDegToRad;
    scn.initial_state.v =
        number_or(init, "v_kmh", scn.initial_state.v * 3.6, "initial") / 3.6;
  }

  scn.graph = parse_skill_graph(graph_text);
  scn.requirements = parse_requirements(requirements_text);
  scn.metrics = parse_metrics(metrics_text);
  scn.bindings = parse_bindings(bindings_text);

  scn.raw_scenario = scenario_text;
  scn.raw_graph = graph_text;
  scn.raw_requirements = requirements_text;
  scn.raw_metrics = metrics_text;
  scn.raw_bindings = bindings_text;

  // requirement ids on graph edges must resolve in the requirement document
  for (const auto& edge : scn.graph.edges()) {
    for (const auto& rid : edge.requirements) {
      if (!scn.requirements.requirements.contains(rid)) {
        throw Error(Errc::ConfigError, "edge " + edge.from + " -> " + edge.to +
                                           " references unknown requirement '" +
                                           rid + "'");
      }
    }
  }

  scn.check();
  return scn;
}

Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override,
                       const std::optional<std::string>& policy_override) {
  try {
    std::string text = read_text_file(path);
    if (seed_override || policy_override) {
      text = patch_scenario_overrides(text, seed_override, policy_override);
    }
    const json doc = parse_document(text, "scenario document");
    expect_object(doc, "scenario document");
    const json& files = require(doc, "files", "scenario document");
    expect_object(files, "scenario files");
    expect_fields(files, {"graph", "requirements", "metrics", "bindings"},
                  "scenario files");

    const auto base = path.parent_path();
    auto resolve = [&](const char* key) {
      return base / require_string(files, key, "scenario files");
    };

    return parse_scenario(text, read_text_file(resolve("graph")),
                          read_text_file(resolve("requirements")),
                          read_text_file(resolve("metrics")),
                          read_text_file(resolve("bindings")));
  } catch (Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string patch_scenario_overrides(
    const std::string& scenario_text, std::optional<std::uint64_t> seed,
    const std::optional<std::string>& degraded_policy) {
  json doc = parse_document(scenario_text, "scenario document");
  expect_object(doc, "scenario document");
  if (seed) doc["seed"] = *seed;
  if (degraded_policy) {
    parse_degraded_policy(*degraded_policy);  // validate token
    if (!doc.contains("monitor")) doc["monitor"] = json::object();
    doc["monitor"]["degraded_policy"] = *degraded_policy;
  }
  return doc.dump();
}

}  // namespace skillmon
