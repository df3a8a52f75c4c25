#include "skillmon/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "skillmon/json_io.hpp"

namespace skillmon {

namespace {

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

constexpr int kTraceSchema = 1;

ordered_json step_to_json(const StepRecord& record) {
  ordered_json line;
  line["t"] = record.t;
  line["y"] = record.y;
  line["psi"] = record.psi;
  line["v"] = record.v;
  line["delta"] = record.delta;
  if (record.distance) {
    line["distance"] = *record.distance;
  } else {
    line["distance"] = nullptr;
  }
  line["valid"] = record.valid;
  ordered_json levels = ordered_json::object();
  for (const auto& [node, level] : record.levels) levels[node] = level;
  line["levels"] = std::move(levels);
  ordered_json status = ordered_json::object();
  for (const auto& [node, st] : record.status) status[node] = to_string(st);
  line["status"] = std::move(status);
  line["mode"] = to_string(record.mode);
  return line;
}

ordered_json mode_change_to_json(const ModeChangeRecord& change) {
  ordered_json line;
  line["t"] = change.t;
  line["mode_from"] = to_string(change.from);
  line["mode_to"] = to_string(change.to);
  line["cause"] = change.cause;
  return line;
}

}  // namespace

std::string serialize_trace(const RunTrace& trace) {
  std::ostringstream out;

  ordered_json header;
  header["trace_schema"] = kTraceSchema;
  header["name"] = trace.scenario_name;
  header["dt"] = trace.dt;
  header["scenario"] = json::parse(trace.raw_scenario);
  header["graph"] = json::parse(trace.raw_graph);
  header["requirements"] = json::parse(trace.raw_requirements);
  header["metrics"] = json::parse(trace.raw_metrics);
  header["bindings"] = json::parse(trace.raw_bindings);
  out << header.dump() << '\n';

  auto change = trace.mode_changes.begin();
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    while (change != trace.mode_changes.end() && change->step == k) {
      out << mode_change_to_json(*change).dump() << '\n';
      ++change;
    }
    out << step_to_json(trace.steps[k]).dump() << '\n';
  }
  return out.str();
}

void write_trace(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::IoError, "cannot write '" + path.string() + "'");
  }
  out << serialize_trace(trace);
  if (!out) {
    throw Error(Errc::IoError, "failed writing '" + path.string() + "'");
  }
}

TraceDocument parse_trace(const std::string& text) {
  TraceDocument doc;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json value;
    try {
      value = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::ParseError,
                  "trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!value.is_object()) {
      throw Error(Errc::ParseError,
                  "trace line " + std::to_string(line_no) + ": not an object");
    }

    if (value.contains("trace_schema")) {
      if (have_header) {
        throw Error(Errc::ParseError, "trace has more than one header line");
      }
      if (value["trace_schema"].get<int>() != kTraceSchema) {
        throw Error(Errc::ParseError, "unsupported trace schema");
      }
      for (const char* key :
           {"scenario", "graph", "requirements", "metrics", "bindings"}) {
        if (!value.contains(key)) {
          throw Error(Errc::ParseError,
                      std::string("trace header misses '") + key + "'");
        }
      }
      doc.scenario = parse_scenario(
          value["scenario"].dump(), value["graph"].dump(),
          value["requirements"].dump(), value["metrics"].dump(),
          value["bindings"].dump());
      have_header = true;
      continue;
    }

    if (!have_header) {
      throw Error(Errc::ParseError, "trace records before the header line");
    }

    if (value.contains("mode_from")) {
      ModeChangeRecord change;
      change.step = doc.steps.size();  // belongs to the upcoming record
      change.t = value.at("t").get<double>();
      change.from = parse_operating_mode(value.at("mode_from").get<std::string>());
      change.to = parse_operating_mode(value.at("mode_to").get<std::string>());
      change.cause = value.at("cause").get<std::string>();
      doc.mode_changes.push_back(std::move(change));
      continue;
    }

    StepRecord record;
    try {
      record.t = value.at("t").get<double>();
      record.y = value.at("y").get<double>();
      record.psi = value.at("psi").get<double>();
      record.v = value.at("v").get<double>();
      record.delta = value.at("delta").get<double>();
      if (!value.at("distance").is_null()) {
        record.distance = value.at("distance").get<double>();
      }
      record.valid = value.at("valid").get<bool>();
      for (const auto& [node, level] : value.at("levels").items()) {
        record.levels.emplace(node, level.get<double>());
      }
      for (const auto& [node, st] : value.at("status").items()) {
        record.status.emplace(node,
                              parse_monitor_status(st.get<std::string>()));
      }
      record.mode = parse_operating_mode(value.at("mode").get<std::string>());
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError,
                  "trace line " + std::to_string(line_no) + ": " + e.what());
    }
    doc.steps.push_back(std::move(record));
  }

  if (!have_header) {
    throw Error(Errc::ParseError, "trace has no header line");
  }
  return doc;
}

TraceDocument read_trace(const std::filesystem::path& path) {
  try {
    return parse_trace(read_text_file(path));
  } catch (Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

ReplayResult replay(const TraceDocument& trace) {
  const Scenario& scn = trace.scenario;
  constexpr std::size_t kMaxReported = 5;

  AbilityGraph::Config config;
  config.cycle_duration = scn.dt;
  AbilityGraph ability =
      AbilityGraph::instantiate(scn.graph, scn.bindings, scn.metrics, config);
  const auto targets = resolve_signal_targets(scn);

  ReplayResult result;
  auto mismatch = [&](std::size_t step, std::string detail) {
    result.ok = false;
    if (result.mismatches.size() < kMaxReported) {
      result.mismatches.push_back(ReplayMismatch{step, std::move(detail)});
    }
  };

  auto emit = [&](const std::string& role, double value, double t) {
    auto it = targets.find(role);
    if (it == targets.end()) return;
    for (const auto& [metric_id, component] : it->second.destinations) {
      ability.ingest(
          SignalSample{metric_id, component, value, it->second.unit, t});
    }
  };

  OperatingMode mode = scn.monitor.initial_mode;
  double previous_delta = scn.initial_state.delta;

  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const StepRecord& record = trace.steps[k];
    const FaultState fault = scn.faults.at(record.t);

    if (record.valid) {
      if (!record.distance) {
        throw Error(Errc::ParseError,
                    "step " + std::to_string(k) +
                        " is valid but has no distance sample");
      }
      emit("lane_distance", *record.distance, record.t);
      emit("lane_variance",
           fault.noise_sigma * fault.noise_sigma * fault.variance_scale,
           record.t);
      emit("lane_valid", 1.0, record.t);
      emit("steady_state_offset",
           std::abs(*record.distance - scn.controller.target_distance),
           record.t);
    }
    emit("steering_angle", std::abs(previous_delta) * kRadToDeg, record.t);
    emit("camera_ok", 1.0, record.t);

    ability.propagate();
    ability.assess(scn.monitor.thresholds);
    mode = step(mode, ability.overall_status(), scn.monitor.degraded_policy);

    const auto levels = ability.levels();
    const auto statuses = ability.statuses();
    for (const auto& [node, level] : record.levels) {
      auto it = levels.find(node);
      if (it == levels.end()) {
        mismatch(k, "node '" + node + "' missing from replayed levels");
        continue;
      }
      if (it->second != level) {
        std::ostringstream os;
        os.precision(17);
        os << "level of '" << node << "': recorded " << level << ", replayed "
           << it->second;
        mismatch(k, os.str());
      }
    }
    for (const auto& [node, st] : record.status) {
      auto it = statuses.find(node);
      if (it == statuses.end() || it->second != st) {
        mismatch(k, "status of '" + node + "' differs");
      }
    }
    if (mode != record.mode) {
      mismatch(k, std::string("mode: recorded ") + to_string(record.mode) +
                      ", replayed " + to_string(mode));
    }
    previous_delta = record.delta;
  }
  return result;
}

TraceSummary summarize(const TraceDocument& trace) {
  TraceSummary summary;
  summary.step_count = trace.steps.size();
  if (trace.steps.empty()) return summary;

  summary.min_distance_sample = std::numeric_limits<double>::infinity();
  summary.min_distance_true = std::numeric_limits<double>::infinity();
  std::map<std::string, double> level_sums;
  std::map<std::string, std::size_t> level_counts;

  for (const auto& record : trace.steps) {
    if (record.distance) {
      summary.min_distance_sample =
          std::min(summary.min_distance_sample, *record.distance);
    }
    summary.min_distance_true =
        std::min(summary.min_distance_true,
                 trace.scenario.lane_half_width - record.y);
    summary.max_abs_delta_deg =
        std::max(summary.max_abs_delta_deg, std::abs(record.delta) * kRadToDeg);

    for (const auto& [node, level] : record.levels) {
      auto [it, inserted] = summary.nodes.try_emplace(node);
      NodeStats& stats = it->second;
      if (inserted) {
        stats.min_level = stats.max_level = level;
      } else {
        stats.min_level = std::min(stats.min_level, level);
        stats.max_level = std::max(stats.max_level, level);
      }
      level_sums[node] += level;
      ++level_counts[node];
    }
    for (const auto& [node, st] : record.status) {
      NodeStats& stats = summary.nodes[node];
      if (st == MonitorStatus::Ok) ++stats.ok;
      if (st == MonitorStatus::Degraded) ++stats.degraded;
      if (st == MonitorStatus::Failed) ++stats.failed;
    }

    if (summary.mode_timeline.empty() ||
        summary.mode_timeline.back().mode != record.mode) {
      summary.mode_timeline.push_back(ModeSpan{record.mode, record.t, record.t});
    } else {
      summary.mode_timeline.back().t_to = record.t;
    }
  }
  for (auto& [node, stats] : summary.nodes) {
    if (level_counts[node] > 0) {
      stats.mean_level =
          level_sums[node] / static_cast<double>(level_counts[node]);
    }
  }

  const StepRecord& last = trace.steps.back();
  summary.final_speed = last.v;
  const std::string main_id = trace.scenario.graph.topological_order().front();
  auto it = last.status.find(main_id);
  summary.final_status =
      it != last.status.end() ? it->second : MonitorStatus::Ok;
  return summary;
}

std::string format_summary(const TraceSummary& summary,
                           const std::string& title) {
  std::ostringstream os;
  os.precision(6);
  os << "# Trace summary: " << (title.empty() ? "(unnamed)" : title) << "\n\n";
  os << "- steps: " << summary.step_count << "\n";
  os << "- min distance to marking (samples): " << summary.min_distance_sample
     << " m\n";
  os << "- min distance to marking (true): " << summary.min_distance_true
     << " m\n";
  os << "- max |steering angle|: " << summary.max_abs_delta_deg << " deg\n";
  os << "- final speed: " << summary.final_speed << " m/s\n";
  os << "- final status: " << to_string(summary.final_status) << "\n";
  os << "- mode timeline: ";
  for (std::size_t i = 0; i < summary.mode_timeline.size(); ++i) {
    const ModeSpan& span = summary.mode_timeline[i];
    if (i > 0) os << " -> ";
    os << to_string(span.mode) << " [" << span.t_from << ", " << span.t_to
       << "]";
  }
  os << "\n\n";
  os << "| node | min | mean | max | ok | degraded | failed |\n";
  os << "|------|-----|------|-----|----|----------|--------|\n";
  for (const auto& [node, stats] : summary.nodes) {
    os << "| " << node << " | " << stats.min_level << " | " << stats.mean_level
       << " | " << stats.max_level << " | " << stats.ok << " | "
       << stats.degraded << " | " << stats.failed << " |\n";
  }
  return os.str();
}

}  // namespace skillmon
