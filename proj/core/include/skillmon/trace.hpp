#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "skillmon/simulation.hpp"

namespace skillmon {

/// A parsed trace file: the embedded scenario (rebuilt from the header) plus
/// the per-step and mode-change records.
struct TraceDocument {
  Scenario scenario;
  std::vector<StepRecord> steps;
  std::vector<ModeChangeRecord> mode_changes;
};

/// JSON-lines encoding: one header object, then one object per step in order,
/// with mode-change records interleaved before the step they belong to.
/// Serialization is deterministic; equal traces give byte-equal text.
std::string serialize_trace(const RunTrace& trace);
void write_trace(const RunTrace& trace, const std::filesystem::path& path);

TraceDocument parse_trace(const std::string& text);
TraceDocument read_trace(const std::filesystem::path& path);

struct ReplayMismatch {
  std::size_t step = 0;
  std::string detail;
};

struct ReplayResult {
  bool ok = true;
  std::vector<ReplayMismatch> mismatches;  // first few differences
};

/// Re-runs the monitoring pipeline (sample reconstruction, ingest, propagate,
/// assess, mode stepping) over a recorded trace and compares levels, statuses,
/// and modes record by record. Levels must match exactly.
ReplayResult replay(const TraceDocument& trace);

struct NodeStats {
  double min_level = 1.0;
  double mean_level = 1.0;
  double max_level = 0.0;
  std::size_t ok = 0;
  std::size_t degraded = 0;
  std::size_t failed = 0;
};

struct ModeSpan {
  OperatingMode mode = OperatingMode::Manual;
  double t_from = 0.0;
  double t_to = 0.0;  // end of the last step in the span
};

struct TraceSummary {
  std::size_t step_count = 0;
  double min_distance_sample = 0.0;  // over valid perception samples
  double min_distance_true = 0.0;    // from recorded lateral offsets
  double max_abs_delta_deg = 0.0;
  double final_speed = 0.0;
  MonitorStatus final_status = MonitorStatus::Ok;
  std::vector<ModeSpan> mode_timeline;
  std::map<std::string, NodeStats> nodes;
};

TraceSummary summarize(const TraceDocument& trace);

/// Human-readable (markdown) rendering of a summary.
std::string format_summary(const TraceSummary& summary,
                           const std::string& title);

}  // namespace skillmon
