#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "skillmon/json_io.hpp"
#include "skillmon/simulation.hpp"
#include "skillmon/trace.hpp"

using namespace skillmon;

namespace {

RunTrace shipped_run(const std::string& name) {
  return run_scenario(
      load_scenario(std::string(SKILLMON_DATA_DIR) + "/scenarios/" + name));
}

}  // namespace

TEST_CASE("traces round-trip through serialization") {
  const RunTrace trace = shipped_run("dropout.json");
  const std::string text = serialize_trace(trace);
  const TraceDocument doc = parse_trace(text);

  REQUIRE(doc.steps.size() == trace.steps.size());
  CHECK(doc.mode_changes.size() == trace.mode_changes.size());
  for (std::size_t k = 0; k < doc.steps.size(); ++k) {
    CHECK(doc.steps[k].t == trace.steps[k].t);
    CHECK(doc.steps[k].y == trace.steps[k].y);
    CHECK(doc.steps[k].v == trace.steps[k].v);
    CHECK(doc.steps[k].delta == trace.steps[k].delta);
    CHECK(doc.steps[k].valid == trace.steps[k].valid);
    CHECK(doc.steps[k].distance.has_value() ==
          trace.steps[k].distance.has_value());
    if (doc.steps[k].distance) {
      CHECK(*doc.steps[k].distance == *trace.steps[k].distance);
    }
    CHECK(doc.steps[k].levels == trace.steps[k].levels);
    CHECK(doc.steps[k].status == trace.steps[k].status);
    CHECK(doc.steps[k].mode == trace.steps[k].mode);
  }
  CHECK(doc.scenario.dt == doctest::Approx(0.1));
  CHECK(doc.scenario.monitor.initial_mode == OperatingMode::Follow);
}

TEST_CASE("replay confirms untouched traces and flags tampered levels") {
  for (const char* name :
       {"nominal.json", "fault_gainzero.json", "dropout.json"}) {
    CAPTURE(name);
    const RunTrace trace = shipped_run(name);
    TraceDocument doc = parse_trace(serialize_trace(trace));
    CHECK(replay(doc).ok);

    // tamper with one recorded level
    TraceDocument tampered = std::move(doc);
    auto& levels = tampered.steps[tampered.steps.size() / 2].levels;
    levels.begin()->second += 1e-6;
    const ReplayResult result = replay(tampered);
    CHECK_FALSE(result.ok);
    REQUIRE(!result.mismatches.empty());
    CHECK(result.mismatches.front().step == tampered.steps.size() / 2);
  }
}

TEST_CASE("replay flags tampered statuses and modes") {
  const RunTrace trace = shipped_run("dropout.json");

  TraceDocument doc = parse_trace(serialize_trace(trace));
  doc.steps.back().status["follow_mode"] = MonitorStatus::Ok;
  CHECK_FALSE(replay(doc).ok);

  TraceDocument doc2 = parse_trace(serialize_trace(trace));
  doc2.steps.back().mode = OperatingMode::Follow;
  CHECK_FALSE(replay(doc2).ok);
}

TEST_CASE("trace parser rejects malformed inputs") {
  CHECK_THROWS_AS(parse_trace(""), Error);
  CHECK_THROWS_AS(parse_trace("{\"t\":0}\n"), Error);  // record before header
  const RunTrace trace = shipped_run("dropout.json");
  std::string text = serialize_trace(trace);
  CHECK_THROWS_AS(parse_trace(text + "not json\n"), Error);
}

TEST_CASE("summarize reports extremes, timeline, and per-node statistics") {
  const RunTrace trace = shipped_run("fault_gainzero.json");
  const TraceDocument doc = parse_trace(serialize_trace(trace));
  const TraceSummary summary = summarize(doc);

  CHECK(summary.step_count == 400);
  CHECK(summary.min_distance_sample <= 0.28);
  CHECK(summary.max_abs_delta_deg <= 3.0 + 1e-12);
  CHECK(summary.final_status == MonitorStatus::Failed);
  CHECK(summary.final_speed == 0.0);
  REQUIRE(summary.mode_timeline.size() == 2);
  CHECK(summary.mode_timeline.front().mode == OperatingMode::Follow);
  CHECK(summary.mode_timeline.back().mode == OperatingMode::SafeHalt);
  CHECK(summary.nodes.at("follow_mode").failed > 0);
  CHECK(summary.nodes.at("camera").min_level == 1.0);

  const std::string text = format_summary(summary, "fault");
  CHECK(text.find("safe_halt") != std::string::npos);
  CHECK(text.find("follow_mode") != std::string::npos);
}

TEST_CASE("recorded golden trace stays reproducible") {
  // The fixture was produced by the nominal scenario; physical quantities are
  // compared with a small tolerance (libm differences across platforms),
  // discrete fields exactly.
  const TraceDocument golden = read_trace(
      std::string(SKILLMON_FIXTURES_DIR) + "/nominal_golden.jsonl");
  const RunTrace current = shipped_run("nominal.json");

  REQUIRE(golden.steps.size() == current.steps.size());
  for (std::size_t k = 0; k < golden.steps.size(); ++k) {
    CAPTURE(k);
    const StepRecord& g = golden.steps[k];
    const StepRecord& c = current.steps[k];
    CHECK(std::abs(g.y - c.y) <= 1e-9);
    CHECK(std::abs(g.psi - c.psi) <= 1e-9);
    CHECK(std::abs(g.v - c.v) <= 1e-9);
    CHECK(std::abs(g.delta - c.delta) <= 1e-9);
    CHECK(g.valid == c.valid);
    REQUIRE(g.distance.has_value() == c.distance.has_value());
    if (g.distance) CHECK(std::abs(*g.distance - *c.distance) <= 1e-9);
    CHECK(g.mode == c.mode);
    CHECK(g.status == c.status);
    REQUIRE(g.levels.size() == c.levels.size());
    for (const auto& [node, level] : g.levels) {
      CHECK(std::abs(level - c.levels.at(node)) <= 1e-9);
    }
  }

  // and the golden file still replays cleanly
  CHECK(replay(golden).ok);
}
