#include <benchmark/benchmark.h>

#include <string>

#include "skillmon/ability_graph.hpp"
#include "skillmon/json_io.hpp"
#include "skillmon/metrics.hpp"
#include "skillmon/requirements.hpp"
#include "skillmon/simulation.hpp"

namespace {

using namespace skillmon;

const std::string kDataDir = SKILLMON_DATA_DIR;

struct Model {
  SkillGraph graph = load_skill_graph(kDataDir + "/follow_mode.json");
  MetricRegistry metrics = load_metrics(kDataDir + "/metrics.json");
  std::map<std::string, AbilityBinding> bindings =
      load_bindings(kDataDir + "/bindings.json");
};

const Model& model() {
  static Model m;
  return m;
}

void BM_EvaluateAtomic(benchmark::State& state) {
  AtomicMetric metric;
  metric.id = "sso";
  metric.spec.kind = MetricKind::SteadyStateOffset;
  metric.spec.threshold = 0.28;
  metric.spec.unit = "m";
  double m = 0.0;
  for (auto _ : state) {
    m += 1e-9;
    benchmark::DoNotOptimize(evaluate_atomic(metric, {m, "m"}));
  }
}
BENCHMARK(BM_EvaluateAtomic);

void BM_TopologicalOrder(benchmark::State& state) {
  const SkillGraph& graph = model().graph;
  for (auto _ : state) {
    benchmark::DoNotOptimize(graph.topological_order());
  }
}
BENCHMARK(BM_TopologicalOrder);

void BM_Propagate(benchmark::State& state) {
  const Model& m = model();
  AbilityGraph ag = AbilityGraph::instantiate(m.graph, m.bindings, m.metrics);
  double t = 0.0;
  ag.ingest(SignalSample{"m_lane_distance", "afa_logic", 0.5, "m", t});
  ag.ingest(SignalSample{"m_lane_variance", "pose_estimator", 0.0004, "m2", t});
  ag.ingest(SignalSample{"m_lane_valid", "pose_estimator", 1.0, "bool", t});
  ag.ingest(SignalSample{"m_lane_valid", "marking_detector", 1.0, "bool", t});
  ag.ingest(SignalSample{"m_lateral_offset", "lateral_controller", 0.02, "m", t});
  ag.ingest(SignalSample{"m_steering_angle", "steering_ecu", 0.4, "deg", t});
  ag.ingest(SignalSample{"m_camera_ok", "front_camera", 1.0, "bool", t});
  for (auto _ : state) {
    ag.propagate();
    benchmark::DoNotOptimize(ag.level("follow_mode"));
  }
}
BENCHMARK(BM_Propagate);

void BM_AssessCycle(benchmark::State& state) {
  const Model& m = model();
  AbilityGraph ag = AbilityGraph::instantiate(m.graph, m.bindings, m.metrics);
  StatusThresholds thresholds;
  double t = 0.0;
  for (auto _ : state) {
    t += 0.1;
    ag.ingest(SignalSample{"m_lane_distance", "afa_logic", 0.5, "m", t});
    ag.ingest(SignalSample{"m_steering_angle", "steering_ecu", 0.4, "deg", t});
    ag.ingest(SignalSample{"m_camera_ok", "front_camera", 1.0, "bool", t});
    ag.propagate();
    benchmark::DoNotOptimize(ag.assess(thresholds));
  }
}
BENCHMARK(BM_AssessCycle);

void BM_RunScenarioDropout(benchmark::State& state) {
  const Scenario scenario =
      load_scenario(kDataDir + "/scenarios/dropout.json");
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(scenario));
  }
}
BENCHMARK(BM_RunScenarioDropout)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
