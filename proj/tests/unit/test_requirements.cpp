#include <string>
#include <vector>

#include "doctest.h"
#include "skillmon/json_io.hpp"
#include "skillmon/requirements.hpp"

using namespace skillmon;

namespace {

AsilTable shipped_table() {
  return load_asil_table(std::string(SKILLMON_DATA_DIR) + "/asil_table.json");
}

// Independent route to the determination table: within nonzero levels the
// table is additive in the S/E/C indices (QM up to 6, then A..D).
Asil additive_oracle(Severity s, Exposure e, Controllability c) {
  const int si = static_cast<int>(s);
  const int ei = static_cast<int>(e);
  const int ci = static_cast<int>(c);
  if (si == 0 || ei == 0 || ci == 0) return Asil::QM;
  switch (si + ei + ci) {
    case 7: return Asil::A;
    case 8: return Asil::B;
    case 9: return Asil::C;
    case 10: return Asil::D;
    default: return Asil::QM;
  }
}

}  // namespace

TEST_CASE("asil_classify reproduces the documented hazard classifications") {
  const AsilTable table = shipped_table();
  CHECK(asil_classify({Severity::S3, Exposure::E4, Controllability::C3},
                      table) == Asil::D);
  CHECK(asil_classify({Severity::S3, Exposure::E4, Controllability::C1},
                      table) == Asil::B);
}

TEST_CASE("asil_classify matches the transcribed table on all 80 triples") {
  const AsilTable table = shipped_table();
  int checked = 0;
  for (int s = 0; s < 4; ++s) {
    for (int e = 0; e < 5; ++e) {
      for (int c = 0; c < 4; ++c) {
        const SecTriple sec{static_cast<Severity>(s), static_cast<Exposure>(e),
                            static_cast<Controllability>(c)};
        CHECK(table.classify(sec) ==
              additive_oracle(sec.severity, sec.exposure, sec.controllability));
        ++checked;
      }
    }
  }
  CHECK(checked == 80);
}

TEST_CASE("asil_classify is monotone in each dimension") {
  const AsilTable table = shipped_table();
  auto leq = [](Asil a, Asil b) {
    return static_cast<int>(a) <= static_cast<int>(b);
  };
  for (int s = 1; s < 4; ++s) {
    for (int e = 1; e < 5; ++e) {
      for (int c = 1; c < 4; ++c) {
        const Asil base = table.classify({static_cast<Severity>(s),
                                          static_cast<Exposure>(e),
                                          static_cast<Controllability>(c)});
        if (s < 3) {
          CHECK(leq(base, table.classify({static_cast<Severity>(s + 1),
                                          static_cast<Exposure>(e),
                                          static_cast<Controllability>(c)})));
        }
        if (e < 4) {
          CHECK(leq(base, table.classify({static_cast<Severity>(s),
                                          static_cast<Exposure>(e + 1),
                                          static_cast<Controllability>(c)})));
        }
        if (c < 3) {
          CHECK(leq(base, table.classify({static_cast<Severity>(s),
                                          static_cast<Exposure>(e),
                                          static_cast<Controllability>(c + 1)})));
        }
      }
    }
  }
}

TEST_CASE("AsilTable rejects incomplete or inconsistent fixtures") {
  CHECK_THROWS_AS(parse_asil_table("[]"), Error);
  CHECK_THROWS_AS(
      parse_asil_table(R"([{"severity":"S0","exposure":"E0",
        "controllability":"C0","asil":"A"}])"),
      Error);  // level-0 triple must be QM
}

TEST_CASE("attach_requirement appends to the edge and nothing else") {
  SkillGraph graph =
      load_skill_graph(std::string(SKILLMON_DATA_DIR) + "/follow_mode.json");
  const RequirementSet reqs =
      load_requirements(std::string(SKILLMON_DATA_DIR) + "/afas_goals.json");
  const auto nodes_before = graph.nodes();
  const auto edges_before = graph.edges();

  Requirement extra = reqs.requirements.at("r_min_lane_distance");
  extra.id = "r_min_lane_distance_check";
  attach_requirement(graph, "follow_mode", "follow_hard_shoulder", extra);

  const SkillEdge* edge = graph.find_edge("follow_mode", "follow_hard_shoulder");
  REQUIRE(edge != nullptr);
  CHECK(edge->requirements.back() == "r_min_lane_distance_check");

  // every other node and edge is structurally unchanged
  CHECK(graph.nodes().size() == nodes_before.size());
  for (std::size_t i = 0; i < nodes_before.size(); ++i) {
    CHECK(graph.nodes()[i].id == nodes_before[i].id);
    CHECK(graph.nodes()[i].category == nodes_before[i].category);
  }
  for (std::size_t i = 0; i < edges_before.size(); ++i) {
    CHECK(graph.edges()[i].from == edges_before[i].from);
    CHECK(graph.edges()[i].to == edges_before[i].to);
    if (!(edges_before[i].from == "follow_mode" &&
          edges_before[i].to == "follow_hard_shoulder")) {
      CHECK(graph.edges()[i].requirements == edges_before[i].requirements);
    }
  }
}

TEST_CASE("attach_requirement error paths") {
  SkillGraph graph =
      load_skill_graph(std::string(SKILLMON_DATA_DIR) + "/follow_mode.json");
  const RequirementSet reqs =
      load_requirements(std::string(SKILLMON_DATA_DIR) + "/afas_goals.json");
  const Requirement& overshoot = reqs.requirements.at("r_max_overshoot");

  try {
    attach_requirement(graph, "follow_mode", "camera", overshoot);
    FAIL("expected UnknownEdge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownEdge);
  }

  // the shipped graph already carries r_max_overshoot on this edge
  try {
    attach_requirement(graph, "plan_lateral_guidance", "control_lateral_dynamics",
                       overshoot);
    FAIL("expected DuplicateRequirementOnEdge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DuplicateRequirementOnEdge);
  }
}

TEST_CASE("derive_metric_template preserves thresholds and units") {
  Requirement min_distance;
  min_distance.id = "r1";
  min_distance.goal = "g";
  min_distance.kind = RequirementKind::MinDistance;
  min_distance.threshold = 0.28;
  min_distance.unit = "m";
  min_distance.subject = "distance to left lane marking";
  MetricSpec spec = derive_metric_template(min_distance);
  CHECK(spec.kind == MetricKind::MinDistance);
  CHECK(spec.threshold == 0.28);
  CHECK(spec.unit == "m");

  Requirement limit;
  limit.id = "r2";
  limit.goal = "g";
  limit.kind = RequirementKind::MaxLimit;
  limit.threshold = 3.0;
  limit.unit = "deg";
  limit.subject = "steering left lock";
  spec = derive_metric_template(limit);
  CHECK(spec.kind == MetricKind::MaxLimit);
  CHECK(spec.threshold == 3.0);
  CHECK(spec.unit == "deg");

  Requirement range;
  range.id = "r3";
  range.goal = "g";
  range.kind = RequirementKind::Range;
  range.lower = 0.0;
  range.upper = 1.0;
  range.unit = "ratio";
  range.subject = "variance ratio";
  spec = derive_metric_template(range);
  CHECK(spec.kind == MetricKind::Range);
  CHECK(spec.lower == 0.0);
  CHECK(spec.upper == 1.0);
  CHECK(spec.unit == "ratio");

  // deterministic: equal inputs give equal templates
  const MetricSpec again = derive_metric_template(range);
  CHECK(again.kind == spec.kind);
  CHECK(again.lower == spec.lower);
  CHECK(again.upper == spec.upper);
  CHECK(again.unit == spec.unit);
}

TEST_CASE("requirement documents cross-check goal references") {
  CHECK_THROWS_AS(parse_requirements(R"({
    "goals": [],
    "requirements": [{"id":"r","goal":"missing","kind":"max_limit",
                      "threshold":1.0,"unit":"m","subject":"x"}]
  })"),
                  Error);
}
