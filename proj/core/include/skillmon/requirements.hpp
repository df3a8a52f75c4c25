#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "skillmon/errors.hpp"
#include "skillmon/metrics.hpp"
#include "skillmon/skill_graph.hpp"

namespace skillmon {

enum class Asil { QM, A, B, C, D };
enum class Severity { S0, S1, S2, S3 };
enum class Exposure { E0, E1, E2, E3, E4 };
enum class Controllability { C0, C1, C2, C3 };

const char* to_string(Asil asil) noexcept;
const char* to_string(Severity s) noexcept;
const char* to_string(Exposure e) noexcept;
const char* to_string(Controllability c) noexcept;
Asil parse_asil(const std::string& token);
Severity parse_severity(const std::string& token);
Exposure parse_exposure(const std::string& token);
Controllability parse_controllability(const std::string& token);

struct SecTriple {
  Severity severity = Severity::S0;
  Exposure exposure = Exposure::E0;
  Controllability controllability = Controllability::C0;

  auto operator<=>(const SecTriple&) const = default;
};

/// The ASIL determination table, loaded from a JSON fixture so the mapping
/// stays reviewable as data. The fixture must cover all 80 S/E/C triples and
/// assign QM wherever severity, exposure, or controllability is at level 0.
class AsilTable {
 public:
  /// rows must cover every triple exactly once; throws ConfigError otherwise.
  explicit AsilTable(const std::vector<std::pair<SecTriple, Asil>>& rows);

  Asil classify(const SecTriple& sec) const;

  static constexpr std::size_t kTripleCount = 4 * 5 * 4;

 private:
  std::array<Asil, kTripleCount> table_{};
};

Asil asil_classify(const SecTriple& sec, const AsilTable& table);

struct SafetyGoal {
  std::string id;
  std::string text;
  Asil asil = Asil::QM;
  std::string hazardous_event;
};

enum class RequirementKind { MaxLimit, MinDistance, MaxOvershoot, Range };

const char* to_string(RequirementKind kind) noexcept;
RequirementKind parse_requirement_kind(const std::string& token);

/// A testable constraint derived from a safety goal.
struct Requirement {
  std::string id;
  std::string goal;  // SafetyGoal id
  RequirementKind kind = RequirementKind::MaxLimit;
  double threshold = 0.0;  // limit / minimum (unused for Range)
  double lower = 0.0;      // Range only
  double upper = 0.0;      // Range only
  std::string unit;
  std::string subject;  // quantity the requirement constrains

  void check() const;  // throws ConfigError
};

/// A requirement document: safety goals plus the requirements derived from
/// them. Operational limits (top speed, following distance) ride along as
/// free-form metadata for scenario tooling.
struct RequirementSet {
  std::map<std::string, SafetyGoal> goals;
  std::map<std::string, Requirement> requirements;
  std::map<std::string, double> limits;
};

/// Appends the requirement's id to the edge from -> to.
/// Throws UnknownEdge, DuplicateRequirementOnEdge, or ConfigError (bad
/// requirement fields). The rest of the graph is untouched.
void attach_requirement(SkillGraph& graph, const std::string& from,
                        const std::string& to, const Requirement& requirement);

/// Produces the monitoring-metric template for a requirement: same threshold,
/// bounds, and unit; the metric kind mirrors the requirement kind.
MetricSpec derive_metric_template(const Requirement& requirement);

}  // namespace skillmon
