#include "skillmon/requirements.hpp"

#include <cmath>

namespace skillmon {

const char* to_string(Asil asil) noexcept {
  switch (asil) {
    case Asil::QM: return "QM";
    case Asil::A: return "A";
    case Asil::B: return "B";
    case Asil::C: return "C";
    case Asil::D: return "D";
  }
  return "?";
}

const char* to_string(Severity s) noexcept {
  switch (s) {
    case Severity::S0: return "S0";
    case Severity::S1: return "S1";
    case Severity::S2: return "S2";
    case Severity::S3: return "S3";
  }
  return "?";
}

const char* to_string(Exposure e) noexcept {
  switch (e) {
    case Exposure::E0: return "E0";
    case Exposure::E1: return "E1";
    case Exposure::E2: return "E2";
    case Exposure::E3: return "E3";
    case Exposure::E4: return "E4";
  }
  return "?";
}

const char* to_string(Controllability c) noexcept {
  switch (c) {
    case Controllability::C0: return "C0";
    case Controllability::C1: return "C1";
    case Controllability::C2: return "C2";
    case Controllability::C3: return "C3";
  }
  return "?";
}

namespace {

template <typename T>
T parse_enum(const std::string& token, std::initializer_list<T> values,
             const char* what) {
  for (T v : values) {
    if (token == to_string(v)) return v;
  }
  throw Error(Errc::ParseError,
              std::string("unknown ") + what + " '" + token + "'");
}

}  // namespace

Asil parse_asil(const std::string& token) {
  return parse_enum(token, {Asil::QM, Asil::A, Asil::B, Asil::C, Asil::D},
                    "ASIL");
}

Severity parse_severity(const std::string& token) {
  return parse_enum(
      token, {Severity::S0, Severity::S1, Severity::S2, Severity::S3},
      "severity");
}

Exposure parse_exposure(const std::string& token) {
  return parse_enum(token,
                    {Exposure::E0, Exposure::E1, Exposure::E2, Exposure::E3,
                     Exposure::E4},
                    "exposure");
}

Controllability parse_controllability(const std::string& token) {
  return parse_enum(token,
                    {Controllability::C0, Controllability::C1,
                     Controllability::C2, Controllability::C3},
                    "controllability");
}

namespace {

std::size_t triple_index(const SecTriple& sec) {
  const auto s = static_cast<std::size_t>(sec.severity);
  const auto e = static_cast<std::size_t>(sec.exposure);
  const auto c = static_cast<std::size_t>(sec.controllability);
  return (s * 5 + e) * 4 + c;
}

}  // namespace

AsilTable::AsilTable(const std::vector<std::pair<SecTriple, Asil>>& rows) {
  std::array<bool, kTripleCount> seen{};
  for (const auto& [sec, asil] : rows) {
    const std::size_t idx = triple_index(sec);
    if (seen[idx]) {
      throw Error(Errc::ConfigError,
                  std::string("duplicate ASIL table row for (") +
                      to_string(sec.severity) + ", " + to_string(sec.exposure) +
                      ", " + to_string(sec.controllability) + ")");
    }
    const bool any_zero = sec.severity == Severity::S0 ||
                          sec.exposure == Exposure::E0 ||
                          sec.controllability == Controllability::C0;
    if (any_zero && asil != Asil::QM) {
      throw Error(Errc::ConfigError,
                  std::string("ASIL table assigns ") + to_string(asil) +
                      " to a level-0 triple; must be QM");
    }
    seen[idx] = true;
    table_[idx] = asil;
  }
  for (std::size_t i = 0; i < kTripleCount; ++i) {
    if (!seen[i]) {
      throw Error(Errc::ConfigError,
                  "ASIL table does not cover all 80 S/E/C triples");
    }
  }
}

Asil AsilTable::classify(const SecTriple& sec) const {
  return table_[triple_index(sec)];
}

Asil asil_classify(const SecTriple& sec, const AsilTable& table) {
  return table.classify(sec);
}

const char* to_string(RequirementKind kind) noexcept {
  switch (kind) {
    case RequirementKind::MaxLimit: return "max_limit";
    case RequirementKind::MinDistance: return "min_distance";
    case RequirementKind::MaxOvershoot: return "max_overshoot";
    case RequirementKind::Range: return "range";
  }
  return "?";
}

RequirementKind parse_requirement_kind(const std::string& token) {
  return parse_enum(token,
                    {RequirementKind::MaxLimit, RequirementKind::MinDistance,
                     RequirementKind::MaxOvershoot, RequirementKind::Range},
                    "requirement kind");
}

void Requirement::check() const {
  if (id.empty()) throw Error(Errc::ConfigError, "requirement id is empty");
  if (unit.empty()) {
    throw Error(Errc::ConfigError, "requirement '" + id + "' has empty unit");
  }
  if (kind == RequirementKind::Range) {
    if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
      throw Error(Errc::ConfigError,
                  "requirement '" + id + "' needs finite lower < upper");
    }
  } else if (!std::isfinite(threshold)) {
    throw Error(Errc::ConfigError,
                "requirement '" + id + "' has non-finite threshold");
  }
}

void attach_requirement(SkillGraph& graph, const std::string& from,
                        const std::string& to,
                        const Requirement& requirement) {
  requirement.check();
  graph.attach_requirement(from, to, requirement.id);
}

MetricSpec derive_metric_template(const Requirement& requirement) {
  requirement.check();
  MetricSpec spec;
  spec.unit = requirement.unit;
  switch (requirement.kind) {
    case RequirementKind::MaxLimit:
      spec.kind = MetricKind::MaxLimit;
      spec.threshold = requirement.threshold;
      break;
    case RequirementKind::MaxOvershoot:
      spec.kind = MetricKind::MaxOvershoot;
      spec.threshold = requirement.threshold;
      break;
    case RequirementKind::MinDistance:
      spec.kind = MetricKind::MinDistance;
      spec.threshold = requirement.threshold;
      break;
    case RequirementKind::Range:
      spec.kind = MetricKind::Range;
      spec.lower = requirement.lower;
      spec.upper = requirement.upper;
      break;
  }
  spec.check();
  return spec;
}

}  // namespace skillmon
