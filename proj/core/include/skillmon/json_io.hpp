#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "skillmon/ability_graph.hpp"
#include "skillmon/metrics.hpp"
#include "skillmon/requirements.hpp"
#include "skillmon/simulation.hpp"
#include "skillmon/skill_graph.hpp"

namespace skillmon {

// All loaders are strict: unknown fields, missing required fields, and wrong
// types raise ParseError; files that cannot be read raise IoError; readable,
// well-formed documents with inconsistent values raise ConfigError.

std::string read_text_file(const std::filesystem::path& path);

SkillGraph parse_skill_graph(const std::string& json_text);
SkillGraph load_skill_graph(const std::filesystem::path& path);

RequirementSet parse_requirements(const std::string& json_text);
RequirementSet load_requirements(const std::filesystem::path& path);

AsilTable parse_asil_table(const std::string& json_text);
AsilTable load_asil_table(const std::filesystem::path& path);

MetricRegistry parse_metrics(const std::string& json_text);
MetricRegistry load_metrics(const std::filesystem::path& path);

std::map<std::string, AbilityBinding> parse_bindings(
    const std::string& json_text);
std::map<std::string, AbilityBinding> load_bindings(
    const std::filesystem::path& path);

/// Builds a scenario from the five source documents (already read).
Scenario parse_scenario(const std::string& scenario_text,
                        const std::string& graph_text,
                        const std::string& requirements_text,
                        const std::string& metrics_text,
                        const std::string& bindings_text);

/// Reads a scenario file and the graph/requirements/metrics/bindings files it
/// references (paths resolved relative to the scenario file's directory).
/// Overrides are patched into the document before parsing so that they end up
/// in trace headers.
Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = {},
                       const std::optional<std::string>& policy_override = {});

/// Rewrites seed and/or degraded policy inside a scenario document.
std::string patch_scenario_overrides(
    const std::string& scenario_text, std::optional<std::uint64_t> seed,
    const std::optional<std::string>& degraded_policy);

}  // namespace skillmon
