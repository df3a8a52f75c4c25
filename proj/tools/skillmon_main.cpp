// skillmon - validate skill graphs, export DOT renderings, run the follow-mode
// monitoring simulation, replay recorded traces, and classify ASIL triples.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "skillmon/json_io.hpp"
#include "skillmon/requirements.hpp"
#include "skillmon/simulation.hpp"
#include "skillmon/skill_graph.hpp"
#include "skillmon/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;   // validation / assertion failures
constexpr int kExitBadInput = 2;  // I/O and parse errors

int exit_code_for(const skillmon::Error& error) {
  switch (error.code()) {
    case skillmon::Errc::IoError:
    case skillmon::Errc::ParseError:
      return kExitBadInput;
    default:
      return kExitFailure;
  }
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw skillmon::Error(skillmon::Errc::IoError,
                          "cannot write '" + out_path + "'");
  }
  out << text;
}

int run_validate(const std::string& graph_file) {
  const skillmon::SkillGraph graph = skillmon::load_skill_graph(graph_file);
  const auto violations = graph.validate();
  for (const auto& v : violations) {
    std::cout << to_string(v.kind) << ": " << v.message << "\n";
  }
  if (violations.empty()) {
    std::cout << "ok: " << graph.nodes().size() << " nodes, "
              << graph.edges().size() << " edges\n";
    return kExitOk;
  }
  return kExitFailure;
}

int run_export_dot(const std::string& graph_file, const std::string& out_path) {
  const skillmon::SkillGraph graph = skillmon::load_skill_graph(graph_file);
  write_output(graph.export_dot(), out_path);
  return kExitOk;
}

int run_simulate(const std::string& scenario_file, const std::string& out_path,
                 std::optional<std::uint64_t> seed,
                 std::optional<std::string> policy) {
  const skillmon::Scenario scenario =
      skillmon::load_scenario(scenario_file, seed, policy);
  const skillmon::RunTrace trace = skillmon::run_scenario(scenario);
  if (!out_path.empty()) {
    skillmon::write_trace(trace, out_path);
  }

  skillmon::TraceDocument doc;
  doc.scenario = skillmon::parse_scenario(
      trace.raw_scenario, trace.raw_graph, trace.raw_requirements,
      trace.raw_metrics, trace.raw_bindings);
  doc.steps = trace.steps;
  doc.mode_changes = trace.mode_changes;
  std::cout << skillmon::format_summary(skillmon::summarize(doc),
                                        scenario.name);
  return kExitOk;
}

int run_replay(const std::string& trace_file) {
  const skillmon::TraceDocument doc = skillmon::read_trace(trace_file);
  const skillmon::ReplayResult result = skillmon::replay(doc);
  if (result.ok) {
    std::cout << "replay ok: " << doc.steps.size() << " steps match\n";
    return kExitOk;
  }
  for (const auto& m : result.mismatches) {
    std::cout << "mismatch at step " << m.step << ": " << m.detail << "\n";
  }
  return kExitFailure;
}

int run_report(const std::string& trace_file, const std::string& out_path) {
  const skillmon::TraceDocument doc = skillmon::read_trace(trace_file);
  write_output(
      skillmon::format_summary(skillmon::summarize(doc), doc.scenario.name),
      out_path);
  return kExitOk;
}

int run_asil(const std::string& s, const std::string& e, const std::string& c,
             const std::string& table_path) {
  const skillmon::AsilTable table = skillmon::load_asil_table(table_path);
  skillmon::SecTriple sec;
  sec.severity = skillmon::parse_severity(s);
  sec.exposure = skillmon::parse_exposure(e);
  sec.controllability = skillmon::parse_controllability(c);
  std::cout << to_string(skillmon::asil_classify(sec, table)) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skill/ability graph monitoring toolkit"};
  app.require_subcommand(1);

  std::string graph_file;
  std::string scenario_file;
  std::string trace_file;
  std::string out_path;
  std::string table_path = "data/asil_table.json";
  std::string severity, exposure, controllability;
  std::uint64_t seed_value = 0;
  std::string policy_value;

  auto* validate = app.add_subcommand("validate", "Check a skill graph file");
  validate->add_option("graph,--graph", graph_file, "skill graph JSON file")
      ->required();

  auto* export_dot =
      app.add_subcommand("export-dot", "Render a skill graph as DOT");
  export_dot->add_option("graph,--graph", graph_file, "skill graph JSON file")
      ->required();
  export_dot->add_option("--out", out_path, "output file (default stdout)");

  auto* simulate =
      app.add_subcommand("simulate", "Run a closed-loop scenario");
  simulate
      ->add_option("scenario,--scenario", scenario_file, "scenario JSON file")
      ->required();
  simulate->add_option("--out", out_path, "trace output file (JSON lines)");
  auto* seed_opt =
      simulate->add_option("--seed", seed_value, "override the scenario seed");
  auto* policy_opt = simulate->add_option(
      "--degraded-policy", policy_value,
      "override the degraded policy (fallback|continue)");

  auto* replay = app.add_subcommand(
      "replay", "Re-run monitoring over a recorded trace and compare");
  replay->add_option("trace", trace_file, "trace file (JSON lines)")
      ->required();

  auto* report =
      app.add_subcommand("report", "Summarize a recorded trace");
  report->add_option("trace", trace_file, "trace file (JSON lines)")
      ->required();
  report->add_option("--out", out_path, "output file (default stdout)");

  auto* asil = app.add_subcommand(
      "asil", "Classify a severity/exposure/controllability triple");
  asil->add_option("severity", severity, "S0..S3")->required();
  asil->add_option("exposure", exposure, "E0..E4")->required();
  asil->add_option("controllability", controllability, "C0..C3")->required();
  asil->add_option("--table", table_path,
                   "ASIL determination table (JSON fixture)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (validate->parsed()) return run_validate(graph_file);
    if (export_dot->parsed()) return run_export_dot(graph_file, out_path);
    if (simulate->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      std::optional<std::string> policy;
      if (policy_opt->count() > 0) policy = policy_value;
      return run_simulate(scenario_file, out_path, seed, policy);
    }
    if (replay->parsed()) return run_replay(trace_file);
    if (report->parsed()) return run_report(trace_file, out_path);
    if (asil->parsed()) {
      return run_asil(severity, exposure, controllability, table_path);
    }
  } catch (const skillmon::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitBadInput;
}
