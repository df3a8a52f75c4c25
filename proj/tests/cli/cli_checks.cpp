// Exit-code contract checks for the command-line tool:
//   0 success, 1 validation/assert failure, 2 I/O or parse error.
//
// usage: cli_checks <cli-path> <scratch-dir>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kDataDir = SKILLMON_DATA_DIR;
std::string g_cli;
fs::path g_scratch;
int g_failures = 0;

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  const fs::path out_file = g_scratch / "cli_stdout.txt";
  const std::string command =
      g_cli + " " + args + " > " + out_file.string() + " 2>/dev/null";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = status < 0 ? -1 : WEXITSTATUS(status);
  std::ifstream in(out_file);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  result.stdout_text = buffer.str();
  return result;
}

void expect(bool ok, const std::string& what) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
  if (!ok) ++g_failures;
}

std::string write_file(const std::string& name, const std::string& content) {
  const fs::path path = g_scratch / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: cli_checks <cli-path> <scratch-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_scratch = argv[2];
  fs::create_directories(g_scratch);

  // validate
  expect(run("validate " + kDataDir + "/follow_mode.json").exit_code == 0,
         "validate on the shipped graph exits 0");
  const std::string two_mains = write_file("two_mains.json", R"({
    "maneuver": "x",
    "nodes": [
      {"id": "a", "name": "a", "category": "main"},
      {"id": "b", "name": "b", "category": "main"}
    ],
    "edges": [{"from": "a", "to": "b"}]
  })");
  const RunResult invalid = run("validate " + two_mains);
  expect(invalid.exit_code == 1, "validate on an invalid graph exits 1");
  expect(invalid.stdout_text.find("MultipleMainNodes") != std::string::npos,
         "validate names the violated rule");
  expect(run("validate " + (g_scratch / "missing.json").string()).exit_code == 2,
         "validate on a missing file exits 2");
  const std::string garbage = write_file("garbage.json", "{not json");
  expect(run("validate " + garbage).exit_code == 2,
         "validate on malformed JSON exits 2");

  // export-dot
  const std::string dot_out = (g_scratch / "graph.dot").string();
  expect(run("export-dot " + kDataDir + "/follow_mode.json --out " + dot_out)
                 .exit_code == 0 &&
             fs::file_size(dot_out) > 0,
         "export-dot writes a DOT file");
  expect(run("export-dot " + two_mains).exit_code == 1,
         "export-dot on an invalid graph exits 1");

  // asil
  const std::string table = kDataDir + "/asil_table.json";
  const RunResult asil_d = run("asil S3 E4 C3 --table " + table);
  expect(asil_d.exit_code == 0 && asil_d.stdout_text == "D\n",
         "asil S3 E4 C3 prints D");
  const RunResult asil_b = run("asil S3 E4 C1 --table " + table);
  expect(asil_b.exit_code == 0 && asil_b.stdout_text == "B\n",
         "asil S3 E4 C1 prints B");
  expect(run("asil S9 E4 C1 --table " + table).exit_code == 2,
         "asil with a bad enum token exits 2");

  // simulate + replay + report
  const std::string trace = (g_scratch / "nominal.jsonl").string();
  expect(run("simulate " + kDataDir + "/scenarios/nominal.json --out " + trace)
                 .exit_code == 0,
         "simulate writes a trace and exits 0");
  expect(run("replay " + trace).exit_code == 0, "replay on own output exits 0");
  const std::string report_out = (g_scratch / "report.md").string();
  const RunResult report = run("report " + trace + " --out " + report_out);
  expect(report.exit_code == 0 && fs::file_size(report_out) > 0,
         "report writes a summary");
  expect(run("replay " + garbage).exit_code == 2,
         "replay on malformed input exits 2");
  expect(run("simulate " + (g_scratch / "none.json").string()).exit_code == 2,
         "simulate on a missing scenario exits 2");

  // seed override changes the trace, same seed twice does not
  const std::string seeded_a = (g_scratch / "seed_a.jsonl").string();
  const std::string seeded_b = (g_scratch / "seed_b.jsonl").string();
  run("simulate " + kDataDir + "/scenarios/nominal.json --seed 7 --out " +
      seeded_a);
  run("simulate " + kDataDir + "/scenarios/nominal.json --seed 7 --out " +
      seeded_b);
  std::ifstream fa(seeded_a), fb(seeded_b), ft(trace);
  std::stringstream sa, sb, st;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  st << ft.rdbuf();
  expect(sa.str() == sb.str(), "same seed override gives identical traces");
  expect(sa.str() != st.str(), "different seed gives a different trace");
  expect(run("replay " + seeded_a).exit_code == 0,
         "replay works with an overridden seed");

  // degraded-policy override lands in the trace header and replays cleanly
  const std::string tolerant = (g_scratch / "tolerant.jsonl").string();
  expect(run("simulate " + kDataDir +
             "/scenarios/dropout.json --degraded-policy continue --out " +
             tolerant)
                 .exit_code == 0,
         "simulate accepts --degraded-policy");
  expect(run("replay " + tolerant).exit_code == 0,
         "replay works with an overridden policy");
  {
    std::ifstream in(tolerant);
    std::string header;
    std::getline(in, header);
    expect(header.find("\"degraded_policy\":\"continue\"") != std::string::npos,
           "policy override is recorded in the trace header");
  }
  expect(run("simulate " + kDataDir +
             "/scenarios/dropout.json --degraded-policy sideways")
                 .exit_code == 2,
         "bad policy token exits 2");

  // unknown flags / commands are parse errors
  expect(run("frobnicate").exit_code == 2, "unknown subcommand exits 2");

  std::cout << (g_failures == 0 ? "all cli checks passed"
                                : std::to_string(g_failures) + " checks failed")
            << "\n";
  return g_failures == 0 ? 0 : 1;
}
