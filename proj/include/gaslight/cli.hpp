#pragma once
// Command-line front door. Two subcommands over the same engine:
//
//   gaslight run      — clear one policy, write per-run reports
//   gaslight compare  — run the experiment grid, write the comparison matrix
//
// Exit codes follow common CLI conventions:
//   0 success, 2 infeasible, 3 gap limit reached,
//   64 bad flags (usage printed), 66 input-file errors.
//
// The main() in tools/ forwards here; tests drive cli_main in-process.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace gaslight {

// Written as `manifest` alongside every output set: enough to re-issue the
// exact run. Re-running the recorded command with the same engine, solver
// and gap reproduces the reports byte-for-byte except the timestamp line.
struct RunManifest {
  std::string command;                  // the invocation, flags included
  std::string system;                   // system fixture path as given
  std::string scenarios;                // scenario fixture path as given
  std::string policy;                   // policy tag, or grid tag for compare
  std::vector<std::pair<std::string, std::string>> overrides;  // effective config
  std::string out_dir;
  std::string timestamp;                // UTC, ISO 8601
  std::string engine;                   // name + version
};

void write_manifest(const std::string& path, const RunManifest& m);

// Full argv (argv[0] = program name). Writes human output to `out`,
// diagnostics to `err`; returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gaslight
