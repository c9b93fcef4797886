#pragma once

#include <string>
#include <vector>

namespace shrinkbench {

// Command line driver. Subcommands: ingest, synth, select, bench, report.
// Returns 0 on success, 1 on usage errors, 2 on data errors.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace shrinkbench
