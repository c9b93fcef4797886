#pragma once

#include <filesystem>
#include <string>

#include "shrinkbench/bench.hpp"

namespace shrinkbench {

struct EmitOptions {
  bool no_timestamp = false;  // keeps report.md byte-identical across runs
};

// The machine-readable stability contract. Non-finite numbers serialize as
// null; parsing maps null back to NaN.
std::string report_to_json(const SensitivityReport& report);
SensitivityReport report_from_json(const std::string& text);

// NaN-tolerant deep equality (NaN == NaN for this purpose).
bool reports_equal(const SensitivityReport& a, const SensitivityReport& b);

// Writes trajectories.csv, summary.csv, report.md, report.json and one
// charts/<group>.svg per populated method family plus charts/all.svg. Every
// file embeds the config snapshot. Deterministic byte-for-byte given the same
// report (report.md additionally needs no_timestamp).
void emit_report(const SensitivityReport& report, const std::filesystem::path& out_dir,
                 const EmitOptions& options = {});

}  // namespace shrinkbench
