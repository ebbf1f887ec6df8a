#pragma once

#include <string>

#include "seqeq/task.hpp"

namespace seqeq {

/// Exit code for a verdict: 0 EQUIVALENT, 1 NOT_EQUIVALENT, 2 otherwise.
int exit_code(Status status);

struct ReportContext {
  std::string mode;  // "sec", "cec", "xcheck"
  EngineConfig engine;
  std::string trace_path;  // where the trace was written, if anywhere
};

/// Machine-readable report. Stable top-level fields: status, method, k,
/// bmc_depth, mismatch_cycle, mismatch_output, hardest_output, helpers_used,
/// outputs, cases, notes, conflicts, seconds, budgets, trace, trace_path.
std::string report_json(const Verdict& verdict, const ReportContext& context);
/// Human summary: one status line, then a per-output table.
std::string report_text(const Verdict& verdict, const ReportContext& context);
/// One-line status, e.g. "EQUIVALENT (k=3)".
std::string status_line(const Verdict& verdict);
/// Status field of a JSON report. Throws ConfigError on malformed input.
Status report_status(const std::string& json_text);
/// "name,status,method,k,bmc_depth,conflicts,seconds" row for runtime tables.
std::string report_csv_row(const std::string& name, const std::string& json_text);
std::string report_csv_header();

}  // namespace seqeq
