#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "seqeq/snl.hpp"
#include "seqeq/task.hpp"
#include "seqeq/xcheck.hpp"

namespace seqeq {

/// One side of a task: source file, top module, parameter overrides, X policy.
struct DesignConfig {
  std::filesystem::path file;
  std::string source;  // used instead of `file` when non-empty
  std::string top;
  std::map<std::string, int64_t> params;
  snl::XPolicy xpolicy;
  std::vector<std::string> blackbox;  // instance prefixes
};

enum class TaskMode { Cec, Sec, XCheck };
const char* to_string(TaskMode mode);

struct LatencyPair {
  int spec = 0;
  int imp = 0;
};

struct MappingConfig {
  bool by_name = true;
  bool by_signature = false;
  std::vector<std::string> rename;
  std::vector<NetPair> inputs;
  std::vector<NetPair> outputs;
  std::vector<NetPair> registers;  // CANDIDATE
  std::vector<NetPair> assume;     // ASSUMED
  std::optional<LatencyPair> latency;
  std::map<std::string, LatencyPair> output_latency;
  std::string qualifier;
};

struct ReportConfig {
  std::filesystem::path trace;
  std::filesystem::path path;
  std::string format = "text";  // text | json
};

/// Parsed task file. Sections and keys:
///   [spec] / [imp]   file, top, xpolicy, uninit, xvalue, allow_undriven, param.<NAME>
///   [task]           mode = cec | sec | xcheck
///   [mapping]        by_name, by_signature, rename, inputs, outputs, registers, assume,
///                    latency, latency.<output>, qualifier, refine
///   [constraints]    <label> = "<expr>"
///   [blackbox]       spec, imp (lists of instance prefixes)
///   [cases]          <name> = "<expr>"
///   [helpers]        <label> = [spec-net, imp-net]
///   [engine]         bmc_depth, k_max, conflicts, jobs, seed, signature_runs, signature_depth
///   [xcheck]         mode = uninit | xsrc | both, policy = 01 | symbolic
///   [report]         trace, path, format = text | json
struct TaskConfig {
  std::filesystem::path base_dir;
  DesignConfig spec;
  DesignConfig imp;
  TaskMode mode = TaskMode::Sec;
  MappingConfig mapping;
  std::vector<std::string> constraints;
  std::vector<CaseSpec> cases;
  std::vector<NetPair> helpers;
  EngineConfig engine;
  XCheckMode xmode = XCheckMode::UninitFlops;
  XCheckPolicy xpolicy = XCheckPolicy::ZeroOne;
  ReportConfig report;
};

/// Throws ConfigError naming the offending line and key.
TaskConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
/// Throws IoError or ConfigError.
TaskConfig load_config(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Elaborates both sides (black-boxing as configured) and builds the mapping.
/// Throws LatencyMismatchUnspecified when some outputs lack a latency and
/// there is no global default.
EquivalenceTask build_task(const TaskConfig& config);

/// Applies the configured latencies to a mapping's output pairs.
void apply_latencies(const MappingConfig& config, Mapping& mapping);

}  // namespace seqeq
