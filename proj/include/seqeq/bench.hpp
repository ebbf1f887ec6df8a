#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seqeq/config.hpp"
#include "seqeq/task.hpp"

namespace seqeq::bench {

enum class ScenarioKind { Retime, ParallelPath, PipelineDelta, ChickenBit, ClockGate, ParamDefault, XUninit, OpcodeBuckets };

const char* to_string(ScenarioKind kind);  // "RETIME", ...
/// Accepts "RETIME", "retime", "parallel_path", "parallel-path", ...
std::optional<ScenarioKind> parse_kind(const std::string& text);
std::vector<ScenarioKind> all_kinds();

/// Width of the datapath, pipeline depth, and an optional register budget.
/// Desk scale: width <= 16, inputs <= 16, registers <= 64. Stress tier:
/// registers <= 512 (not oracle-certified).
struct BenchSize {
  int width = 8;
  int depth = 4;
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::Retime;
  uint64_t seed = 0;
  BenchSize size;
  std::string spec_source;
  std::string imp_source;
  std::string config;  // task.cfg referring to spec.snl / imp.snl
  Status expected = Status::Equivalent;
  std::string requirement;  // extra config the expected verdict depends on
  std::vector<NetPair> register_truth;
  std::string oracle = "skipped";  // "confirmed" or "skipped (...)"
};

/// Deterministic per (kind, seed, size). Throws SizeOutOfRange. Small
/// instances are certified by the explicit-state oracle before returning.
Scenario generate(ScenarioKind kind, uint64_t seed, BenchSize size = {});

/// Same pair with a behavior-changing defect in the IMP (or, for X_UNINIT,
/// an X that reaches the output). Expected NOT_EQUIVALENT even with the
/// scenario's required config.
Scenario generate_faulty(ScenarioKind kind, uint64_t seed, BenchSize size = {});

/// Writes spec.snl, imp.snl, task.cfg and expected.txt.
void write_scenario(const Scenario& scenario, const std::filesystem::path& dir);

/// Task configuration of a scenario with the sources kept in memory.
TaskConfig scenario_config(const Scenario& scenario);
EquivalenceTask scenario_task(const Scenario& scenario);

/// Runs the mode the scenario's config selects (sec, cec or xcheck).
Verdict run_task(const TaskConfig& config);

// ---- mutation ----

enum class MutationKind { OperatorSwap, OperandSwap, InvertedLiteral, ConstantFlip, WrongWire };
const char* to_string(MutationKind kind);

struct Mutation {
  MutationKind kind = MutationKind::OperatorSwap;
  std::string module;
  int line = 0;
  int col = 0;
  std::string before;
  std::string after;
  /// Oracle label: true = equivalent mutant, false = behavior changed.
  std::optional<bool> equivalent;
};

struct Mutant {
  std::string source;
  Mutation mutation;
};

/// One local change chosen by `seed`. With a non-empty `top`, only mutants
/// that still elaborate are returned. Throws NoMutationSite.
Mutant mutate(const std::string& source, uint64_t seed, const std::string& top = {});

/// Mutates the IMP side of a scenario and labels the mutant with the oracle
/// (label left empty when the oracle's state limit is exceeded).
struct LabeledMutant {
  Scenario scenario;  // imp_source replaced by the mutant
  Mutation mutation;
};
LabeledMutant mutate_scenario(const Scenario& scenario, uint64_t seed);

// ---- explicit-state oracle ----

struct OracleLimits {
  size_t max_states = 1u << 16;
  size_t max_input_bits = 12;
  size_t max_free_bits = 22;  // registers + inputs enumerated for vacuity checks
};

/// Breadth-first reachability over the product of the two designs with
/// every input valuation, independent of the SAT engines. Returns nullopt
/// when a limit is exceeded.
std::optional<Status> oracle_check(const EquivalenceTask& task, const OracleLimits& limits = {});

// ---- random tasks ----

struct RandomTask {
  std::string spec_source;
  std::string imp_source;
  bool mutated = false;
};

/// Small random SEC pair: <= max_inputs one-bit inputs, <= max_registers
/// registers per side. The IMP is a function-preserving rewrite of the SPEC,
/// mutated about half the time.
RandomTask random_task(uint64_t seed, int max_inputs = 6, int max_registers = 10);

/// Deep pipeline against an inverted-storage copy. Needs helper points to
/// converge at small k; `with_helpers` lists the stage points in the config.
Scenario helper_pipeline(bool with_helpers, int stages = 8, int width = 2);

}  // namespace seqeq::bench
