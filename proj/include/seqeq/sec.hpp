#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seqeq/netlist.hpp"
#include "seqeq/sat.hpp"
#include "seqeq/task.hpp"

namespace seqeq {

struct ProductOptions {
  bool outputs = true;                      // build miters for the mapped outputs
  std::vector<std::string> extra_constraints;
  std::vector<NetPair> targets;             // pairs exposed as equality literals
  std::vector<NetPair> lemmas;              // pairs assumed equal every frame
  std::vector<std::string> predicates;      // extra expressions exposed as literals
  bool merge_registers = true;              // share PROVEN/ASSUMED register pairs
};

/// SPEC and IMP in lockstep over one hashed netlist. Tied inputs keep the
/// SPEC name; other free inputs and state are prefixed "spec:" / "imp:", so
/// product input and UNINIT register names are trace keys.
struct ProductMachine {
  Netlist net;
  Lit bad = kFalse;
  std::vector<Lit> miters;       // one per mapping output pair, already qualified
  std::vector<Lit> constraints;  // assumed 1 every frame
  std::vector<Lit> targets;      // XNOR per ProductOptions::targets
  std::vector<Lit> lemmas;       // XNOR per ProductOptions::lemmas
  std::vector<Lit> predicates;   // per ProductOptions::predicates
  Lit qualifier = kTrue;
  bool state_constraints = false;
  int max_latency = 0;
  Mapping mapping;
  /// Trace register keys of merged IMP registers and the product register they share.
  std::vector<std::pair<std::string, uint32_t>> aliases;
};

/// Throws UnmappedOutput, UnknownNet, UnknownIdentifier.
ProductMachine build_product(const EquivalenceTask& task, const ProductOptions& options = {});

/// Net of a design by output, register or name-table name. Throws UnknownNet.
Lit resolve_net(const Netlist& netlist, const std::string& name);

/// Incremental bounded model checker over a product: frames are added one at
/// a time from the initial state; `every_frame` literals are assumed at each.
class Bmc {
 public:
  Bmc(const ProductMachine& pm, Lit bad, std::vector<Lit> every_frame, const EngineConfig& engine);

  /// Checks frame `frame` (all earlier frames must be done). Unsat = bad-free.
  sat::Result check_frame(int frame);
  /// Frames 0..depth; stops at the first Sat/Unknown.
  sat::Result extend(int depth);
  int completed() const { return completed_; }
  int failing_frame() const { return failing_frame_; }
  /// Counterexample of the last Sat answer, frames 0..failing_frame().
  Trace trace() const;
  /// Model value of a product literal at a frame of the last Sat answer.
  bool value(Lit lit, int frame);
  int64_t conflicts() const { return solver_.conflicts(); }

 private:
  const ProductMachine& pm_;
  Lit bad_;
  std::vector<Lit> every_frame_;
  EngineConfig engine_;
  sat::Solver solver_;
  sat::Unroller unroll_;
  int completed_ = -1;
  int failing_frame_ = -1;
};

/// Induction step: k bad-free frames from an arbitrary state imply a bad-free
/// frame k. Simple-path constraints are added lazily on repeated states.
class InductionStep {
 public:
  InductionStep(const ProductMachine& pm, Lit bad, std::vector<Lit> every_frame, const EngineConfig& engine);

  /// Unsat = step holds for k (k >= 1).
  sat::Result check(int k);
  /// Miters high at the final frame of the last failing step.
  std::vector<size_t> failing_miters() const { return failing_; }
  int64_t conflicts() const { return solver_.conflicts(); }
  int simple_path_constraints() const { return simple_paths_; }

 private:
  void encode_frame(int frame);

  const ProductMachine& pm_;
  Lit bad_;
  std::vector<Lit> every_frame_;
  EngineConfig engine_;
  sat::Solver solver_;
  sat::Unroller unroll_;
  int frames_ = 0;
  int premises_ = 0;
  std::vector<size_t> failing_;
  int simple_paths_ = 0;
};

/// Constraints (and the qualifier) satisfiable at all? Unsat means VACUOUS.
bool constraints_satisfiable(const ProductMachine& pm, const EngineConfig& engine);

Verdict bmc(const EquivalenceTask& task, int max_depth);
Verdict k_induction(const EquivalenceTask& task, int k_max);

struct HelperResult {
  NetPair pair;
  bool proven = false;
  int k = 0;
  std::optional<size_t> falsified_at;
  std::string reason;
};

/// Proves candidate points always-equal, assuming those proven in earlier
/// passes; repeats until a pass proves nothing new.
std::vector<HelperResult> prove_helpers(const EquivalenceTask& task, const std::vector<NetPair>& candidates);

/// Runs each case as a sub-task with its predicate held every cycle.
/// Throws IncompleteSplit with an uncovered input valuation.
Verdict case_split(const EquivalenceTask& task);

/// Structural hash, mapping refinement, helpers, then interleaved BMC and
/// k-induction. Dispatches to case_split when the task has cases.
Verdict check_sec(const EquivalenceTask& task);

}  // namespace seqeq
