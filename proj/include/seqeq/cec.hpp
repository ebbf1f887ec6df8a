#pragma once

#include <string>
#include <vector>

#include "seqeq/netlist.hpp"
#include "seqeq/task.hpp"

namespace seqeq {

/// SPEC and IMP side by side with tied inputs and paired registers cut into
/// shared pseudo-inputs ("reg:<spec name>"). One XOR per output pair and one
/// per register pair's next-state functions.
struct Miter {
  Netlist net;
  std::vector<Lit> outputs;          // per mapping output pair, qualified
  std::vector<Lit> next_states;      // per mapping register pair
  std::vector<Lit> constraints;
  std::vector<std::string> output_names;
  std::vector<std::string> register_names;
};

/// Throws UnmappedState for any register not in a register pair,
/// UnmappedOutput without output pairs, ConfigError for nonzero latency.
Miter build_miter(const Netlist& spec, const Netlist& imp, const Mapping& mapping,
                  const std::vector<std::string>& constraints = {});

/// Two miter nets found equivalent (under the constraints) by sweeping;
/// `b` may be inverted relative to `a`.
struct SweepMerge {
  Lit a;
  Lit b;
};

struct SweepResult {
  Netlist net;                   // reduced miter
  std::vector<Lit> outputs;      // images of Miter::outputs
  std::vector<Lit> next_states;  // images of Miter::next_states
  std::vector<Lit> constraints;
  std::vector<SweepMerge> merges;  // in terms of the original miter
  size_t candidates = 0;
  size_t refuted = 0;
};

/// Signature-grouped SAT sweeping in fanin-first order.
SweepResult sweep(const Miter& miter, size_t runs = 256, uint64_t seed = 0, int64_t conflicts_per_pair = 1000);

/// Combinational check under the register mapping. Output differences are
/// confirmed with a product BMC so the trace starts from the initial state.
Verdict check_cec(const EquivalenceTask& task);

}  // namespace seqeq
