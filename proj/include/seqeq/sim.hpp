#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "seqeq/netlist.hpp"
#include "seqeq/task.hpp"

namespace seqeq {

/// Per-cycle input values by input name, plus initial values for registers
/// whose init is UNINIT (missing ones start as X).
struct Stimulus {
  std::vector<std::map<std::string, Tri>> cycles;
  std::map<std::string, bool> init;
};

/// Value of every variable at every simulated cycle.
class Waveform {
 public:
  Waveform(size_t cycles, size_t vars) : vars_(vars), values_(cycles * vars, Tri::X) {}

  size_t cycles() const { return vars_ ? values_.size() / vars_ : 0; }
  Tri value(size_t cycle, Lit lit) const;
  void set(size_t cycle, uint32_t var, Tri v) { values_[cycle * vars_ + var] = v; }

 private:
  size_t vars_;
  std::vector<Tri> values_;
};

Tri tri_and(Tri a, Tri b);
Tri tri_not(Tri a);

/// Kleene three-valued cycle simulation. Throws MissingInput when a
/// primary or black-box input has no value at some cycle; X sources default to X.
Waveform simulate(const Netlist& netlist, const Stimulus& stimulus);

/// Bit-parallel three-valued simulator, 64 runs per word. Each variable
/// holds two planes: `one` (value is 1) and `zero` (value is 0); X is neither.
class PackedSim {
 public:
  PackedSim(const Netlist& netlist, size_t words);

  size_t words() const { return words_; }
  /// Registers to their init value; UNINIT registers become X.
  void reset();
  void set_input(size_t input_index, std::span<const uint64_t> one, std::span<const uint64_t> zero);
  /// Evaluates the combinational core for the current cycle.
  void eval();
  /// Latches next-state values; call after eval().
  void step();

  /// Planes of a literal (inversion swaps them).
  std::span<const uint64_t> one(Lit lit) const;
  std::span<const uint64_t> zero(Lit lit) const;

 private:
  const Netlist& netlist_;
  size_t words_;
  std::vector<uint64_t> one_;
  std::vector<uint64_t> zero_;
  std::vector<uint32_t> gates_;  // packed (out, left, right) triples
  std::vector<uint64_t> scratch_;
};

/// Random-simulation signatures: the value of every variable under `runs`
/// random stimuli at cycle `depth`. Stimuli are derived from input names, so
/// two netlists sharing input names see identical stimuli.
struct SignatureConfig {
  size_t runs = 256;
  size_t depth = 4;
  uint64_t seed = 0;
  bool operator==(const SignatureConfig&) const = default;
};

class Signatures {
 public:
  /// `stimulus_names` renames inputs for stimulus derivation (IMP inputs
  /// mapped to SPEC names), so mapped inputs receive identical values.
  Signatures(const Netlist& netlist, size_t runs, size_t depth, uint64_t seed,
             const std::map<std::string, std::string>& stimulus_names = {});

  const SignatureConfig& config() const { return config_; }
  size_t words() const { return words_; }
  std::span<const uint64_t> one(Lit lit) const;
  std::span<const uint64_t> zero(Lit lit) const;
  /// Canonical key: equal keys iff equal three-valued signatures.
  std::string key(Lit lit) const;
  /// True when some run has a definite differing value.
  bool differs(Lit a, const Signatures& other, Lit b) const;

 private:
  SignatureConfig config_;
  size_t words_;
  std::vector<uint64_t> one_;
  std::vector<uint64_t> zero_;
};

/// Deterministic per-(name, seed, cycle, word) stimulus word.
uint64_t stimulus_word(const std::string& name, uint64_t seed, uint64_t cycle, uint64_t word);

/// SNL predicate over SPEC/IMP nets (constraint, qualifier or case),
/// bit-blasted into a small netlist whose inputs stand for the referenced
/// nets. Identifiers bind per bind_identifier.
class Probe {
 public:
  struct Source {
    Side side;
    Lit net;
    std::string key;  // "spec:<bit>" or "imp:<bit>"
  };

  /// Throws UnknownIdentifier or SyntaxError.
  Probe(const Netlist& spec, const Netlist& imp, const std::string& expression);

  const std::vector<Source>& sources() const { return sources_; }
  /// True when some identifier resolved to a non-input net.
  bool references_state() const { return references_state_; }
  const Netlist& netlist() const { return net_; }
  /// Predicate literal in netlist(): OR of the expression's bits.
  Lit result() const { return result_; }
  /// Two-valued evaluation given one value per source.
  bool eval(std::span<const char> source_values) const;
  /// Three-valued evaluation over per-cycle waveforms of both sides.
  std::vector<Tri> eval(const Waveform& spec, const Waveform& imp) const;

 private:
  Netlist net_;
  std::vector<Source> sources_;
  std::vector<uint32_t> order_;
  Lit result_;
  bool references_state_ = false;
};

/// Simulates both sides on a trace (see replay for input naming).
std::pair<Waveform, Waveform> simulate_trace(const Netlist& spec, const Netlist& imp, const Mapping& mapping,
                                             const Trace& trace);

struct ReplayResult {
  std::optional<size_t> mismatch_cycle;
  std::string mismatch_output;  // SPEC output name
  Trace annotated;              // input trace with compared output lines
};

/// Re-simulates both designs on a trace and compares mapped outputs with
/// latency alignment and the qualifier. Throws TraceTooShort or UnmappedOutput.
ReplayResult replay(const Netlist& spec, const Netlist& imp, const Mapping& mapping, const Trace& trace);

/// Which free inputs of each side a trace must drive.
struct TraceInputs {
  std::vector<std::string> spec_names;  // trace key for each SPEC input
  std::vector<std::string> imp_names;   // trace key for each IMP input
};

TraceInputs trace_input_names(const Netlist& spec, const Netlist& imp, const Mapping& mapping);

}  // namespace seqeq
