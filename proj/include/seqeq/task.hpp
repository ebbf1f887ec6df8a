#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seqeq/netlist.hpp"

namespace seqeq {

enum class Tri : uint8_t { Zero, One, X };

inline char to_char(Tri v) { return v == Tri::Zero ? '0' : v == Tri::One ? '1' : 'x'; }
inline Tri tri_of(bool b) { return b ? Tri::One : Tri::Zero; }

enum class PairTag { Assumed, Candidate, Proven, Dropped };

const char* to_string(PairTag tag);

struct NetPair {
  std::string spec;
  std::string imp;
  bool operator==(const NetPair&) const = default;
};

/// Output correspondence; outputs are compared from cycle max(latencies) on,
/// SPEC at t - (imp_latency - spec_latency) against IMP at t when IMP is slower.
struct OutputPair {
  std::string spec;
  std::string imp;
  int spec_latency = 0;
  int imp_latency = 0;
};

struct RegisterPair {
  std::string spec;
  std::string imp;
  PairTag tag = PairTag::Candidate;
  std::optional<size_t> falsified_at;  // cycle of a concrete differing trace
  bool induction_only = false;         // dropped without a concrete witness
};

/// SPEC/IMP correspondence, all at bit level ("data[3]").
struct Mapping {
  std::vector<NetPair> inputs;
  std::vector<OutputPair> outputs;
  std::vector<RegisterPair> registers;
  std::string qualifier;  // SNL expression; empty = always compare
  std::vector<std::string> unmatched_spec;
  std::vector<std::string> unmatched_imp;
};

struct CaseSpec {
  std::string name;
  std::string predicate;
};

struct EngineConfig {
  int bmc_depth = 50;
  int k_max = 20;
  int64_t conflicts = 1'000'000;
  int jobs = 1;
  uint64_t seed = 0;
  bool refine = true;
  bool signatures = true;
  int signature_runs = 256;
  int signature_depth = 4;
  std::string dump_cnf_dir;
};

struct EquivalenceTask {
  std::shared_ptr<const Netlist> spec;
  std::shared_ptr<const Netlist> imp;
  Mapping mapping;
  std::vector<std::string> constraints;  // SNL expressions assumed true every cycle
  std::vector<NetPair> helpers;          // candidate internal equality points
  std::vector<CaseSpec> cases;
  EngineConfig engine;
};

enum class Status { Equivalent, NotEquivalent, Inconclusive, Vacuous };

const char* to_string(Status status);
std::optional<Status> parse_status(const std::string& text);

struct OutLine {
  std::string spec;
  Tri spec_value = Tri::X;
  std::string imp;
  Tri imp_value = Tri::X;
  bool mismatch = false;
};

/// Counterexample / stimulus trace. Input names are SPEC names for tied
/// inputs and "spec:<name>" / "imp:<name>" for side-specific free inputs;
/// register choices are always side-qualified.
struct Trace {
  std::vector<std::map<std::string, Tri>> inputs;  // per cycle
  std::map<std::string, bool> registers;           // initial values of symbolic registers
  std::vector<std::vector<OutLine>> outputs;       // per cycle, filled by replay

  size_t cycles() const { return inputs.size(); }
};

std::string write_trace(const Trace& trace);
/// Throws TraceTooShort when fewer cycle blocks than declared are present.
Trace read_trace(const std::string& text);

enum class Side { Spec, Imp };

/// An SNL identifier in a constraint, qualifier or case predicate, bound to
/// bit-level nets. Lookup order: SPEC input, IMP input, SPEC net, IMP net.
struct BoundIdentifier {
  Side side = Side::Spec;
  bool input = false;
  std::vector<std::string> bits;  // LSB first
};

std::optional<BoundIdentifier> bind_identifier(const Netlist& spec, const Netlist& imp, const std::string& identifier);

/// Bit names of word `identifier` in `netlist`: the scalar itself or
/// identifier[0..n-1]. Empty when absent.
std::vector<std::string> word_bits(const Netlist& netlist, const std::string& identifier);

struct CaseResult {
  std::string name;
  std::string predicate;
  Status status = Status::Inconclusive;
  int k = 0;
  int bmc_depth = 0;
  std::optional<size_t> mismatch_cycle;
  double seconds = 0;
};

struct OutputResult {
  std::string spec;
  std::string imp;
  Status status = Status::Inconclusive;
};

struct Verdict {
  Status status = Status::Inconclusive;
  std::string method;  // "structural", "sweep", "k-induction", "bmc", "case-split", "explicit"
  int k = 0;           // induction depth of the proof
  int bmc_depth = -1;  // deepest frame known bad-free
  std::optional<Trace> trace;
  std::optional<size_t> mismatch_cycle;
  std::string mismatch_output;
  std::string hardest_output;
  std::vector<std::string> helpers_used;
  std::vector<OutputResult> outputs;
  std::vector<CaseResult> cases;
  std::vector<std::string> notes;
  int64_t conflicts = 0;
  double seconds = 0;
};

}  // namespace seqeq
