#pragma once

#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "seqeq/netlist.hpp"
#include "seqeq/sim.hpp"
#include "seqeq/task.hpp"

namespace seqeq {

enum class NetClass { Input, Output, Register, Any };

/// Regex substitution on SPEC base names (the "[i]" suffix is kept aside).
struct RenameRule {
  NetClass scope = NetClass::Any;
  std::string pattern;
  std::string replacement;

  /// "[input|output|register|any:]<regex> -> <replacement>". Throws ConfigError.
  static RenameRule parse(const std::string& text);
  std::optional<std::string> apply(const std::string& bit_name) const;
};

/// Pairs inputs, outputs and registers whose (renamed) SPEC name exists in
/// IMP. Registers come out CANDIDATE. Throws AmbiguousRule when matching
/// rules disagree or two SPEC nets land on one IMP net.
Mapping map_by_name(const Netlist& spec, const Netlist& imp, const std::vector<RenameRule>& rules = {});

/// CANDIDATE register pairs for registers not yet paired in `existing`
/// whose signatures match exactly one register on the other side.
/// Throws SignatureMismatchConfig when the two tables were built differently.
std::vector<RegisterPair> map_by_signature(const Netlist& spec, const Netlist& imp, const Signatures& spec_sigs,
                                           const Signatures& imp_sigs, const Mapping& existing);

/// Builds both signature tables (mapped IMP inputs reuse SPEC stimuli) and
/// appends the signature pairs to `mapping`.
void add_signature_pairs(const Netlist& spec, const Netlist& imp, Mapping& mapping, const SignatureConfig& config);

/// Depth of the joint induction step used by refine_mapping.
inline constexpr int kRefineStepDepth = 2;

/// Proves CANDIDATE register pairs jointly inductive, dropping pairs that
/// differ on a concrete trace (falsified_at set) or break the induction step
/// (induction_only). Survivors become PROVEN. A solver budget exhaustion
/// leaves the remaining pairs CANDIDATE.
Mapping refine_mapping(const EquivalenceTask& task);

}  // namespace seqeq
