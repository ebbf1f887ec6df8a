#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqeq/error.hpp"

namespace seqeq {

/// Reference to a net: variable index shifted left by one, low bit = inversion.
/// Variable 0 is the constant FALSE, so Lit{0} is FALSE and Lit{1} is TRUE.
class Lit {
 public:
  constexpr Lit() = default;
  constexpr explicit Lit(uint32_t raw) : raw_(raw) {}
  static constexpr Lit make(uint32_t var, bool inverted = false) { return Lit((var << 1) | (inverted ? 1u : 0u)); }

  constexpr uint32_t var() const { return raw_ >> 1; }
  constexpr bool inverted() const { return raw_ & 1u; }
  constexpr uint32_t raw() const { return raw_; }
  constexpr Lit operator!() const { return Lit(raw_ ^ 1u); }
  constexpr Lit operator^(bool flip) const { return Lit(raw_ ^ (flip ? 1u : 0u)); }
  constexpr Lit regular() const { return Lit(raw_ & ~1u); }
  constexpr bool is_const() const { return var() == 0; }

  friend constexpr auto operator<=>(Lit, Lit) = default;

 private:
  uint32_t raw_ = 0;
};

inline constexpr Lit kFalse{0};
inline constexpr Lit kTrue{1};

enum class NodeKind : uint8_t { Const, Input, Register, And };

/// Free variables: primary inputs, outputs of black-boxed instances, and
/// per-cycle X sources introduced by a symbolic X policy.
enum class InputRole : uint8_t { Primary, BlackBoxOutput, XSource };

enum class Init : uint8_t { Zero, One, Uninit };

struct Node {
  NodeKind kind = NodeKind::Const;
  uint32_t index = 0;  // position in inputs()/registers() for Input/Register nodes
  Lit left;
  Lit right;
};

struct Input {
  std::string name;
  uint32_t var = 0;
  InputRole role = InputRole::Primary;
};

struct Output {
  std::string name;
  Lit lit;
  bool auxiliary = false;  // observation point created by black-boxing
};

struct Register {
  std::string name;
  uint32_t var = 0;
  Lit next;
  Init init = Init::Zero;
};

struct BlackBoxInstance {
  std::string name;
  std::vector<Output> inputs;           // observed: also present as auxiliary outputs
  std::vector<uint32_t> output_inputs;  // indices into inputs() of the fresh free inputs
};

struct PortBit {
  std::string name;
  Lit lit;
};

/// Elaborated submodule instance; port bits are buffer nodes so black-boxing
/// can cut exactly at the instance boundary.
struct Instance {
  std::string path;
  std::string module;
  std::vector<PortBit> inputs;
  std::vector<PortBit> outputs;
};

/// Bit-level sequential circuit: an and-inverter core plus registers.
///
/// Netlists are built once through the add_* calls and then shared as const;
/// every transform returns a fresh netlist.
class Netlist {
 public:
  Netlist();

  std::string name;

  uint32_t add_input(std::string name, InputRole role = InputRole::Primary);
  /// Raw AND node; no hashing or folding (see structural_hash).
  Lit add_and(Lit left, Lit right);
  /// Register with an unset next-state (self loop); use set_next.
  uint32_t add_register(std::string name, Init init);
  void set_next(uint32_t reg_index, Lit next);
  void set_and_operands(uint32_t var, Lit left, Lit right);
  void add_output(std::string name, Lit lit, bool auxiliary = false);
  void add_name(const std::string& name, Lit lit);
  void add_instance(Instance instance) { instances_.push_back(std::move(instance)); }
  void add_blackbox(BlackBoxInstance box) { blackboxes_.push_back(std::move(box)); }

  Lit make_or(Lit a, Lit b) { return !add_and(!a, !b); }
  Lit make_xor(Lit a, Lit b);
  Lit make_mux(Lit sel, Lit then_lit, Lit else_lit);

  size_t num_vars() const { return nodes_.size(); }
  size_t num_ands() const { return num_ands_; }
  const Node& node(uint32_t var) const { return nodes_[var]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Input> inputs() const { return inputs_; }
  std::span<const Output> outputs() const { return outputs_; }
  std::span<const Register> registers() const { return registers_; }
  std::span<const BlackBoxInstance> blackboxes() const { return blackboxes_; }
  std::span<const Instance> instances() const { return instances_; }
  const std::map<std::string, Lit>& names() const { return names_; }

  std::optional<Lit> find(std::string_view name) const;
  std::optional<size_t> find_input(std::string_view name) const;
  std::optional<size_t> find_output(std::string_view name) const;
  std::optional<size_t> find_register(std::string_view name) const;
  /// Name of the node if it is an input or register, else empty.
  std::string var_name(uint32_t var) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Input> inputs_;
  std::vector<Output> outputs_;
  std::vector<Register> registers_;
  std::vector<BlackBoxInstance> blackboxes_;
  std::vector<Instance> instances_;
  std::map<std::string, Lit> names_;
  size_t num_ands_ = 0;
};

/// Checks acyclicity, reference resolution and name uniqueness.
/// Throws CombinationalCycle, DanglingRef or DuplicateName.
void validate(const Netlist& netlist);

/// AND variables ordered fanin-first. Throws CombinationalCycle.
std::vector<uint32_t> topological_ands(const Netlist& netlist);

/// Sub-netlist of everything transitively feeding `targets` (net names);
/// only those nets become outputs. Throws UnknownNet.
Netlist cone_of_influence(const Netlist& netlist, std::span<const std::string> targets);

/// Removes every instance under the given hierarchical prefixes: box outputs
/// become free inputs, box inputs become auxiliary observed outputs.
/// The netlist's own name as prefix boxes the whole design. Throws NoSuchInstance.
Netlist black_box(const Netlist& netlist, std::span<const std::string> prefixes);

/// Canonical copy with identical AND nodes merged and trivial ANDs folded.
/// AND variables in the result are topologically ordered.
Netlist structural_hash(const Netlist& netlist);

/// Line-oriented debug dump, one node per line.
std::string dump(const Netlist& netlist);

std::string lit_to_string(Lit lit);

/// AND with structural hashing and constant folding.
class HashedBuilder {
 public:
  explicit HashedBuilder(Netlist& dest) : dest_(dest) {}
  Lit make_and(Lit a, Lit b);
  Lit make_or(Lit a, Lit b) { return !make_and(!a, !b); }
  Lit make_xor(Lit a, Lit b) { return make_or(make_and(a, !b), make_and(!a, b)); }
  Lit make_xnor(Lit a, Lit b) { return !make_xor(a, b); }
  Lit make_mux(Lit sel, Lit t, Lit e) { return make_or(make_and(sel, t), make_and(!sel, e)); }
  Lit make_and_all(std::span<const Lit> lits);
  Lit make_or_all(std::span<const Lit> lits);
  Netlist& netlist() { return dest_; }

 private:
  Netlist& dest_;
  std::unordered_map<uint64_t, uint32_t> table_;
};

/// Copies the cone of source literals into a destination netlist on demand,
/// hashing as it goes. Unbound inputs and registers are recreated with
/// `prefix` prepended to their names; registers get their next-state in
/// close_registers().
class NetlistCopier {
 public:
  NetlistCopier(const Netlist& source, HashedBuilder& builder, std::string prefix = {});

  Lit copy(Lit source_lit);
  /// Pre-binds a source input or register variable to a destination literal.
  void bind(uint32_t source_var, Lit dest_lit);
  bool is_bound(uint32_t source_var) const { return map_[source_var].has_value(); }
  /// Destination literal if the source literal's variable was copied already.
  std::optional<Lit> mapped(Lit source_lit) const;
  /// Copies next-state functions of every register reached so far (and of
  /// registers those reach in turn).
  void close_registers();
  std::optional<uint32_t> dest_register(size_t source_register) const { return reg_map_[source_register]; }
  std::optional<size_t> dest_input(size_t source_input) const { return input_map_[source_input]; }

 private:
  const Netlist& source_;
  HashedBuilder& builder_;
  std::string prefix_;
  std::vector<std::optional<Lit>> map_;
  std::vector<std::optional<uint32_t>> reg_map_;
  std::vector<std::optional<size_t>> input_map_;
  std::vector<size_t> pending_;
};

}  // namespace seqeq
