#include "seqeq/netlist.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace seqeq {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CombinationalCycle: return "CombinationalCycle";
    case ErrorKind::DanglingRef: return "DanglingRef";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::UnknownNet: return "UnknownNet";
    case ErrorKind::NoSuchInstance: return "NoSuchInstance";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::DuplicatePort: return "DuplicatePort";
    case ErrorKind::WidthMismatch: return "WidthMismatch";
    case ErrorKind::UnknownParameter: return "UnknownParameter";
    case ErrorKind::UnknownModule: return "UnknownModule";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::RecursiveInstantiation: return "RecursiveInstantiation";
    case ErrorKind::MultipleDrivers: return "MultipleDrivers";
    case ErrorKind::UndrivenNet: return "UndrivenNet";
    case ErrorKind::ZeroWidth: return "ZeroWidth";
    case ErrorKind::MissingInput: return "MissingInput";
    case ErrorKind::TraceTooShort: return "TraceTooShort";
    case ErrorKind::UnmappedOutput: return "UnmappedOutput";
    case ErrorKind::AmbiguousRule: return "AmbiguousRule";
    case ErrorKind::SignatureMismatchConfig: return "SignatureMismatchConfig";
    case ErrorKind::UnmappedState: return "UnmappedState";
    case ErrorKind::LatencyMismatchUnspecified: return "LatencyMismatchUnspecified";
    case ErrorKind::IncompleteSplit: return "IncompleteSplit";
    case ErrorKind::SizeOutOfRange: return "SizeOutOfRange";
    case ErrorKind::NoMutationSite: return "NoMutationSite";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::Usage: return "Usage";
  }
  return "Error";
}

// ---------------------------------------------------------------------------
// Netlist
// ---------------------------------------------------------------------------

Netlist::Netlist() { nodes_.push_back(Node{}); }

uint32_t Netlist::add_input(std::string input_name, InputRole role) {
  auto var = static_cast<uint32_t>(nodes_.size());
  nodes_.push_back(Node{NodeKind::Input, static_cast<uint32_t>(inputs_.size()), {}, {}});
  add_name(input_name, Lit::make(var));
  inputs_.push_back(Input{std::move(input_name), var, role});
  return var;
}

Lit Netlist::add_and(Lit left, Lit right) {
  auto var = static_cast<uint32_t>(nodes_.size());
  nodes_.push_back(Node{NodeKind::And, 0, left, right});
  ++num_ands_;
  return Lit::make(var);
}

uint32_t Netlist::add_register(std::string reg_name, Init init) {
  auto var = static_cast<uint32_t>(nodes_.size());
  auto index = static_cast<uint32_t>(registers_.size());
  nodes_.push_back(Node{NodeKind::Register, index, {}, {}});
  add_name(reg_name, Lit::make(var));
  registers_.push_back(Register{std::move(reg_name), var, Lit::make(var), init});
  return index;
}

void Netlist::set_next(uint32_t reg_index, Lit next) { registers_.at(reg_index).next = next; }

void Netlist::set_and_operands(uint32_t var, Lit left, Lit right) {
  Node& n = nodes_.at(var);
  n.left = left;
  n.right = right;
}

void Netlist::add_output(std::string output_name, Lit lit, bool auxiliary) {
  outputs_.push_back(Output{std::move(output_name), lit, auxiliary});
}

void Netlist::add_name(const std::string& net_name, Lit lit) {
  auto [it, inserted] = names_.emplace(net_name, lit);
  if (!inserted && it->second != lit) throw Error(ErrorKind::DuplicateName, net_name);
}

Lit Netlist::make_xor(Lit a, Lit b) { return make_or(add_and(a, !b), add_and(!a, b)); }

Lit Netlist::make_mux(Lit sel, Lit then_lit, Lit else_lit) {
  return make_or(add_and(sel, then_lit), add_and(!sel, else_lit));
}

std::optional<Lit> Netlist::find(std::string_view net_name) const {
  auto it = names_.find(std::string(net_name));
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

std::optional<size_t> Netlist::find_input(std::string_view input_name) const {
  for (size_t i = 0; i < inputs_.size(); ++i)
    if (inputs_[i].name == input_name) return i;
  return std::nullopt;
}

std::optional<size_t> Netlist::find_output(std::string_view output_name) const {
  for (size_t i = 0; i < outputs_.size(); ++i)
    if (outputs_[i].name == output_name) return i;
  return std::nullopt;
}

std::optional<size_t> Netlist::find_register(std::string_view reg_name) const {
  for (size_t i = 0; i < registers_.size(); ++i)
    if (registers_[i].name == reg_name) return i;
  return std::nullopt;
}

std::string Netlist::var_name(uint32_t var) const {
  const Node& n = nodes_[var];
  if (n.kind == NodeKind::Input) return inputs_[n.index].name;
  if (n.kind == NodeKind::Register) return registers_[n.index].name;
  return {};
}

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

namespace {

std::string describe_var(const Netlist& netlist, uint32_t var) {
  std::string name = netlist.var_name(var);
  if (!name.empty()) return name;
  for (const auto& [net_name, lit] : netlist.names())
    if (lit.var() == var) return net_name;
  return "n" + std::to_string(var);
}

}  // namespace

std::vector<uint32_t> topological_ands(const Netlist& netlist) {
  const size_t n = netlist.num_vars();
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<uint8_t> state(n, 0);
  std::vector<uint32_t> order;
  order.reserve(netlist.num_ands());
  std::vector<std::pair<uint32_t, int>> stack;

  for (uint32_t root = 0; root < n; ++root) {
    if (netlist.node(root).kind != NodeKind::And || state[root] != 0) continue;
    stack.emplace_back(root, 0);
    state[root] = 1;
    while (!stack.empty()) {
      auto& [var, child] = stack.back();
      const Node& node = netlist.node(var);
      if (child < 2) {
        uint32_t next = (child == 0 ? node.left : node.right).var();
        ++child;
        if (next >= n || netlist.node(next).kind != NodeKind::And) continue;
        if (state[next] == 1) {
          std::string path = describe_var(netlist, next);
          for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            path = describe_var(netlist, it->first) + " <- " + path;
            if (it->first == next) break;
          }
          throw Error(ErrorKind::CombinationalCycle, path);
        }
        if (state[next] == 0) {
          state[next] = 1;
          stack.emplace_back(next, 0);
        }
      } else {
        state[var] = 2;
        order.push_back(var);
        stack.pop_back();
      }
    }
  }
  return order;
}

void validate(const Netlist& netlist) {
  const size_t n = netlist.num_vars();
  auto check = [&](Lit lit, const std::string& where) {
    if (lit.var() >= n) throw Error(ErrorKind::DanglingRef, where);
  };
  for (uint32_t var = 0; var < n; ++var) {
    const Node& node = netlist.node(var);
    if (node.kind != NodeKind::And) continue;
    check(node.left, describe_var(netlist, var));
    check(node.right, describe_var(netlist, var));
  }
  for (const auto& out : netlist.outputs()) check(out.lit, out.name);
  for (const auto& reg : netlist.registers()) check(reg.next, reg.name);
  for (const auto& box : netlist.blackboxes())
    for (const auto& in : box.inputs) check(in.lit, in.name);
  for (const auto& [name, lit] : netlist.names()) check(lit, name);

  std::set<std::string_view> seen;
  for (const auto& in : netlist.inputs())
    if (!seen.insert(in.name).second) throw Error(ErrorKind::DuplicateName, in.name);
  for (const auto& reg : netlist.registers())
    if (!seen.insert(reg.name).second) throw Error(ErrorKind::DuplicateName, reg.name);
  seen.clear();
  for (const auto& out : netlist.outputs())
    if (!seen.insert(out.name).second) throw Error(ErrorKind::DuplicateName, out.name);

  topological_ands(netlist);
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

Lit HashedBuilder::make_and(Lit a, Lit b) {
  if (a == kFalse || b == kFalse) return kFalse;
  if (a == kTrue) return b;
  if (b == kTrue) return a;
  if (a == b) return a;
  if (a == !b) return kFalse;
  if (b < a) std::swap(a, b);
  uint64_t key = (uint64_t{a.raw()} << 32) | b.raw();
  auto it = table_.find(key);
  if (it != table_.end()) return Lit::make(it->second);
  Lit out = dest_.add_and(a, b);
  table_.emplace(key, out.var());
  return out;
}

Lit HashedBuilder::make_and_all(std::span<const Lit> lits) {
  Lit acc = kTrue;
  for (Lit l : lits) acc = make_and(acc, l);
  return acc;
}

Lit HashedBuilder::make_or_all(std::span<const Lit> lits) {
  Lit acc = kFalse;
  for (Lit l : lits) acc = make_or(acc, l);
  return acc;
}

NetlistCopier::NetlistCopier(const Netlist& source, HashedBuilder& builder, std::string prefix)
    : source_(source),
      builder_(builder),
      prefix_(std::move(prefix)),
      map_(source.num_vars()),
      reg_map_(source.registers().size()),
      input_map_(source.inputs().size()) {
  map_[0] = kFalse;
}

void NetlistCopier::bind(uint32_t source_var, Lit dest_lit) { map_.at(source_var) = dest_lit; }

std::optional<Lit> NetlistCopier::mapped(Lit source_lit) const {
  const auto& m = map_.at(source_lit.var());
  if (!m) return std::nullopt;
  return *m ^ source_lit.inverted();
}

Lit NetlistCopier::copy(Lit source_lit) {
  std::vector<uint32_t> stack{source_lit.var()};
  Netlist& dest = builder_.netlist();
  while (!stack.empty()) {
    uint32_t var = stack.back();
    if (map_[var]) {
      stack.pop_back();
      continue;
    }
    const Node& node = source_.node(var);
    switch (node.kind) {
      case NodeKind::Const:
        map_[var] = kFalse;
        stack.pop_back();
        break;
      case NodeKind::Input: {
        const Input& in = source_.inputs()[node.index];
        uint32_t v = dest.add_input(prefix_ + in.name, in.role);
        input_map_[node.index] = dest.inputs().size() - 1;
        map_[var] = Lit::make(v);
        stack.pop_back();
        break;
      }
      case NodeKind::Register: {
        const Register& reg = source_.registers()[node.index];
        uint32_t idx = dest.add_register(prefix_ + reg.name, reg.init);
        reg_map_[node.index] = idx;
        map_[var] = Lit::make(dest.registers()[idx].var);
        pending_.push_back(node.index);
        stack.pop_back();
        break;
      }
      case NodeKind::And: {
        auto l = map_[node.left.var()];
        auto r = map_[node.right.var()];
        if (l && r) {
          map_[var] = builder_.make_and(*l ^ node.left.inverted(), *r ^ node.right.inverted());
          stack.pop_back();
        } else {
          if (!l) stack.push_back(node.left.var());
          if (!r) stack.push_back(node.right.var());
        }
        break;
      }
    }
  }
  return *map_[source_lit.var()] ^ source_lit.inverted();
}

void NetlistCopier::close_registers() {
  while (!pending_.empty()) {
    size_t src = pending_.back();
    pending_.pop_back();
    Lit next = copy(source_.registers()[src].next);
    builder_.netlist().set_next(*reg_map_[src], next);
  }
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

Netlist structural_hash(const Netlist& netlist) {
  topological_ands(netlist);  // rejects cycles up front
  Netlist out;
  out.name = netlist.name;
  HashedBuilder builder(out);
  NetlistCopier copier(netlist, builder);
  for (const auto& in : netlist.inputs()) copier.copy(Lit::make(in.var));
  for (const auto& reg : netlist.registers()) copier.copy(Lit::make(reg.var));
  for (const auto& o : netlist.outputs()) out.add_output(o.name, copier.copy(o.lit), o.auxiliary);
  copier.close_registers();
  for (const auto& box : netlist.blackboxes()) {
    BlackBoxInstance copy{box.name, {}, box.output_inputs};
    for (const auto& in : box.inputs) copy.inputs.push_back(Output{in.name, copier.copy(in.lit), true});
    out.add_blackbox(std::move(copy));
  }
  for (const auto& [name, lit] : netlist.names()) out.add_name(name, copier.copy(lit));
  return out;
}

Netlist cone_of_influence(const Netlist& netlist, std::span<const std::string> targets) {
  std::vector<std::pair<std::string, Lit>> roots;
  for (const auto& t : targets) {
    if (auto idx = netlist.find_output(t)) {
      roots.emplace_back(t, netlist.outputs()[*idx].lit);
    } else if (auto lit = netlist.find(t)) {
      roots.emplace_back(t, *lit);
    } else {
      throw Error(ErrorKind::UnknownNet, t);
    }
  }
  Netlist out;
  out.name = netlist.name;
  HashedBuilder builder(out);
  NetlistCopier copier(netlist, builder);
  for (const auto& [name, lit] : roots) out.add_output(name, copier.copy(lit));
  copier.close_registers();
  for (const auto& [name, lit] : netlist.names())
    if (auto m = copier.mapped(lit)) out.add_name(name, *m);
  return out;
}

namespace {

bool under_prefix(std::string_view path, std::string_view prefix) {
  if (path == prefix) return true;
  return path.size() > prefix.size() && path.starts_with(prefix) && path[prefix.size()] == '.';
}

Netlist black_box_whole(const Netlist& netlist) {
  Netlist out;
  out.name = netlist.name;
  BlackBoxInstance box{netlist.name, {}, {}};
  for (const auto& in : netlist.inputs()) {
    uint32_t v = out.add_input(in.name, in.role);
    if (in.role == InputRole::Primary) {
      Output observed{netlist.name + "." + in.name, Lit::make(v), true};
      box.inputs.push_back(observed);
      out.add_output(observed.name, observed.lit, true);
    }
  }
  for (const auto& o : netlist.outputs()) {
    if (o.auxiliary) continue;
    uint32_t v = out.add_input(netlist.name + "." + o.name, InputRole::BlackBoxOutput);
    box.output_inputs.push_back(static_cast<uint32_t>(out.inputs().size() - 1));
    out.add_output(o.name, Lit::make(v));
  }
  out.add_blackbox(std::move(box));
  return out;
}

}  // namespace

Netlist black_box(const Netlist& netlist, std::span<const std::string> prefixes) {
  for (const auto& p : prefixes)
    if (p.empty() || p == netlist.name) return black_box_whole(netlist);

  std::vector<const Instance*> boundary;
  for (const auto& p : prefixes) {
    bool found = false;
    for (const auto& inst : netlist.instances()) {
      if (inst.path == p) {
        found = true;
        // nested prefixes collapse into the outermost one
        bool nested = false;
        for (const auto& q : prefixes)
          if (q != p && under_prefix(p, q)) nested = true;
        if (!nested) boundary.push_back(&inst);
      }
    }
    if (!found) throw Error(ErrorKind::NoSuchInstance, p);
  }
  auto boxed = [&](std::string_view name) {
    for (const auto* inst : boundary)
      if (under_prefix(name, inst->path)) return true;
    return false;
  };

  Netlist out;
  out.name = netlist.name;
  HashedBuilder builder(out);
  NetlistCopier copier(netlist, builder);
  for (const auto& in : netlist.inputs()) copier.copy(Lit::make(in.var));

  std::vector<BlackBoxInstance> boxes;
  for (const auto* inst : boundary) {
    BlackBoxInstance box{inst->path, {}, {}};
    for (const auto& bit : inst->outputs) {
      if (copier.is_bound(bit.lit.var())) continue;
      uint32_t v = out.add_input(bit.name, InputRole::BlackBoxOutput);
      box.output_inputs.push_back(static_cast<uint32_t>(out.inputs().size() - 1));
      copier.bind(bit.lit.var(), Lit::make(v) ^ bit.lit.inverted());
    }
    boxes.push_back(std::move(box));
  }

  for (const auto& o : netlist.outputs()) out.add_output(o.name, copier.copy(o.lit), o.auxiliary);
  for (const auto& reg : netlist.registers())
    if (!boxed(reg.name)) copier.copy(Lit::make(reg.var));
  copier.close_registers();

  for (size_t i = 0; i < boundary.size(); ++i) {
    for (const auto& bit : boundary[i]->inputs) {
      Output observed{bit.name, copier.copy(bit.lit), true};
      out.add_output(observed.name, observed.lit, true);
      boxes[i].inputs.push_back(std::move(observed));
    }
  }
  for (const auto& box : netlist.blackboxes()) {
    BlackBoxInstance copy{box.name, {}, {}};
    for (uint32_t idx : box.output_inputs)
      if (auto d = copier.dest_input(idx)) copy.output_inputs.push_back(static_cast<uint32_t>(*d));
    for (const auto& in : box.inputs)
      if (auto m = copier.mapped(in.lit)) copy.inputs.push_back(Output{in.name, *m, true});
    out.add_blackbox(std::move(copy));
  }
  for (auto& box : boxes) out.add_blackbox(std::move(box));

  for (const auto& [name, lit] : netlist.names()) {
    if (boxed(name)) continue;
    if (auto m = copier.mapped(lit)) out.add_name(name, *m);
  }
  for (const auto& inst : netlist.instances()) {
    if (boxed(inst.path)) continue;
    Instance copy{inst.path, inst.module, {}, {}};
    bool complete = true;
    for (const auto& bit : inst.inputs) {
      auto m = copier.mapped(bit.lit);
      if (!m) complete = false; else copy.inputs.push_back(PortBit{bit.name, *m});
    }
    for (const auto& bit : inst.outputs) {
      auto m = copier.mapped(bit.lit);
      if (!m) complete = false; else copy.outputs.push_back(PortBit{bit.name, *m});
    }
    if (complete) out.add_instance(std::move(copy));
  }
  return out;
}

std::string lit_to_string(Lit lit) { return (lit.inverted() ? "!" : "") + std::to_string(lit.var()); }

std::string dump(const Netlist& netlist) {
  std::ostringstream os;
  os << "netlist " << (netlist.name.empty() ? "-" : netlist.name) << "\n";
  for (const auto& in : netlist.inputs()) {
    os << "input " << in.var << " " << in.name;
    if (in.role == InputRole::BlackBoxOutput) os << " bbox";
    if (in.role == InputRole::XSource) os << " xsrc";
    os << "\n";
  }
  for (const auto& reg : netlist.registers()) {
    const char* init = reg.init == Init::Zero ? "0" : reg.init == Init::One ? "1" : "x";
    os << "reg " << reg.var << " " << reg.name << " init " << init << " next " << lit_to_string(reg.next) << "\n";
  }
  for (uint32_t var = 0; var < netlist.num_vars(); ++var) {
    const Node& n = netlist.node(var);
    if (n.kind != NodeKind::And) continue;
    os << var << " = AND " << lit_to_string(n.left) << " " << lit_to_string(n.right) << "\n";
  }
  for (const auto& o : netlist.outputs())
    os << "output " << o.name << " " << lit_to_string(o.lit) << (o.auxiliary ? " aux" : "") << "\n";
  return os.str();
}

}  // namespace seqeq
