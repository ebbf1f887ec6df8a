#include "seqeq/mapper.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "seqeq/sec.hpp"
#include "seqeq/snl.hpp"

namespace seqeq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

bool in_scope(NetClass scope, NetClass cls) { return scope == NetClass::Any || scope == cls; }

/// Renamed name of a SPEC bit, or the name itself when no rule matches.
std::string rename(const std::string& name, NetClass cls, const std::vector<RenameRule>& rules,
                   const std::function<bool(const std::string&)>& exists) {
  std::optional<std::string> chosen;
  std::string first_rule_result;
  for (const auto& rule : rules) {
    if (!in_scope(rule.scope, cls)) continue;
    auto r = rule.apply(name);
    if (!r) continue;
    if (first_rule_result.empty()) first_rule_result = *r;
    if (!exists(*r)) continue;
    if (chosen && *chosen != *r)
      throw Error(ErrorKind::AmbiguousRule, name + " renames to both " + *chosen + " and " + *r);
    chosen = *r;
  }
  if (chosen) return *chosen;
  if (exists(name) || first_rule_result.empty()) return name;
  return first_rule_result;
}

}  // namespace

RenameRule RenameRule::parse(const std::string& text) {
  const auto arrow = text.find("->");
  if (arrow == std::string::npos) throw Error(ErrorKind::ConfigError, "rename rule needs '->': " + text);
  RenameRule rule;
  std::string lhs = trim(text.substr(0, arrow));
  rule.replacement = trim(text.substr(arrow + 2));
  static const std::map<std::string, NetClass> scopes = {{"input", NetClass::Input},
                                                         {"inputs", NetClass::Input},
                                                         {"output", NetClass::Output},
                                                         {"outputs", NetClass::Output},
                                                         {"register", NetClass::Register},
                                                         {"registers", NetClass::Register},
                                                         {"any", NetClass::Any}};
  if (auto colon = lhs.find(':'); colon != std::string::npos) {
    auto it = scopes.find(trim(lhs.substr(0, colon)));
    if (it != scopes.end()) {
      rule.scope = it->second;
      lhs = trim(lhs.substr(colon + 1));
    }
  }
  rule.pattern = lhs;
  try {
    std::regex check(rule.pattern);
  } catch (const std::regex_error&) {
    throw Error(ErrorKind::ConfigError, "bad rename pattern: " + rule.pattern);
  }
  return rule;
}

std::optional<std::string> RenameRule::apply(const std::string& bit_name) const {
  auto [base, idx] = snl::split_bit_name(bit_name);
  const std::regex re(pattern);
  if (!std::regex_search(base, re)) return std::nullopt;
  std::string out = std::regex_replace(base, re, replacement, std::regex_constants::format_first_only);
  if (idx >= 0) out += "[" + std::to_string(idx) + "]";
  return out;
}

Mapping map_by_name(const Netlist& spec, const Netlist& imp, const std::vector<RenameRule>& rules) {
  Mapping m;
  std::set<std::string> used_inputs, used_outputs, used_registers;
  auto claim = [](std::set<std::string>& used, const std::string& imp_name, const std::string& spec_name) {
    if (!used.insert(imp_name).second)
      throw Error(ErrorKind::AmbiguousRule, "IMP net " + imp_name + " matched twice (again by " + spec_name + ")");
  };

  for (const auto& in : spec.inputs()) {
    if (in.role == InputRole::XSource) continue;
    auto exists = [&](const std::string& n) {
      auto i = imp.find_input(n);
      return i && imp.inputs()[*i].role != InputRole::XSource;
    };
    const std::string target = rename(in.name, NetClass::Input, rules, exists);
    if (exists(target)) {
      claim(used_inputs, target, in.name);
      m.inputs.push_back({in.name, target});
    } else {
      m.unmatched_spec.push_back(in.name);
    }
  }
  for (const auto& out : spec.outputs()) {
    if (out.auxiliary) {
      // Black-box inputs are observed like outputs when both sides box the same instance.
      auto i = imp.find_output(out.name);
      if (i && imp.outputs()[*i].auxiliary) {
        claim(used_outputs, out.name, out.name);
        m.outputs.push_back({out.name, out.name, 0, 0});
      }
      continue;
    }
    auto exists = [&](const std::string& n) { return imp.find_output(n).has_value(); };
    const std::string target = rename(out.name, NetClass::Output, rules, exists);
    if (exists(target)) {
      claim(used_outputs, target, out.name);
      m.outputs.push_back({out.name, target, 0, 0});
    } else {
      m.unmatched_spec.push_back(out.name);
    }
  }
  for (const auto& reg : spec.registers()) {
    auto exists = [&](const std::string& n) { return imp.find_register(n).has_value(); };
    const std::string target = rename(reg.name, NetClass::Register, rules, exists);
    if (exists(target)) {
      claim(used_registers, target, reg.name);
      m.registers.push_back({reg.name, target, PairTag::Candidate, std::nullopt, false});
    } else {
      m.unmatched_spec.push_back(reg.name);
    }
  }
  for (const auto& in : imp.inputs())
    if (in.role != InputRole::XSource && !used_inputs.count(in.name)) m.unmatched_imp.push_back(in.name);
  for (const auto& out : imp.outputs())
    if (!out.auxiliary && !used_outputs.count(out.name)) m.unmatched_imp.push_back(out.name);
  for (const auto& reg : imp.registers())
    if (!used_registers.count(reg.name)) m.unmatched_imp.push_back(reg.name);
  return m;
}

std::vector<RegisterPair> map_by_signature(const Netlist& spec, const Netlist& imp, const Signatures& spec_sigs,
                                           const Signatures& imp_sigs, const Mapping& existing) {
  if (!(spec_sigs.config() == imp_sigs.config()))
    throw Error(ErrorKind::SignatureMismatchConfig, "signature tables differ in runs, depth or seed");
  std::set<std::string> paired_spec, paired_imp;
  for (const auto& p : existing.registers) {
    paired_spec.insert(p.spec);
    paired_imp.insert(p.imp);
  }
  std::map<std::string, std::vector<size_t>> spec_by_key, imp_by_key;
  for (size_t r = 0; r < spec.registers().size(); ++r)
    if (!paired_spec.count(spec.registers()[r].name))
      spec_by_key[spec_sigs.key(Lit::make(spec.registers()[r].var))].push_back(r);
  for (size_t r = 0; r < imp.registers().size(); ++r)
    if (!paired_imp.count(imp.registers()[r].name))
      imp_by_key[imp_sigs.key(Lit::make(imp.registers()[r].var))].push_back(r);
  std::vector<RegisterPair> pairs;
  for (const auto& [key, regs] : spec_by_key) {
    auto it = imp_by_key.find(key);
    if (regs.size() != 1 || it == imp_by_key.end() || it->second.size() != 1) continue;
    pairs.push_back({spec.registers()[regs[0]].name, imp.registers()[it->second[0]].name, PairTag::Candidate,
                     std::nullopt, false});
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.spec < b.spec; });
  return pairs;
}

void add_signature_pairs(const Netlist& spec, const Netlist& imp, Mapping& mapping, const SignatureConfig& config) {
  std::map<std::string, std::string> stimulus_names;
  for (const auto& p : mapping.inputs) stimulus_names[p.imp] = p.spec;
  Signatures s(spec, config.runs, config.depth, config.seed);
  Signatures i(imp, config.runs, config.depth, config.seed, stimulus_names);
  for (auto& p : map_by_signature(spec, imp, s, i, mapping)) mapping.registers.push_back(std::move(p));
}

namespace {

constexpr int kBaseFrames = 5;
constexpr int kStepDepth = kRefineStepDepth;

/// Fresh activation literal a with a -> OR(lits).
sat::Literal activate_or(sat::Solver& solver, const std::vector<sat::Literal>& lits) {
  const sat::Literal a = sat::Literal::make(solver.new_var());
  std::vector<sat::Literal> clause{~a};
  clause.insert(clause.end(), lits.begin(), lits.end());
  solver.add_clause(clause);
  return a;
}

/// Speculative form of the induction step: inside the step frames every IMP
/// register of an assumed-equal pair is replaced by its SPEC partner, so
/// identical logic hashes together and most obligations close without SAT.
/// Replacing instead of constraining only adds behaviors, so an Unsat answer
/// is a proof. True when every alive pair is proven; otherwise the caller
/// falls back to the constrained step.
bool speculative_step(const EquivalenceTask& task, const Mapping& mapping, const std::vector<size_t>& open,
                      const std::vector<bool>& alive, uint64_t seed) {
  const Netlist& spec = *task.spec;
  const Netlist& imp = *task.imp;
  std::vector<std::optional<size_t>> partner(imp.registers().size());
  auto link = [&](const RegisterPair& rp) -> std::optional<std::pair<size_t, size_t>> {
    auto sr = spec.find_register(rp.spec);
    auto ir = imp.find_register(rp.imp);
    if (!sr || !ir || (partner[*ir] && *partner[*ir] != *sr)) return std::nullopt;
    partner[*ir] = *sr;
    return std::pair{*sr, *ir};
  };
  for (const auto& rp : mapping.registers)
    if ((rp.tag == PairTag::Proven || rp.tag == PairTag::Assumed) && !link(rp)) return false;
  std::vector<std::pair<size_t, size_t>> goals;
  for (size_t t = 0; t < open.size(); ++t) {
    if (!alive[t]) continue;
    auto g = link(mapping.registers[open[t]]);
    if (!g) return false;
    goals.push_back(*g);
  }
  std::vector<std::optional<size_t>> tied(imp.inputs().size());
  for (const auto& p : mapping.inputs) {
    auto si = spec.find_input(p.spec);
    auto ii = imp.find_input(p.imp);
    if (!si || !ii) return false;
    tied[*ii] = *si;
  }

  Netlist net;
  HashedBuilder hb(net);
  auto fresh = [&net] { return Lit::make(net.add_input("v" + std::to_string(net.inputs().size()))); };
  std::vector<Lit> ss(spec.registers().size()), is(imp.registers().size());
  for (auto& l : ss) l = fresh();
  for (size_t r = 0; r < is.size(); ++r) is[r] = partner[r] ? ss[*partner[r]] : fresh();
  std::vector<Lit> miters;
  for (int f = 0; f < kStepDepth; ++f) {
    NetlistCopier cs(spec, hb), ci(imp, hb);
    std::vector<Lit> spec_in(spec.inputs().size());
    for (size_t i = 0; i < spec_in.size(); ++i) {
      spec_in[i] = fresh();
      cs.bind(spec.inputs()[i].var, spec_in[i]);
    }
    for (size_t i = 0; i < imp.inputs().size(); ++i)
      ci.bind(imp.inputs()[i].var, tied[i] ? spec_in[*tied[i]] : fresh());
    for (size_t r = 0; r < ss.size(); ++r) cs.bind(spec.registers()[r].var, ss[r]);
    for (size_t r = 0; r < is.size(); ++r) ci.bind(imp.registers()[r].var, is[r]);
    std::vector<Lit> ns(ss.size()), ni(is.size());
    for (size_t r = 0; r < ss.size(); ++r) ns[r] = cs.copy(spec.registers()[r].next);
    if (f + 1 < kStepDepth) {
      for (size_t r = 0; r < is.size(); ++r) ni[r] = partner[r] ? ns[*partner[r]] : ci.copy(imp.registers()[r].next);
      ss = std::move(ns);
      is = std::move(ni);
    } else {
      for (const auto& [sr, ir] : goals) {
        const Lit m = hb.make_xor(ns[sr], ci.copy(imp.registers()[ir].next));
        if (m != kFalse) miters.push_back(m);
      }
    }
  }
  if (miters.empty()) return true;
  sat::Solver solver(seed);
  sat::Unroller u(net, solver, sat::InitMode::Free);
  std::vector<sat::Literal> differ;
  for (Lit m : miters) differ.push_back(u.lit(m, 0));
  return solver.solve({activate_or(solver, differ)}, task.engine.conflicts) == sat::Result::Unsat;
}

}  // namespace

Mapping refine_mapping(const EquivalenceTask& task) {
  Mapping result = task.mapping;
  std::vector<size_t> open;
  for (size_t i = 0; i < result.registers.size(); ++i)
    if (result.registers[i].tag == PairTag::Candidate) open.push_back(i);
  std::sort(open.begin(), open.end(),
            [&](size_t a, size_t b) { return result.registers[a].spec < result.registers[b].spec; });
  if (open.empty()) return result;

  ProductOptions opt;
  opt.outputs = false;
  for (size_t i : open) opt.targets.push_back({result.registers[i].spec, result.registers[i].imp});
  const ProductMachine pm = build_product(task, opt);
  const uint64_t seed = task.engine.seed ? task.engine.seed : sat::solver_seed_from_env();
  std::vector<bool> alive(open.size(), true);
  auto drop = [&](size_t t, std::optional<size_t> at) {
    alive[t] = false;
    auto& rp = result.registers[open[t]];
    rp.tag = PairTag::Dropped;
    rp.falsified_at = at;
    rp.induction_only = !at.has_value();
  };

  // Base: concrete runs from the initial state that separate a pair.
  {
    sat::Solver solver(seed);
    sat::Unroller u(pm.net, solver, sat::InitMode::Constrain);
    for (int f = 0; f < kBaseFrames; ++f) {
      for (Lit c : pm.constraints) solver.add_clause({u.lit(c, f)});
      for (;;) {
        std::vector<sat::Literal> differ;
        for (size_t t = 0; t < open.size(); ++t)
          if (alive[t]) differ.push_back(~u.lit(pm.targets[t], f));
        if (differ.empty()) return result;
        const sat::Literal a = activate_or(solver, differ);
        const sat::Result r = solver.solve({a}, task.engine.conflicts);
        solver.add_clause({~a});
        if (r == sat::Result::Unknown) return result;
        if (r == sat::Result::Unsat) break;
        for (size_t t = 0; t < open.size(); ++t) {
          if (!alive[t]) continue;
          for (int g = 0; g <= f; ++g) {
            auto enc = u.encoded(pm.targets[t], g);
            if (enc && !solver.model_value(*enc)) {
              drop(t, static_cast<size_t>(g));
              break;
            }
          }
        }
      }
    }
  }

  // Step: surviving pairs equal for kStepDepth frames from any state stay equal.
  if (speculative_step(task, result, open, alive, seed)) {
    for (size_t t = 0; t < open.size(); ++t)
      if (alive[t]) result.registers[open[t]].tag = PairTag::Proven;
    return result;
  }
  sat::Solver solver(seed);
  sat::Unroller u(pm.net, solver, sat::InitMode::Free);
  for (int f = 0; f <= kStepDepth; ++f)
    for (Lit c : pm.constraints) solver.add_clause({u.lit(c, f)});
  for (;;) {
    std::vector<sat::Literal> assumptions, differ;
    for (size_t t = 0; t < open.size(); ++t) {
      if (!alive[t]) continue;
      for (int f = 0; f < kStepDepth; ++f) assumptions.push_back(u.lit(pm.targets[t], f));
      differ.push_back(~u.lit(pm.targets[t], kStepDepth));
    }
    if (differ.empty()) return result;
    const sat::Literal a = activate_or(solver, differ);
    assumptions.push_back(a);
    const sat::Result r = solver.solve(assumptions, task.engine.conflicts);
    solver.add_clause({~a});
    if (r == sat::Result::Unknown) return result;
    if (r == sat::Result::Unsat) break;
    for (size_t t = 0; t < open.size(); ++t)
      if (alive[t] && !solver.model_value(*u.encoded(pm.targets[t], kStepDepth))) drop(t, std::nullopt);
  }
  for (size_t t = 0; t < open.size(); ++t)
    if (alive[t]) result.registers[open[t]].tag = PairTag::Proven;
  return result;
}

}  // namespace seqeq
