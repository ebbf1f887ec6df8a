#include "seqeq/cec.hpp"

#include <chrono>
#include <map>
#include <set>

#include "seqeq/sat.hpp"
#include "seqeq/sec.hpp"
#include "seqeq/sim.hpp"
#include "seqeq/snl.hpp"

namespace seqeq {

Miter build_miter(const Netlist& spec, const Netlist& imp, const Mapping& mapping,
                  const std::vector<std::string>& constraints) {
  std::set<std::string> spec_regs, imp_regs;
  for (const auto& p : mapping.registers) {
    if (p.tag == PairTag::Dropped) continue;
    spec_regs.insert(p.spec);
    imp_regs.insert(p.imp);
  }
  for (const auto& r : spec.registers())
    if (!spec_regs.count(r.name)) throw Error(ErrorKind::UnmappedState, "SPEC register " + r.name);
  for (const auto& r : imp.registers())
    if (!imp_regs.count(r.name)) throw Error(ErrorKind::UnmappedState, "IMP register " + r.name);
  if (mapping.outputs.empty()) throw Error(ErrorKind::UnmappedOutput, "mapping has no output pairs");

  Miter m;
  m.net.name = "miter";
  HashedBuilder hb(m.net);
  NetlistCopier cs(spec, hb, "spec:");
  NetlistCopier ci(imp, hb, "imp:");
  for (const auto& p : mapping.inputs) {
    auto si = spec.find_input(p.spec);
    auto ii = imp.find_input(p.imp);
    if (!si) throw Error(ErrorKind::UnknownNet, "SPEC input " + p.spec);
    if (!ii) throw Error(ErrorKind::UnknownNet, "IMP input " + p.imp);
    const Lit l = Lit::make(m.net.add_input(p.spec, spec.inputs()[*si].role));
    cs.bind(spec.inputs()[*si].var, l);
    ci.bind(imp.inputs()[*ii].var, l);
  }
  std::vector<std::pair<size_t, size_t>> reg_pairs;
  for (const auto& p : mapping.registers) {
    if (p.tag == PairTag::Dropped) continue;
    auto sr = spec.find_register(p.spec);
    auto ir = imp.find_register(p.imp);
    if (!sr) throw Error(ErrorKind::UnknownNet, "SPEC register " + p.spec);
    if (!ir) throw Error(ErrorKind::UnknownNet, "IMP register " + p.imp);
    const uint32_t sv = spec.registers()[*sr].var;
    const uint32_t iv = imp.registers()[*ir].var;
    if (cs.is_bound(sv) || ci.is_bound(iv)) throw Error(ErrorKind::DuplicateName, "register pair " + p.spec);
    const Lit l = Lit::make(m.net.add_input("reg:" + p.spec));
    cs.bind(sv, l);
    ci.bind(iv, l);
    reg_pairs.push_back({*sr, *ir});
    m.register_names.push_back(p.spec);
  }

  auto resolver = [&](const std::string& id) -> std::optional<snl::Word> {
    auto bound = bind_identifier(spec, imp, id);
    if (!bound) return std::nullopt;
    snl::Word word;
    for (const auto& bit : bound->bits)
      word.push_back(bound->side == Side::Spec ? cs.copy(*spec.find(bit)) : ci.copy(*imp.find(bit)));
    return word;
  };
  auto predicate = [&](const std::string& text) {
    return hb.make_or_all(snl::elaborate_expression(snl::parse_expression(text), hb, resolver));
  };
  const Lit qualifier = mapping.qualifier.empty() ? kTrue : predicate(mapping.qualifier);
  for (const auto& c : constraints) m.constraints.push_back(predicate(c));

  for (const auto& p : mapping.outputs) {
    if (p.spec_latency != 0 || p.imp_latency != 0)
      throw Error(ErrorKind::ConfigError, "combinational check needs zero latency on output " + p.spec);
    auto so = spec.find_output(p.spec);
    auto io = imp.find_output(p.imp);
    if (!so) throw Error(ErrorKind::UnmappedOutput, "SPEC has no output " + p.spec);
    if (!io) throw Error(ErrorKind::UnmappedOutput, "IMP has no output " + p.imp);
    const Lit x = hb.make_xor(cs.copy(spec.outputs()[*so].lit), ci.copy(imp.outputs()[*io].lit));
    m.outputs.push_back(hb.make_and(x, qualifier));
    m.output_names.push_back(p.spec);
  }
  for (auto [s, i] : reg_pairs)
    m.next_states.push_back(hb.make_xor(cs.copy(spec.registers()[s].next), ci.copy(imp.registers()[i].next)));
  // Side-specific inputs appear even when unused so traces stay complete.
  for (const auto& in : spec.inputs()) cs.copy(Lit::make(in.var));
  for (const auto& in : imp.inputs()) ci.copy(Lit::make(in.var));
  for (size_t i = 0; i < m.outputs.size(); ++i) m.net.add_output("miter:" + m.output_names[i], m.outputs[i]);
  for (size_t i = 0; i < m.next_states.size(); ++i) m.net.add_output("next:" + m.register_names[i], m.next_states[i]);
  return m;
}

SweepResult sweep(const Miter& miter, size_t runs, uint64_t seed, int64_t conflicts_per_pair) {
  const Netlist& src = miter.net;
  SweepResult out;
  out.net.name = src.name + ".swept";
  HashedBuilder hb(out.net);

  Signatures sigs(src, runs, 0, seed);
  sat::Solver solver(seed ? seed : sat::solver_seed_from_env());
  sat::Unroller u(src, solver, sat::InitMode::Free);
  for (Lit c : miter.constraints) solver.add_clause({u.lit(c, 0)});

  std::vector<Lit> image(src.num_vars(), kFalse);
  for (const auto& in : src.inputs()) image[in.var] = Lit::make(out.net.add_input(in.name, in.role));

  // Classes keyed by phase-normalized signature; members are representatives.
  std::map<std::string, std::vector<Lit>> classes;
  auto normalized = [&](Lit l) {
    std::string k0 = sigs.key(l), k1 = sigs.key(!l);
    return k1 < k0 ? std::pair{k1, true} : std::pair{k0, false};
  };
  {
    auto [k, flip] = normalized(kFalse);
    classes[k].push_back(kFalse ^ flip);
  }
  for (const auto& in : src.inputs()) {
    auto [k, flip] = normalized(Lit::make(in.var));
    classes[k].push_back(Lit::make(in.var) ^ flip);
  }
  auto map_lit = [&](Lit l) { return image[l.var()] ^ l.inverted(); };

  for (uint32_t v : topological_ands(src)) {
    const Node& n = src.node(v);
    image[v] = hb.make_and(map_lit(n.left), map_lit(n.right));
    const Lit self = Lit::make(v);
    auto [key, flip] = normalized(self);
    auto& members = classes[key];
    bool merged = false;
    // Try a few representatives; each refutation keeps the node separate.
    for (size_t i = 0; i < members.size() && i < 4 && !merged; ++i) {
      const Lit rep = members[i];        // normalized phase
      const Lit node = self ^ flip;      // same phase as rep
      ++out.candidates;
      const sat::Literal a = u.lit(rep, 0);
      const sat::Literal b = u.lit(node, 0);
      sat::Result r1 = solver.solve({a, ~b}, conflicts_per_pair);
      sat::Result r2 = r1 == sat::Result::Unsat ? solver.solve({~a, b}, conflicts_per_pair) : r1;
      if (r1 == sat::Result::Unsat && r2 == sat::Result::Unsat) {
        solver.add_clause({~a, b});
        solver.add_clause({a, ~b});
        image[v] = map_lit(rep) ^ flip;
        out.merges.push_back({rep ^ flip, self});
        merged = true;
      } else {
        ++out.refuted;
      }
    }
    if (!merged) members.push_back(self ^ flip);
  }
  for (Lit l : miter.outputs) out.outputs.push_back(map_lit(l));
  for (Lit l : miter.next_states) out.next_states.push_back(map_lit(l));
  for (Lit l : miter.constraints) out.constraints.push_back(map_lit(l));
  for (size_t i = 0; i < out.outputs.size(); ++i) out.net.add_output("miter:" + miter.output_names[i], out.outputs[i]);
  return out;
}

namespace {

Verdict vacuous(const EquivalenceTask& task) {
  Verdict v;
  v.status = Status::Vacuous;
  v.method = "sweep";
  v.notes.push_back("constraints (with the qualifier) admit no behavior");
  for (const auto& p : task.mapping.outputs) v.outputs.push_back({p.spec, p.imp, Status::Vacuous});
  return v;
}

}  // namespace

Verdict check_cec(const EquivalenceTask& task) {
  const auto start = std::chrono::steady_clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  EquivalenceTask t = task;
  t.spec = std::make_shared<const Netlist>(structural_hash(*task.spec));
  t.imp = std::make_shared<const Netlist>(structural_hash(*task.imp));
  const Miter miter = build_miter(*t.spec, *t.imp, t.mapping, t.constraints);
  const uint64_t seed = t.engine.seed ? t.engine.seed : sat::solver_seed_from_env();

  {
    ProductMachine pm = build_product(t, ProductOptions{.outputs = !t.mapping.qualifier.empty()});
    if (!constraints_satisfiable(pm, t.engine)) {
      Verdict v = vacuous(t);
      v.seconds = seconds();
      return v;
    }
  }

  const SweepResult swept = sweep(miter, 256, t.engine.seed, std::min<int64_t>(t.engine.conflicts, 1000));
  sat::Solver solver(seed);
  sat::Unroller u(swept.net, solver, sat::InitMode::Free);
  for (Lit c : swept.constraints) solver.add_clause({u.lit(c, 0)});

  Verdict v;
  v.method = "sweep";
  v.notes.push_back(std::to_string(swept.merges.size()) + " internal merges from " +
                    std::to_string(swept.candidates) + " candidates");
  bool outputs_differ = false, unknown = false;
  std::vector<Status> per_output;
  for (Lit o : swept.outputs) {
    const sat::Result r = o == kFalse ? sat::Result::Unsat : solver.solve({u.lit(o, 0)}, t.engine.conflicts);
    per_output.push_back(r == sat::Result::Unsat ? Status::Equivalent : Status::Inconclusive);
    outputs_differ |= r == sat::Result::Sat;
    unknown |= r == sat::Result::Unknown;
  }
  std::vector<std::string> state_mismatch;
  for (size_t i = 0; i < swept.next_states.size(); ++i) {
    const Lit n = swept.next_states[i];
    const sat::Result r = n == kFalse ? sat::Result::Unsat : solver.solve({u.lit(n, 0)}, t.engine.conflicts);
    if (r != sat::Result::Unsat) state_mismatch.push_back(miter.register_names[i]);
    unknown |= r == sat::Result::Unknown;
  }
  std::vector<std::string> init_mismatch;
  for (const auto& p : t.mapping.registers) {
    if (p.tag == PairTag::Dropped) continue;
    const Init a = t.spec->registers()[*t.spec->find_register(p.spec)].init;
    const Init b = t.imp->registers()[*t.imp->find_register(p.imp)].init;
    if (a != b || a == Init::Uninit) init_mismatch.push_back(p.spec);
  }
  v.conflicts = solver.conflicts();

  if (!outputs_differ && !unknown && state_mismatch.empty() && init_mismatch.empty()) {
    v.status = Status::Equivalent;
    for (const auto& p : t.mapping.outputs) v.outputs.push_back({p.spec, p.imp, Status::Equivalent});
    v.seconds = seconds();
    return v;
  }

  // A difference over arbitrary cut states is only a real failure if it is
  // reachable; confirm from the initial state.
  Verdict confirm = bmc(t, t.engine.bmc_depth);
  if (confirm.status == Status::NotEquivalent) {
    confirm.method = "sweep+bmc";
    confirm.notes.insert(confirm.notes.begin(), v.notes.begin(), v.notes.end());
    confirm.conflicts += v.conflicts;
    confirm.seconds = seconds();
    return confirm;
  }
  v.status = Status::Inconclusive;
  v.bmc_depth = confirm.bmc_depth;
  if (outputs_differ) v.notes.push_back("outputs differ only from unreachable or unconfirmed cut states");
  if (!state_mismatch.empty())
    v.notes.push_back("next-state functions differ for " + std::to_string(state_mismatch.size()) +
                      " register pair(s), first " + state_mismatch.front() + "; use the sequential check");
  if (!init_mismatch.empty())
    v.notes.push_back("initial values differ or are uninitialized for " + init_mismatch.front());
  if (unknown) v.notes.push_back("conflict budget exhausted");
  for (size_t i = 0; i < t.mapping.outputs.size(); ++i)
    v.outputs.push_back({t.mapping.outputs[i].spec, t.mapping.outputs[i].imp,
                         state_mismatch.empty() && init_mismatch.empty() ? per_output[i] : Status::Inconclusive});
  v.seconds = seconds();
  return v;
}

}  // namespace seqeq
