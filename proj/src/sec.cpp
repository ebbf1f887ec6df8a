#include "seqeq/sec.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <atomic>
#include <chrono>
#include <fstream>
#include <set>
#include <thread>

#include "seqeq/mapper.hpp"
#include "seqeq/sim.hpp"
#include "seqeq/snl.hpp"

namespace seqeq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Lit register_lit(const Netlist& netlist, size_t index) { return Lit::make(netlist.registers()[index].var); }

Lit output_net(const Netlist& netlist, const std::string& name, const char* side) {
  if (auto o = netlist.find_output(name)) return netlist.outputs()[*o].lit;
  if (auto l = netlist.find(name)) return *l;
  throw Error(ErrorKind::UnmappedOutput, std::string(side) + " has no output " + name);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text;
}

}  // namespace

Lit resolve_net(const Netlist& netlist, const std::string& name) {
  if (auto r = netlist.find_register(name)) return register_lit(netlist, *r);
  if (auto o = netlist.find_output(name)) return netlist.outputs()[*o].lit;
  if (auto l = netlist.find(name)) return *l;
  throw Error(ErrorKind::UnknownNet, name + " in " + netlist.name);
}

ProductMachine build_product(const EquivalenceTask& task, const ProductOptions& options) {
  const Netlist& spec = *task.spec;
  const Netlist& imp = *task.imp;
  ProductMachine pm;
  pm.mapping = task.mapping;
  pm.net.name = "product";
  HashedBuilder hb(pm.net);
  NetlistCopier cs(spec, hb, "spec:");
  NetlistCopier ci(imp, hb, "imp:");

  for (const auto& p : task.mapping.inputs) {
    auto si = spec.find_input(p.spec);
    auto ii = imp.find_input(p.imp);
    if (!si) throw Error(ErrorKind::UnknownNet, "SPEC input " + p.spec);
    if (!ii) throw Error(ErrorKind::UnknownNet, "IMP input " + p.imp);
    const uint32_t sv = spec.inputs()[*si].var;
    const uint32_t iv = imp.inputs()[*ii].var;
    if (cs.is_bound(sv) || ci.is_bound(iv)) throw Error(ErrorKind::DuplicateName, "input pair " + p.spec + "/" + p.imp);
    const Lit l = Lit::make(pm.net.add_input(p.spec, spec.inputs()[*si].role));
    cs.bind(sv, l);
    ci.bind(iv, l);
  }
  // Every free input exists in the product so traces are complete.
  for (const auto& in : spec.inputs()) cs.copy(Lit::make(in.var));
  for (const auto& in : imp.inputs()) ci.copy(Lit::make(in.var));

  if (options.merge_registers) {
    for (const auto& rp : task.mapping.registers) {
      if (rp.tag != PairTag::Proven && rp.tag != PairTag::Assumed) continue;
      auto sr = spec.find_register(rp.spec);
      auto ir = imp.find_register(rp.imp);
      if (!sr) throw Error(ErrorKind::UnknownNet, "SPEC register " + rp.spec);
      if (!ir) throw Error(ErrorKind::UnknownNet, "IMP register " + rp.imp);
      const uint32_t iv = imp.registers()[*ir].var;
      if (ci.is_bound(iv)) continue;
      const Lit s = cs.copy(register_lit(spec, *sr));
      ci.bind(iv, s);
      if (imp.registers()[*ir].init == Init::Uninit) pm.aliases.push_back({"imp:" + rp.imp, pm.net.node(s.var()).index});
    }
  }

  bool state_ref = false;
  auto resolver = [&](const std::string& id) -> std::optional<snl::Word> {
    auto bound = bind_identifier(spec, imp, id);
    if (!bound) return std::nullopt;
    if (!bound->input) state_ref = true;
    snl::Word word;
    for (const auto& bit : bound->bits) {
      if (bound->side == Side::Spec)
        word.push_back(cs.copy(*spec.find(bit)));
      else
        word.push_back(ci.copy(*imp.find(bit)));
    }
    return word;
  };
  auto predicate = [&](const std::string& text) {
    auto word = snl::elaborate_expression(snl::parse_expression(text), hb, resolver);
    return hb.make_or_all(word);
  };

  for (const auto& c : task.constraints) pm.constraints.push_back(predicate(c));
  for (const auto& c : options.extra_constraints) pm.constraints.push_back(predicate(c));
  pm.state_constraints = state_ref;
  for (const auto& p : options.predicates) pm.predicates.push_back(predicate(p));

  if (options.outputs) {
    if (task.mapping.outputs.empty()) throw Error(ErrorKind::UnmappedOutput, "mapping has no output pairs");
    if (!task.mapping.qualifier.empty()) pm.qualifier = predicate(task.mapping.qualifier);
    int top_all = 0;
    for (const auto& p : task.mapping.outputs) {
      if (p.spec_latency < 0 || p.imp_latency < 0)
        throw Error(ErrorKind::ConfigError, "negative latency for output " + p.spec);
      top_all = std::max({top_all, p.spec_latency, p.imp_latency});
    }
    pm.max_latency = top_all;
    std::vector<Lit> valid{kTrue};
    for (int j = 1; j <= top_all; ++j) {
      uint32_t idx = pm.net.add_register("valid#" + std::to_string(j), Init::Zero);
      pm.net.set_next(idx, valid.back());
      valid.push_back(register_lit(pm.net, idx));
    }
    auto delay = [&](Lit l, int cycles, const std::string& name) {
      for (int j = 1; j <= cycles; ++j) {
        uint32_t idx = pm.net.add_register(name + "#" + std::to_string(j), Init::Zero);
        pm.net.set_next(idx, l);
        l = register_lit(pm.net, idx);
      }
      return l;
    };
    for (const auto& p : task.mapping.outputs) {
      const int top = std::max(p.spec_latency, p.imp_latency);
      Lit s = delay(cs.copy(output_net(spec, p.spec, "SPEC")), top - p.spec_latency, "dly:spec:" + p.spec);
      Lit i = delay(ci.copy(output_net(imp, p.imp, "IMP")), top - p.imp_latency, "dly:imp:" + p.imp);
      pm.miters.push_back(hb.make_and(hb.make_and(hb.make_xor(s, i), valid[top]), pm.qualifier));
    }
    pm.bad = hb.make_or_all(pm.miters);
  }

  for (const auto& t : options.targets)
    pm.targets.push_back(hb.make_xnor(cs.copy(resolve_net(spec, t.spec)), ci.copy(resolve_net(imp, t.imp))));
  for (const auto& t : options.lemmas)
    pm.lemmas.push_back(hb.make_xnor(cs.copy(resolve_net(spec, t.spec)), ci.copy(resolve_net(imp, t.imp))));

  cs.close_registers();
  ci.close_registers();

  pm.net.add_output("bad", pm.bad);
  for (size_t i = 0; i < pm.miters.size(); ++i) pm.net.add_output("miter:" + task.mapping.outputs[i].spec, pm.miters[i]);
  for (size_t i = 0; i < pm.constraints.size(); ++i) pm.net.add_output("constraint#" + std::to_string(i), pm.constraints[i]);
  return pm;
}

Bmc::Bmc(const ProductMachine& pm, Lit bad, std::vector<Lit> every_frame, const EngineConfig& engine)
    : pm_(pm),
      bad_(bad),
      every_frame_(std::move(every_frame)),
      engine_(engine),
      solver_(engine.seed ? engine.seed : sat::solver_seed_from_env()),
      unroll_(pm.net, solver_, sat::InitMode::Constrain) {
  solver_.set_recording(!engine.dump_cnf_dir.empty());
}

sat::Result Bmc::check_frame(int frame) {
  for (Lit c : every_frame_) solver_.add_clause({unroll_.lit(c, frame)});
  const sat::Literal b = unroll_.lit(bad_, frame);
  const sat::Literal assumption[] = {b};
  const sat::Result r = solver_.solve(assumption, engine_.conflicts);
  if (!engine_.dump_cnf_dir.empty())
    write_file(engine_.dump_cnf_dir + "/bmc_" + std::to_string(frame) + ".cnf", solver_.dimacs(assumption));
  if (r == sat::Result::Unsat) {
    solver_.add_clause({~b});
    completed_ = frame;
  } else if (r == sat::Result::Sat) {
    failing_frame_ = frame;
  }
  return r;
}

sat::Result Bmc::extend(int depth) {
  for (int f = completed_ + 1; f <= depth; ++f) {
    sat::Result r = check_frame(f);
    if (r != sat::Result::Unsat) return r;
  }
  return sat::Result::Unsat;
}

bool Bmc::value(Lit lit, int frame) {
  auto enc = unroll_.encoded(lit, static_cast<size_t>(frame));
  return enc && solver_.model_value(*enc);
}

Trace Bmc::trace() const {
  Trace t;
  t.inputs.resize(static_cast<size_t>(failing_frame_ + 1));
  t.outputs.resize(t.inputs.size());
  auto val = [&](Lit l, size_t f) {
    auto enc = unroll_.encoded(l, f);
    return enc && solver_.model_value(*enc);
  };
  for (size_t f = 0; f < t.inputs.size(); ++f)
    for (const auto& in : pm_.net.inputs()) t.inputs[f][in.name] = tri_of(val(Lit::make(in.var), f));
  for (const auto& reg : pm_.net.registers())
    if (reg.init == Init::Uninit) t.registers[reg.name] = val(Lit::make(reg.var), 0);
  for (const auto& [key, idx] : pm_.aliases) t.registers[key] = val(register_lit(pm_.net, idx), 0);
  return t;
}

InductionStep::InductionStep(const ProductMachine& pm, Lit bad, std::vector<Lit> every_frame,
                             const EngineConfig& engine)
    : pm_(pm),
      bad_(bad),
      every_frame_(std::move(every_frame)),
      engine_(engine),
      solver_(engine.seed ? engine.seed : sat::solver_seed_from_env()),
      unroll_(pm.net, solver_, sat::InitMode::Free) {
  solver_.set_recording(!engine.dump_cnf_dir.empty());
}

void InductionStep::encode_frame(int frame) {
  for (Lit c : every_frame_) solver_.add_clause({unroll_.lit(c, frame)});
  for (size_t r = 0; r < pm_.net.registers().size(); ++r) unroll_.state(r, frame);
}

sat::Result InductionStep::check(int k) {
  while (frames_ <= k) encode_frame(frames_++);
  while (premises_ < k) solver_.add_clause({~unroll_.lit(bad_, premises_++)});
  std::set<std::pair<int, int>> distinct;
  const size_t regs = pm_.net.registers().size();
  for (;;) {
    const sat::Literal b = unroll_.lit(bad_, k);
    const sat::Literal assumption[] = {b};
    const sat::Result r = solver_.solve(assumption, engine_.conflicts);
    if (!engine_.dump_cnf_dir.empty())
      write_file(engine_.dump_cnf_dir + "/step_" + std::to_string(k) + ".cnf", solver_.dimacs(assumption));
    if (r != sat::Result::Sat) return r;

    // Lazily forbid repeated states along the step path.
    bool added = false;
    std::vector<std::vector<bool>> states(static_cast<size_t>(k + 1), std::vector<bool>(regs));
    for (int f = 0; f <= k; ++f)
      for (size_t i = 0; i < regs; ++i) states[f][i] = solver_.model_value(unroll_.state(i, f));
    for (int i = 0; i <= k && regs > 0; ++i) {
      for (int j = i + 1; j <= k; ++j) {
        if (states[i] != states[j] || distinct.count({i, j})) continue;
        std::vector<sat::Literal> any;
        for (size_t x = 0; x < regs; ++x) {
          const sat::Literal a = unroll_.state(x, i);
          const sat::Literal c = unroll_.state(x, j);
          const sat::Literal d = sat::Literal::make(solver_.new_var());
          solver_.add_clause({~d, a, c});
          solver_.add_clause({~d, ~a, ~c});
          any.push_back(d);
        }
        solver_.add_clause(any);
        distinct.insert({i, j});
        ++simple_paths_;
        added = true;
      }
    }
    if (added) continue;
    failing_.clear();
    for (size_t m = 0; m < pm_.miters.size(); ++m) {
      auto enc = unroll_.encoded(pm_.miters[m], static_cast<size_t>(k));
      if (enc && solver_.model_value(*enc)) failing_.push_back(m);
    }
    return r;
  }
}

bool constraints_satisfiable(const ProductMachine& pm, const EngineConfig& engine) {
  {
    sat::Solver solver(engine.seed ? engine.seed : sat::solver_seed_from_env());
    sat::Unroller u(pm.net, solver, sat::InitMode::Constrain);
    for (Lit c : pm.constraints) solver.add_clause({u.lit(c, 0)});
    if (solver.solve({}, engine.conflicts) == sat::Result::Unsat) return false;
  }
  if (pm.qualifier != kTrue) {
    sat::Solver solver(engine.seed ? engine.seed : sat::solver_seed_from_env());
    sat::Unroller u(pm.net, solver, sat::InitMode::Free);
    for (Lit c : pm.constraints) solver.add_clause({u.lit(c, 0)});
    if (solver.solve({u.lit(pm.qualifier, 0)}, engine.conflicts) == sat::Result::Unsat) return false;
  }
  return true;
}

namespace {

std::vector<Lit> every_frame_lits(const ProductMachine& pm) {
  std::vector<Lit> lits = pm.constraints;
  lits.insert(lits.end(), pm.lemmas.begin(), pm.lemmas.end());
  return lits;
}

/// Fills trace, mismatch data and per-output results from a failing BMC run.
void set_counterexample(Verdict& v, const EquivalenceTask& task, const ProductMachine& pm, const Bmc& b) {
  v.status = Status::NotEquivalent;
  v.method = "bmc";
  v.mismatch_cycle = static_cast<size_t>(b.failing_frame());
  v.bmc_depth = b.failing_frame() - 1;
  Trace trace = b.trace();
  std::set<std::string> failing;
  try {
    ReplayResult rr = replay(*task.spec, *task.imp, task.mapping, trace);
    trace = rr.annotated;
    for (const auto& cycle : trace.outputs)
      for (const auto& line : cycle)
        if (line.mismatch) failing.insert(line.spec);
    if (!rr.mismatch_cycle || *rr.mismatch_cycle != *v.mismatch_cycle)
      v.notes.push_back("replay disagrees with the engine on the mismatch cycle");
    v.mismatch_output = rr.mismatch_output;
  } catch (const Error& e) {
    v.notes.push_back(std::string("replay failed: ") + e.what());
  }
  if (v.mismatch_output.empty() && !pm.miters.empty()) v.mismatch_output = task.mapping.outputs.front().spec;
  v.trace = std::move(trace);
  v.outputs.clear();
  for (const auto& p : task.mapping.outputs)
    v.outputs.push_back({p.spec, p.imp, failing.count(p.spec) ? Status::NotEquivalent : Status::Inconclusive});
}

void set_all_outputs(Verdict& v, const EquivalenceTask& task, Status status) {
  v.outputs.clear();
  for (const auto& p : task.mapping.outputs) v.outputs.push_back({p.spec, p.imp, status});
}

enum class Phase { Both, BmcOnly, InductionOnly };

/// Interleaved BMC base / induction step on `bad`, then BMC-only up to the depth budget.
Verdict run_engines(const EquivalenceTask& task, const ProductMachine& pm, Lit bad, int k_max, int bmc_depth,
                    Phase phase = Phase::Both) {
  Verdict v;
  const auto every = every_frame_lits(pm);
  if (bad == kFalse) {
    v.status = Status::Equivalent;
    v.method = "structural";
    v.k = 0;
    set_all_outputs(v, task, Status::Equivalent);
    return v;
  }
  Bmc base(pm, bad, every, task.engine);
  auto finish_conflicts = [&](InductionStep* step) {
    v.conflicts = base.conflicts() + (step ? step->conflicts() : 0);
  };
  if (phase != Phase::BmcOnly) {
    InductionStep step(pm, bad, every, task.engine);
    for (int k = 1; k <= k_max; ++k) {
      sat::Result r = base.extend(k - 1);
      if (r == sat::Result::Sat) {
        set_counterexample(v, task, pm, base);
        finish_conflicts(&step);
        return v;
      }
      if (r == sat::Result::Unknown) {
        v.notes.push_back("conflict budget exhausted in BMC at frame " + std::to_string(base.completed() + 1));
        break;
      }
      r = step.check(k);
      if (r == sat::Result::Unsat) {
        v.status = Status::Equivalent;
        v.method = "k-induction";
        v.k = k;
        v.bmc_depth = base.completed();
        set_all_outputs(v, task, Status::Equivalent);
        finish_conflicts(&step);
        return v;
      }
      if (r == sat::Result::Unknown) {
        v.notes.push_back("conflict budget exhausted in induction step k=" + std::to_string(k));
        break;
      }
      v.k = k;
      if (!step.failing_miters().empty()) v.hardest_output = task.mapping.outputs[step.failing_miters().front()].spec;
    }
    finish_conflicts(&step);
  }
  if (phase != Phase::InductionOnly) {
    sat::Result r = base.extend(bmc_depth);
    if (r == sat::Result::Sat) {
      set_counterexample(v, task, pm, base);
      v.conflicts = std::max<int64_t>(v.conflicts, base.conflicts());
      return v;
    }
    if (r == sat::Result::Unknown)
      v.notes.push_back("conflict budget exhausted in BMC at frame " + std::to_string(base.completed() + 1));
  }
  v.status = Status::Inconclusive;
  v.method = phase == Phase::BmcOnly ? "bmc" : "k-induction";
  v.bmc_depth = base.completed();
  set_all_outputs(v, task, Status::Inconclusive);
  return v;
}

Verdict vacuous_verdict(const EquivalenceTask& task) {
  Verdict v;
  v.status = Status::Vacuous;
  v.method = "constraints";
  v.notes.push_back("constraints (with the qualifier) admit no behavior");
  set_all_outputs(v, task, Status::Vacuous);
  return v;
}

}  // namespace

Verdict bmc(const EquivalenceTask& task, int max_depth) {
  const auto start = Clock::now();
  ProductMachine pm = build_product(task);
  Verdict v = constraints_satisfiable(pm, task.engine) ? run_engines(task, pm, pm.bad, 0, max_depth, Phase::BmcOnly)
                                                       : vacuous_verdict(task);
  v.seconds = seconds_since(start);
  return v;
}

Verdict k_induction(const EquivalenceTask& task, int k_max) {
  const auto start = Clock::now();
  ProductMachine pm = build_product(task);
  Verdict v = constraints_satisfiable(pm, task.engine)
                  ? run_engines(task, pm, pm.bad, k_max, k_max - 1, Phase::InductionOnly)
                  : vacuous_verdict(task);
  v.seconds = seconds_since(start);
  return v;
}

std::vector<HelperResult> prove_helpers(const EquivalenceTask& task, const std::vector<NetPair>& candidates) {
  std::vector<HelperResult> results;
  for (const auto& c : candidates) results.push_back(HelperResult{c, false, 0, std::nullopt, "not inductive within k_max"});
  std::vector<bool> resolved(candidates.size(), false);
  std::vector<NetPair> proven;
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (resolved[i]) continue;
      ProductOptions opt;
      opt.outputs = false;
      opt.targets = {candidates[i]};
      opt.lemmas = proven;
      ProductMachine pm = build_product(task, opt);
      Verdict v = run_engines(task, pm, !pm.targets.front(), task.engine.k_max, task.engine.k_max - 1,
                              Phase::InductionOnly);
      if (v.status == Status::Equivalent) {
        results[i].proven = true;
        results[i].k = v.k;
        results[i].reason = proven.empty() ? "proven" : "proven assuming earlier helpers";
        resolved[i] = true;
        proven.push_back(candidates[i]);
        changed = true;
      } else if (v.status == Status::NotEquivalent) {
        results[i].falsified_at = v.mismatch_cycle;
        results[i].reason = "differs at cycle " + std::to_string(*v.mismatch_cycle);
        resolved[i] = true;
      }
    }
  }
  return results;
}

namespace {

std::string witness_text(const ProductMachine& pm, sat::Solver& solver, sat::Unroller& u) {
  std::map<std::string, uint64_t> words;
  std::map<std::string, bool> scalars;
  for (const auto& in : pm.net.inputs()) {
    auto enc = u.encoded(Lit::make(in.var), 0);
    if (!enc) continue;
    const bool v = solver.model_value(*enc);
    auto [base, idx] = snl::split_bit_name(in.name);
    if (idx < 0)
      scalars[in.name] = v;
    else if (idx < 64)
      words[base] |= static_cast<uint64_t>(v) << idx;
  }
  std::string out;
  for (const auto& [name, v] : scalars) out += (out.empty() ? "" : " ") + name + "=" + (v ? "1" : "0");
  for (const auto& [name, v] : words) out += (out.empty() ? "" : " ") + name + "=" + std::to_string(v);
  return out.empty() ? "(any input)" : out;
}

}  // namespace

Verdict case_split(const EquivalenceTask& task) {
  const auto start = Clock::now();
  EquivalenceTask base = task;
  base.cases.clear();

  {
    ProductOptions opt;
    opt.outputs = false;
    for (const auto& c : task.cases) opt.predicates.push_back(c.predicate);
    ProductMachine pm = build_product(base, opt);
    sat::Solver solver(task.engine.seed ? task.engine.seed : sat::solver_seed_from_env());
    sat::Unroller u(pm.net, solver, sat::InitMode::Free);
    for (Lit c : pm.constraints) solver.add_clause({u.lit(c, 0)});
    for (Lit p : pm.predicates) solver.add_clause({~u.lit(p, 0)});
    for (const auto& in : pm.net.inputs()) u.lit(Lit::make(in.var), 0);
    const sat::Result r = solver.solve({}, task.engine.conflicts);
    if (r == sat::Result::Sat) throw Error(ErrorKind::IncompleteSplit, witness_text(pm, solver, u));
    if (r == sat::Result::Unknown)
      throw Error(ErrorKind::IncompleteSplit, "completeness check exhausted its conflict budget");
  }

  std::vector<Verdict> results(task.cases.size());
  std::vector<double> times(task.cases.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < task.cases.size(); i = next++) {
      const auto t0 = Clock::now();
      EquivalenceTask sub = base;
      sub.constraints.push_back(task.cases[i].predicate);
      results[i] = check_sec(sub);
      times[i] = seconds_since(t0);
    }
  };
  const size_t jobs = std::clamp<size_t>(static_cast<size_t>(std::max(1, task.engine.jobs)), 1, task.cases.size());
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> threads;
  for (size_t j = 0; j < jobs; ++j)
    threads.emplace_back([&, j] {
      try {
        worker();
      } catch (...) {
        errors[j] = std::current_exception();
        next = task.cases.size();
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  Verdict v;
  v.method = "case-split";
  size_t equivalent = 0, vacuous = 0;
  std::optional<size_t> failing;
  for (size_t i = 0; i < results.size(); ++i) {
    const Verdict& r = results[i];
    v.cases.push_back(CaseResult{task.cases[i].name, task.cases[i].predicate, r.status, r.k, r.bmc_depth,
                                 r.mismatch_cycle, times[i]});
    v.conflicts += r.conflicts;
    v.k = std::max(v.k, r.k);
    if (r.status == Status::NotEquivalent && !failing) failing = i;
    if (r.status == Status::Equivalent) ++equivalent;
    if (r.status == Status::Vacuous) ++vacuous;
  }
  if (failing) {
    const Verdict& r = results[*failing];
    v.status = Status::NotEquivalent;
    v.trace = r.trace;
    v.mismatch_cycle = r.mismatch_cycle;
    v.mismatch_output = r.mismatch_output;
    v.outputs = r.outputs;
    v.bmc_depth = r.bmc_depth;
    v.notes.push_back("falsified in case " + task.cases[*failing].name);
  } else if (vacuous == results.size()) {
    v.status = Status::Vacuous;
    set_all_outputs(v, task, Status::Vacuous);
  } else if (equivalent + vacuous == results.size()) {
    v.status = Status::Equivalent;
    set_all_outputs(v, task, Status::Equivalent);
    if (vacuous) v.notes.push_back(std::to_string(vacuous) + " vacuous case(s)");
  } else {
    v.status = Status::Inconclusive;
    set_all_outputs(v, task, Status::Inconclusive);
  }
  v.seconds = seconds_since(start);
  return v;
}

namespace {

/// Register correspondence on the product machine. Registers of either side
/// that agree (up to complement, or with a constant) on every simulated run
/// from reset form candidate classes; classes are split on counterexamples to
/// a one-step induction that assumes all classes, until the rest is
/// inductive. Survivors hold in every reachable state and are added to
/// `pm.lemmas`. Returns the number of lemmas added.
size_t add_register_correspondence(ProductMachine& pm, const EngineConfig& engine) {
  constexpr size_t kWords = 4, kCycles = 16, kNone = SIZE_MAX;
  constexpr int kMaxRounds = 200;
  const Netlist& net = pm.net;
  const size_t nr = net.registers().size();
  if (nr == 0) return 0;

  PackedSim sim(net, kWords);
  sim.reset();
  std::vector<std::vector<uint64_t>> sig(nr);
  std::vector<bool> definite(nr, true);
  for (size_t c = 0; c < kCycles; ++c) {
    for (size_t i = 0; i < net.inputs().size(); ++i) {
      std::array<uint64_t, kWords> one, zero;
      for (size_t w = 0; w < kWords; ++w) {
        one[w] = stimulus_word(net.inputs()[i].name, engine.seed, c, w);
        zero[w] = ~one[w];
      }
      sim.set_input(i, one, zero);
    }
    sim.eval();
    for (size_t r = 0; r < nr; ++r) {
      const Lit l = Lit::make(net.registers()[r].var);
      auto o = sim.one(l), z = sim.zero(l);
      for (size_t w = 0; w < kWords; ++w) {
        if ((o[w] | z[w]) != ~uint64_t{0}) definite[r] = false;
        sig[r].push_back(o[w]);
      }
    }
    sim.step();
  }

  // A member is a register (or kNone for constant FALSE) and its polarity
  // relative to the class value.
  struct Member {
    size_t reg;
    bool pol;
  };
  std::map<std::vector<uint64_t>, std::vector<Member>> groups;
  for (size_t r = 0; r < nr; ++r) {
    if (!definite[r]) continue;
    const bool pol = sig[r][0] & 1;
    if (pol)
      for (auto& w : sig[r]) w = ~w;
    groups[sig[r]].push_back({r, pol});
  }
  std::vector<std::vector<Member>> classes;
  for (auto& [s, members] : groups) {
    if (std::all_of(s.begin(), s.end(), [](uint64_t w) { return w == 0; }))
      members.insert(members.begin(), Member{kNone, false});
    if (members.size() > 1) classes.push_back(std::move(members));
  }

  const uint64_t seed = engine.seed ? engine.seed : sat::solver_seed_from_env();
  for (int round = 0;; ++round) {
    if (classes.empty()) return 0;
    if (round == kMaxRounds) return 0;
    Netlist step;
    HashedBuilder hb(step);
    auto fresh = [&step] { return Lit::make(step.add_input("v" + std::to_string(step.inputs().size()))); };
    NetlistCopier cp(net, hb);
    for (const auto& in : net.inputs()) cp.bind(in.var, fresh());
    std::vector<bool> bound(nr, false);
    for (const auto& cls : classes) {
      const Lit value = cls.front().reg == kNone ? kFalse : fresh();
      for (const auto& m : cls)
        if (m.reg != kNone) {
          cp.bind(net.registers()[m.reg].var, m.pol ? !value : value);
          bound[m.reg] = true;
        }
    }
    for (size_t r = 0; r < nr; ++r)
      if (!bound[r]) cp.bind(net.registers()[r].var, fresh());
    // Next-state value of each member, normalized to the class polarity.
    std::vector<std::vector<Lit>> next(classes.size());
    std::vector<Lit> miters;
    for (size_t k = 0; k < classes.size(); ++k) {
      for (const auto& m : classes[k]) {
        const Lit n = m.reg == kNone ? kFalse : cp.copy(net.registers()[m.reg].next);
        next[k].push_back(m.pol ? !n : n);
      }
      for (size_t j = 1; j < next[k].size(); ++j) {
        const Lit d = hb.make_xor(next[k][0], next[k][j]);
        if (d != kFalse) miters.push_back(d);
      }
    }
    if (miters.empty()) break;
    sat::Solver solver(seed);
    sat::Unroller u(step, solver, sat::InitMode::Free);
    std::vector<sat::Literal> clause;
    const sat::Literal act = sat::Literal::make(solver.new_var());
    clause.push_back(~act);
    for (Lit d : miters) clause.push_back(u.lit(d, 0));
    solver.add_clause(clause);
    std::vector<std::vector<sat::Literal>> enc(classes.size());
    for (size_t k = 0; k < classes.size(); ++k)
      for (Lit n : next[k]) enc[k].push_back(u.lit(n, 0));
    const sat::Result r = solver.solve({act}, engine.conflicts);
    if (r == sat::Result::Unknown) return 0;
    if (r == sat::Result::Unsat) break;
    std::vector<std::vector<Member>> split;
    for (size_t k = 0; k < classes.size(); ++k) {
      std::vector<Member> part[2];
      for (size_t j = 0; j < classes[k].size(); ++j) part[solver.model_value(enc[k][j])].push_back(classes[k][j]);
      for (auto& p : part)
        if (p.size() > 1) split.push_back(std::move(p));
    }
    classes = std::move(split);
  }

  HashedBuilder hb(pm.net);
  size_t added = 0;
  for (const auto& cls : classes) {
    auto lit_of = [&](const Member& m) {
      if (m.reg == kNone) return kFalse;
      const Lit l = Lit::make(pm.net.registers()[m.reg].var);
      return m.pol ? !l : l;
    };
    const Lit ref = lit_of(cls.front());
    for (size_t j = 1; j < cls.size(); ++j) {
      pm.lemmas.push_back(hb.make_xnor(ref, lit_of(cls[j])));
      ++added;
    }
  }
  return added;
}

}  // namespace

Verdict check_sec(const EquivalenceTask& task) {
  if (!task.cases.empty()) return case_split(task);
  const auto start = Clock::now();
  EquivalenceTask t = task;
  t.spec = std::make_shared<const Netlist>(structural_hash(*task.spec));
  t.imp = std::make_shared<const Netlist>(structural_hash(*task.imp));

  {
    ProductMachine probe = build_product(t);
    if (!constraints_satisfiable(probe, t.engine)) {
      Verdict v = vacuous_verdict(t);
      v.seconds = seconds_since(start);
      return v;
    }
  }

  std::vector<std::string> notes;
  size_t refined = 0;
  const bool has_candidates = std::any_of(t.mapping.registers.begin(), t.mapping.registers.end(),
                                          [](const RegisterPair& p) { return p.tag == PairTag::Candidate; });
  if (t.engine.refine && has_candidates) {
    t.mapping = refine_mapping(t);
    size_t proven = 0, dropped = 0, open = 0;
    for (const auto& p : t.mapping.registers) {
      proven += p.tag == PairTag::Proven;
      dropped += p.tag == PairTag::Dropped;
      open += p.tag == PairTag::Candidate;
      if (p.tag == PairTag::Dropped && p.induction_only)
        notes.push_back("register pair " + p.spec + "/" + p.imp + " dropped without a concrete differing trace");
    }
    refined = proven;
    notes.push_back("mapping refinement: " + std::to_string(proven) + " proven, " + std::to_string(dropped) +
                    " dropped, " + std::to_string(open) + " unresolved");
  }

  std::vector<NetPair> lemmas;
  std::vector<std::string> helpers_used;
  if (!t.helpers.empty()) {
    for (const auto& h : prove_helpers(t, t.helpers)) {
      if (h.proven) {
        lemmas.push_back(h.pair);
        helpers_used.push_back(h.pair.spec + "=" + h.pair.imp);
      } else {
        notes.push_back("helper " + h.pair.spec + "=" + h.pair.imp + " discarded: " + h.reason);
      }
    }
  }

  ProductOptions opt;
  opt.lemmas = lemmas;
  ProductMachine pm = build_product(t, opt);
  if (pm.state_constraints) notes.push_back("constraints reference design state");
  if (t.engine.refine && pm.bad != kFalse) {
    if (size_t n = add_register_correspondence(pm, t.engine))
      notes.push_back("register correspondence: " + std::to_string(n) + " lemmas");
  }
  Verdict v = run_engines(t, pm, pm.bad, t.engine.k_max, t.engine.bmc_depth);
  if (v.status == Status::Equivalent && v.method == "structural" && refined > 0) {
    // The register pairs carry the proof: a joint induction of kRefineStepDepth.
    v.method = "k-induction";
    v.k = kRefineStepDepth;
  }
  v.helpers_used = helpers_used;
  v.notes.insert(v.notes.begin(), notes.begin(), notes.end());
  v.seconds = seconds_since(start);
  return v;
}

}  // namespace seqeq
