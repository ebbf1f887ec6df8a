#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "seqeq/bench.hpp"
#include "seqeq/sim.hpp"

namespace seqeq::bench {

namespace {

/// Two-valued evaluator for one netlist.
class Eval {
 public:
  explicit Eval(const Netlist& n) : n_(n), order_(topological_ands(n)), val_(n.num_vars(), 0) {}

  void load(const std::vector<char>& state, size_t state_offset, const std::vector<char>& inputs,
            const std::vector<size_t>& input_slots) {
    for (size_t r = 0; r < n_.registers().size(); ++r) val_[n_.registers()[r].var] = state[state_offset + r];
    for (size_t i = 0; i < n_.inputs().size(); ++i) val_[n_.inputs()[i].var] = inputs[input_slots[i]];
    for (uint32_t v : order_) {
      const Node& nd = n_.node(v);
      val_[v] = get(nd.left) & get(nd.right);
    }
  }
  char get(Lit l) const { return static_cast<char>(val_[l.var()] ^ l.inverted()); }
  const Netlist& netlist() const { return n_; }

 private:
  const Netlist& n_;
  std::vector<uint32_t> order_;
  std::vector<char> val_;
};

struct BoundProbe {
  Probe probe;
  std::vector<char> values;
  bool eval(const Eval& s, const Eval& i) {
    values.resize(probe.sources().size());
    for (size_t k = 0; k < values.size(); ++k) {
      const auto& src = probe.sources()[k];
      values[k] = src.side == Side::Spec ? s.get(src.net) : i.get(src.net);
    }
    return probe.eval(values);
  }
};

Lit output_lit(const Netlist& n, const std::string& name) {
  if (auto o = n.find_output(name)) return n.outputs()[*o].lit;
  if (auto l = n.find(name)) return *l;
  throw Error(ErrorKind::UnmappedOutput, name);
}

}  // namespace

std::optional<Status> oracle_check(const EquivalenceTask& task, const OracleLimits& limits) {
  const Netlist& spec = *task.spec;
  const Netlist& imp = *task.imp;
  const Mapping& m = task.mapping;
  if (m.outputs.empty()) throw Error(ErrorKind::UnmappedOutput, "mapping has no output pairs");

  // Input slots: one per distinct trace key.
  const TraceInputs names = trace_input_names(spec, imp, m);
  std::map<std::string, size_t> slot_of;
  for (const auto& n : names.spec_names) slot_of.emplace(n, slot_of.size());
  for (const auto& n : names.imp_names) slot_of.emplace(n, slot_of.size());
  const size_t nin = slot_of.size();
  if (nin > limits.max_input_bits) return std::nullopt;
  std::vector<size_t> spec_slots, imp_slots;
  for (const auto& n : names.spec_names) spec_slots.push_back(slot_of.at(n));
  for (const auto& n : names.imp_names) imp_slots.push_back(slot_of.at(n));

  Eval es(spec), ei(imp);
  std::vector<BoundProbe> constraints;
  for (const auto& c : task.constraints) constraints.push_back({Probe(spec, imp, c), {}});
  std::optional<BoundProbe> qualifier;
  if (!m.qualifier.empty()) qualifier = BoundProbe{Probe(spec, imp, m.qualifier), {}};

  int top = 0;
  for (const auto& p : m.outputs) top = std::max({top, p.spec_latency, p.imp_latency});
  struct Pair {
    Lit s, i;
    int ds, di;  // delay applied to each side
  };
  std::vector<Pair> pairs;
  for (const auto& p : m.outputs)
    pairs.push_back({output_lit(spec, p.spec), output_lit(imp, p.imp), top - p.spec_latency, top - p.imp_latency});

  // State layout: spec regs, imp regs, per pair delay history (newest first), valid counter bits.
  const size_t ns = spec.registers().size(), ni = imp.registers().size();
  size_t hist = 0;
  for (const auto& p : pairs) hist += static_cast<size_t>(p.ds + p.di);
  const size_t base = ns + ni;
  const size_t count_at = base + hist;
  const size_t width = count_at + 1;  // counter stored as one byte

  auto constraints_hold = [&] {
    for (auto& c : constraints)
      if (!c.eval(es, ei)) return false;
    return true;
  };
  std::vector<char> inputs(nin);
  auto set_inputs = [&](uint64_t bits) {
    for (size_t k = 0; k < nin; ++k) inputs[k] = static_cast<char>((bits >> k) & 1);
  };
  auto load = [&](const std::vector<char>& st) {
    es.load(st, 0, inputs, spec_slots);
    ei.load(st, ns, inputs, imp_slots);
  };

  // Initial states: every choice of the UNINIT registers.
  std::vector<size_t> uninit;
  std::vector<char> init(width, 0);
  for (size_t r = 0; r < ns; ++r) {
    init[r] = spec.registers()[r].init == Init::One;
    if (spec.registers()[r].init == Init::Uninit) uninit.push_back(r);
  }
  for (size_t r = 0; r < ni; ++r) {
    init[ns + r] = imp.registers()[r].init == Init::One;
    if (imp.registers()[r].init == Init::Uninit) uninit.push_back(ns + r);
  }
  if (uninit.size() + nin > limits.max_free_bits) return std::nullopt;

  std::vector<std::vector<char>> frontier;
  for (uint64_t u = 0; u < (uint64_t{1} << uninit.size()); ++u) {
    std::vector<char> st = init;
    for (size_t k = 0; k < uninit.size(); ++k) st[uninit[k]] = static_cast<char>((u >> k) & 1);
    frontier.push_back(std::move(st));
  }

  // Vacuity as the engines define it.
  {
    bool any = false;
    for (const auto& st : frontier) {
      for (uint64_t x = 0; x < (uint64_t{1} << nin) && !any; ++x) {
        set_inputs(x);
        load(st);
        any = constraints_hold();
      }
      if (any) break;
    }
    if (!any) return Status::Vacuous;
    if (qualifier) {
      if (ns + ni + nin > limits.max_free_bits) return std::nullopt;
      bool sat = false;
      std::vector<char> st(width, 0);
      for (uint64_t r = 0; r < (uint64_t{1} << (ns + ni)) && !sat; ++r) {
        for (size_t k = 0; k < ns + ni; ++k) st[k] = static_cast<char>((r >> k) & 1);
        for (uint64_t x = 0; x < (uint64_t{1} << nin) && !sat; ++x) {
          set_inputs(x);
          load(st);
          sat = constraints_hold() && qualifier->eval(es, ei);
        }
      }
      if (!sat) return Status::Vacuous;
    }
  }

  std::unordered_set<std::string> seen;
  for (const auto& st : frontier) seen.insert(std::string(st.begin(), st.end()));
  if (seen.size() > limits.max_states) return std::nullopt;
  std::vector<char> next(width);
  while (!frontier.empty()) {
    std::vector<std::vector<char>> upcoming;
    for (const auto& st : frontier) {
      for (uint64_t x = 0; x < (uint64_t{1} << nin); ++x) {
        set_inputs(x);
        load(st);
        if (!constraints_hold()) continue;
        const bool compare = st[count_at] >= top && (!qualifier || qualifier->eval(es, ei));
        size_t h = base;
        for (const auto& p : pairs) {
          const char sv = p.ds == 0 ? es.get(p.s) : st[h + p.ds - 1];
          const char iv = p.di == 0 ? ei.get(p.i) : st[h + p.ds + p.di - 1];
          if (compare && sv != iv) return Status::NotEquivalent;
          h += static_cast<size_t>(p.ds + p.di);
        }
        for (size_t r = 0; r < ns; ++r) next[r] = es.get(spec.registers()[r].next);
        for (size_t r = 0; r < ni; ++r) next[ns + r] = ei.get(imp.registers()[r].next);
        h = base;
        for (const auto& p : pairs) {
          for (int k = p.ds - 1; k > 0; --k) next[h + k] = st[h + k - 1];
          if (p.ds > 0) next[h] = es.get(p.s);
          h += static_cast<size_t>(p.ds);
          for (int k = p.di - 1; k > 0; --k) next[h + k] = st[h + k - 1];
          if (p.di > 0) next[h] = ei.get(p.i);
          h += static_cast<size_t>(p.di);
        }
        next[count_at] = static_cast<char>(std::min<int>(st[count_at] + 1, top));
        if (seen.insert(std::string(next.begin(), next.end())).second) {
          if (seen.size() > limits.max_states) return std::nullopt;
          upcoming.push_back(next);
        }
      }
    }
    frontier = std::move(upcoming);
  }
  return Status::Equivalent;
}

}  // namespace seqeq::bench
