#include "seqeq/sim.hpp"

#include <algorithm>
#include <cstring>
#include <set>

#include "seqeq/sim_kernels.hpp"
#include "seqeq/snl.hpp"

namespace seqeq {

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::Zero || b == Tri::Zero) return Tri::Zero;
  if (a == Tri::One && b == Tri::One) return Tri::One;
  return Tri::X;
}

Tri tri_not(Tri a) { return a == Tri::X ? Tri::X : a == Tri::One ? Tri::Zero : Tri::One; }

Tri Waveform::value(size_t cycle, Lit lit) const {
  Tri v = values_[cycle * vars_ + lit.var()];
  return lit.inverted() ? tri_not(v) : v;
}

namespace {

Tri init_value(const Register& reg, const std::map<std::string, bool>& choices) {
  switch (reg.init) {
    case Init::Zero: return Tri::Zero;
    case Init::One: return Tri::One;
    case Init::Uninit: break;
  }
  auto it = choices.find(reg.name);
  return it == choices.end() ? Tri::X : tri_of(it->second);
}

}  // namespace

Waveform simulate(const Netlist& netlist, const Stimulus& stimulus) {
  const auto order = topological_ands(netlist);
  const size_t cycles = stimulus.cycles.size();
  Waveform wave(cycles, netlist.num_vars());
  std::vector<Tri> cur(netlist.num_vars(), Tri::X);
  auto val = [&](Lit l) { return l.inverted() ? tri_not(cur[l.var()]) : cur[l.var()]; };
  std::vector<Tri> state(netlist.registers().size());
  for (size_t r = 0; r < state.size(); ++r) state[r] = init_value(netlist.registers()[r], stimulus.init);

  for (size_t c = 0; c < cycles; ++c) {
    std::fill(cur.begin(), cur.end(), Tri::X);
    cur[0] = Tri::Zero;
    for (const auto& in : netlist.inputs()) {
      auto it = stimulus.cycles[c].find(in.name);
      if (it != stimulus.cycles[c].end()) {
        cur[in.var] = it->second;
      } else if (in.role != InputRole::XSource) {
        throw Error(ErrorKind::MissingInput, in.name + " at cycle " + std::to_string(c));
      }
    }
    for (size_t r = 0; r < state.size(); ++r) cur[netlist.registers()[r].var] = state[r];
    for (uint32_t v : order) {
      const Node& n = netlist.node(v);
      cur[v] = tri_and(val(n.left), val(n.right));
    }
    for (uint32_t v = 0; v < cur.size(); ++v) wave.set(c, v, cur[v]);
    for (size_t r = 0; r < state.size(); ++r) state[r] = val(netlist.registers()[r].next);
  }
  return wave;
}

PackedSim::PackedSim(const Netlist& netlist, size_t words)
    : netlist_(netlist),
      words_(words),
      one_(netlist.num_vars() * words, 0),
      zero_(netlist.num_vars() * words, 0),
      scratch_(2 * netlist.registers().size() * words) {
  for (uint32_t v : topological_ands(netlist)) {
    const Node& n = netlist.node(v);
    gates_.push_back(v);
    gates_.push_back(n.left.raw());
    gates_.push_back(n.right.raw());
  }
  reset();
}

void PackedSim::reset() {
  std::fill(one_.begin(), one_.end(), 0);
  std::fill(zero_.begin(), zero_.end(), 0);
  std::fill(zero_.begin(), zero_.begin() + words_, ~uint64_t{0});
  for (const auto& reg : netlist_.registers()) {
    uint64_t* o = one_.data() + reg.var * words_;
    uint64_t* z = zero_.data() + reg.var * words_;
    std::fill(o, o + words_, reg.init == Init::One ? ~uint64_t{0} : 0);
    std::fill(z, z + words_, reg.init == Init::Zero ? ~uint64_t{0} : 0);
  }
}

void PackedSim::set_input(size_t input_index, std::span<const uint64_t> one, std::span<const uint64_t> zero) {
  const uint32_t var = netlist_.inputs()[input_index].var;
  std::copy_n(one.begin(), words_, one_.begin() + var * words_);
  std::copy_n(zero.begin(), words_, zero_.begin() + var * words_);
}

void PackedSim::eval() { kernels::select_eval_ands()(gates_, one_.data(), zero_.data(), words_); }

void PackedSim::step() {
  const auto regs = netlist_.registers();
  for (size_t r = 0; r < regs.size(); ++r) {
    auto o = one(regs[r].next);
    auto z = zero(regs[r].next);
    std::copy(o.begin(), o.end(), scratch_.begin() + 2 * r * words_);
    std::copy(z.begin(), z.end(), scratch_.begin() + (2 * r + 1) * words_);
  }
  for (size_t r = 0; r < regs.size(); ++r) {
    std::copy_n(scratch_.begin() + 2 * r * words_, words_, one_.begin() + regs[r].var * words_);
    std::copy_n(scratch_.begin() + (2 * r + 1) * words_, words_, zero_.begin() + regs[r].var * words_);
  }
}

std::span<const uint64_t> PackedSim::one(Lit lit) const {
  const auto& plane = lit.inverted() ? zero_ : one_;
  return {plane.data() + lit.var() * words_, words_};
}

std::span<const uint64_t> PackedSim::zero(Lit lit) const {
  const auto& plane = lit.inverted() ? one_ : zero_;
  return {plane.data() + lit.var() * words_, words_};
}

namespace {

uint64_t splitmix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

uint64_t stimulus_word(const std::string& name, uint64_t seed, uint64_t cycle, uint64_t word) {
  return splitmix(splitmix(splitmix(fnv1a(name) ^ seed) ^ cycle) ^ word);
}

Signatures::Signatures(const Netlist& netlist, size_t runs, size_t depth, uint64_t seed,
                       const std::map<std::string, std::string>& stimulus_names)
    : config_{runs, depth, seed} {
  std::vector<std::string> names;
  for (const auto& in : netlist.inputs()) {
    auto it = stimulus_names.find(in.name);
    names.push_back(it == stimulus_names.end() ? in.name : it->second);
  }
  const size_t run_words = std::max<size_t>(1, (runs + 63) / 64);
  const size_t frames = depth + 1;
  words_ = run_words * frames;
  const size_t vars = netlist.num_vars();
  one_.assign(vars * words_, 0);
  zero_.assign(vars * words_, 0);
  PackedSim sim(netlist, run_words);
  std::vector<uint64_t> one(run_words), zero(run_words);
  for (size_t c = 0; c < frames; ++c) {
    for (size_t i = 0; i < netlist.inputs().size(); ++i) {
      for (size_t w = 0; w < run_words; ++w) {
        one[w] = stimulus_word(names[i], seed, c, w);
        zero[w] = ~one[w];
      }
      sim.set_input(i, one, zero);
    }
    sim.eval();
    for (uint32_t v = 0; v < vars; ++v) {
      auto o = sim.one(Lit::make(v));
      auto z = sim.zero(Lit::make(v));
      std::copy(o.begin(), o.end(), one_.begin() + v * words_ + c * run_words);
      std::copy(z.begin(), z.end(), zero_.begin() + v * words_ + c * run_words);
    }
    sim.step();
  }
}

std::span<const uint64_t> Signatures::one(Lit lit) const {
  const auto& plane = lit.inverted() ? zero_ : one_;
  return {plane.data() + lit.var() * words_, words_};
}

std::span<const uint64_t> Signatures::zero(Lit lit) const {
  const auto& plane = lit.inverted() ? one_ : zero_;
  return {plane.data() + lit.var() * words_, words_};
}

std::string Signatures::key(Lit lit) const {
  std::string out(2 * words_ * sizeof(uint64_t), '\0');
  std::memcpy(out.data(), one(lit).data(), words_ * sizeof(uint64_t));
  std::memcpy(out.data() + words_ * sizeof(uint64_t), zero(lit).data(), words_ * sizeof(uint64_t));
  return out;
}

bool Signatures::differs(Lit a, const Signatures& other, Lit b) const {
  auto a1 = one(a), a0 = zero(a), b1 = other.one(b), b0 = other.zero(b);
  const size_t n = std::min(words_, other.words_);
  for (size_t w = 0; w < n; ++w)
    if ((a1[w] & b0[w]) | (a0[w] & b1[w])) return true;
  return false;
}

TraceInputs trace_input_names(const Netlist& spec, const Netlist& imp, const Mapping& mapping) {
  std::map<std::string, std::string> imp_to_spec;
  std::set<std::string> tied_spec;
  for (const auto& p : mapping.inputs) {
    imp_to_spec[p.imp] = p.spec;
    tied_spec.insert(p.spec);
  }
  TraceInputs names;
  for (const auto& in : spec.inputs()) names.spec_names.push_back(tied_spec.count(in.name) ? in.name : "spec:" + in.name);
  for (const auto& in : imp.inputs()) {
    auto it = imp_to_spec.find(in.name);
    names.imp_names.push_back(it != imp_to_spec.end() ? it->second : "imp:" + in.name);
  }
  return names;
}

namespace {

Stimulus side_stimulus(const Netlist& netlist, const std::vector<std::string>& keys, const Trace& trace,
                       const std::string& prefix) {
  Stimulus stim;
  stim.cycles.resize(trace.cycles());
  for (size_t c = 0; c < trace.cycles(); ++c) {
    for (size_t i = 0; i < keys.size(); ++i) {
      const Input& in = netlist.inputs()[i];
      auto it = trace.inputs[c].find(keys[i]);
      if (it != trace.inputs[c].end()) {
        stim.cycles[c][in.name] = it->second;
      } else if (in.role != InputRole::XSource) {
        throw Error(ErrorKind::TraceTooShort, "no value for " + keys[i] + " at cycle " + std::to_string(c));
      }
    }
  }
  for (const auto& [name, v] : trace.registers)
    if (name.starts_with(prefix)) stim.init[name.substr(prefix.size())] = v;
  return stim;
}

Lit output_lit(const Netlist& netlist, const std::string& name, const char* side) {
  if (auto o = netlist.find_output(name)) return netlist.outputs()[*o].lit;
  if (auto l = netlist.find(name)) return *l;
  throw Error(ErrorKind::UnmappedOutput, std::string(side) + " has no output " + name);
}

}  // namespace

Probe::Probe(const Netlist& spec, const Netlist& imp, const std::string& expression) {
  HashedBuilder builder(net_);
  auto resolver = [&](const std::string& id) -> std::optional<snl::Word> {
    auto bound = bind_identifier(spec, imp, id);
    if (!bound) return std::nullopt;
    if (!bound->input) references_state_ = true;
    const Netlist& side = bound->side == Side::Spec ? spec : imp;
    snl::Word word;
    for (const auto& bit : bound->bits) {
      const std::string key = std::string(bound->side == Side::Spec ? "spec:" : "imp:") + bit;
      if (auto existing = net_.find(key)) {
        word.push_back(*existing);
        continue;
      }
      const uint32_t var = net_.add_input(key);
      sources_.push_back(Source{bound->side, *side.find(bit), key});
      word.push_back(Lit::make(var));
    }
    return word;
  };
  auto word = snl::elaborate_expression(snl::parse_expression(expression), builder, resolver);
  result_ = builder.make_or_all(word);
  net_.add_output("result", result_);
  order_ = topological_ands(net_);
}

bool Probe::eval(std::span<const char> source_values) const {
  std::vector<char> v(net_.num_vars(), 0);
  for (size_t i = 0; i < sources_.size(); ++i) v[net_.inputs()[i].var] = source_values[i];
  auto val = [&](Lit l) { return static_cast<bool>(v[l.var()]) != l.inverted(); };
  for (uint32_t x : order_) v[x] = val(net_.node(x).left) && val(net_.node(x).right);
  return val(result_);
}

std::vector<Tri> Probe::eval(const Waveform& spec, const Waveform& imp) const {
  Stimulus stim;
  stim.cycles.resize(spec.cycles());
  for (size_t c = 0; c < spec.cycles(); ++c)
    for (const auto& src : sources_) stim.cycles[c][src.key] = (src.side == Side::Spec ? spec : imp).value(c, src.net);
  Waveform w = simulate(net_, stim);
  std::vector<Tri> out(spec.cycles());
  for (size_t c = 0; c < out.size(); ++c) out[c] = w.value(c, result_);
  return out;
}

std::pair<Waveform, Waveform> simulate_trace(const Netlist& spec, const Netlist& imp, const Mapping& mapping,
                                             const Trace& trace) {
  const auto keys = trace_input_names(spec, imp, mapping);
  return {simulate(spec, side_stimulus(spec, keys.spec_names, trace, "spec:")),
          simulate(imp, side_stimulus(imp, keys.imp_names, trace, "imp:"))};
}

ReplayResult replay(const Netlist& spec, const Netlist& imp, const Mapping& mapping, const Trace& trace) {
  if (mapping.outputs.empty()) throw Error(ErrorKind::UnmappedOutput, "mapping has no output pairs");
  std::vector<std::pair<Lit, Lit>> pairs;
  for (const auto& p : mapping.outputs) pairs.emplace_back(output_lit(spec, p.spec, "SPEC"), output_lit(imp, p.imp, "IMP"));
  const auto [sw, iw] = simulate_trace(spec, imp, mapping, trace);
  std::vector<Tri> qualifier(trace.cycles(), Tri::One);
  if (!mapping.qualifier.empty()) qualifier = Probe(spec, imp, mapping.qualifier).eval(sw, iw);

  ReplayResult result;
  result.annotated = trace;
  result.annotated.outputs.assign(trace.cycles(), {});
  for (size_t t = 0; t < trace.cycles(); ++t) {
    if (qualifier[t] == Tri::Zero) continue;
    for (size_t k = 0; k < pairs.size(); ++k) {
      const auto& p = mapping.outputs[k];
      const size_t top = static_cast<size_t>(std::max(p.spec_latency, p.imp_latency));
      if (t < top) continue;
      const size_t ts = t - (top - p.spec_latency);
      const size_t ti = t - (top - p.imp_latency);
      OutLine line{p.spec, sw.value(ts, pairs[k].first), p.imp, iw.value(ti, pairs[k].second), false};
      line.mismatch = line.spec_value != line.imp_value;
      if (line.mismatch && !result.mismatch_cycle) {
        result.mismatch_cycle = t;
        result.mismatch_output = p.spec;
      }
      result.annotated.outputs[t].push_back(std::move(line));
    }
  }
  return result;
}

}  // namespace seqeq
