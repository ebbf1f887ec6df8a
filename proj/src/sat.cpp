#include "seqeq/sat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

namespace seqeq::sat {

const char* to_string(Result result) {
  switch (result) {
    case Result::Sat: return "SAT";
    case Result::Unsat: return "UNSAT";
    case Result::Unknown: return "UNKNOWN";
  }
  return "?";
}

std::string export_dimacs(uint32_t num_vars, const std::vector<std::vector<Literal>>& clauses) {
  std::ostringstream out;
  out << "p cnf " << num_vars << " " << clauses.size() << "\n";
  for (const auto& clause : clauses) {
    for (Literal l : clause) out << (l.negated() ? "-" : "") << (l.var() + 1) << " ";
    out << "0\n";
  }
  return out.str();
}

namespace {

constexpr int8_t kTrue = 1;
constexpr int8_t kFalse = -1;
constexpr int8_t kUndef = 0;
constexpr uint32_t kNoReason = UINT32_MAX;

struct Clause {
  std::vector<Literal> lits;
  bool learnt = false;
  bool deleted = false;
  double activity = 0;
};

struct Watcher {
  uint32_t cref;
  Literal blocker;
};

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

}  // namespace

uint64_t solver_seed_from_env() {
  const char* env = std::getenv("SEQEQ_SOLVER_SEED");
  return env ? std::strtoull(env, nullptr, 10) : 0;
}

struct Solver::Impl {
  explicit Impl(uint64_t seed) : rng(seed), seeded(seed != 0) {}

  std::vector<Clause> clauses;
  std::vector<std::vector<Watcher>> watches;  // by literal; triggered when it becomes false
  std::vector<int8_t> assigns;
  std::vector<int8_t> polarity;  // saved phase: 1 = last assigned negative
  std::vector<uint32_t> level;
  std::vector<uint32_t> reason;
  std::vector<double> activity;
  std::vector<char> seen;
  std::vector<Literal> trail;
  std::vector<size_t> trail_lim;
  size_t qhead = 0;
  bool ok = true;
  double var_inc = 1;
  double cla_inc = 1;
  size_t num_learnts = 0;
  double max_learnts = 0;
  int64_t total_conflicts = 0;
  std::vector<int8_t> model;
  std::mt19937_64 rng;
  bool seeded;
  bool recording = false;
  std::vector<std::vector<Literal>> recorded;

  // VSIDS order heap.
  std::vector<uint32_t> heap;
  std::vector<int> heap_index;

  int8_t value(Literal l) const {
    int8_t v = assigns[l.var()];
    return l.negated() ? static_cast<int8_t>(-v) : v;
  }
  uint32_t decision_level() const { return static_cast<uint32_t>(trail_lim.size()); }

  bool heap_less(uint32_t a, uint32_t b) const { return activity[a] > activity[b]; }
  void heap_up(size_t i) {
    uint32_t v = heap[i];
    while (i > 0) {
      size_t parent = (i - 1) / 2;
      if (!heap_less(v, heap[parent])) break;
      heap[i] = heap[parent];
      heap_index[heap[i]] = static_cast<int>(i);
      i = parent;
    }
    heap[i] = v;
    heap_index[v] = static_cast<int>(i);
  }
  void heap_down(size_t i) {
    uint32_t v = heap[i];
    for (;;) {
      size_t child = 2 * i + 1;
      if (child >= heap.size()) break;
      if (child + 1 < heap.size() && heap_less(heap[child + 1], heap[child])) ++child;
      if (!heap_less(heap[child], v)) break;
      heap[i] = heap[child];
      heap_index[heap[i]] = static_cast<int>(i);
      i = child;
    }
    heap[i] = v;
    heap_index[v] = static_cast<int>(i);
  }
  void heap_insert(uint32_t v) {
    if (heap_index[v] >= 0) return;
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }
  uint32_t heap_pop() {
    uint32_t top = heap[0];
    heap_index[top] = -1;
    uint32_t last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_index[last] = 0;
      heap_down(0);
    }
    return top;
  }

  uint32_t new_var() {
    uint32_t v = static_cast<uint32_t>(assigns.size());
    assigns.push_back(kUndef);
    polarity.push_back(seeded ? static_cast<int8_t>(rng() & 1) : 1);
    level.push_back(0);
    reason.push_back(kNoReason);
    activity.push_back(seeded ? static_cast<double>(rng() % 1000) * 1e-5 : 0.0);
    seen.push_back(0);
    heap_index.push_back(-1);
    watches.emplace_back();
    watches.emplace_back();
    heap_insert(v);
    return v;
  }

  void bump_var(uint32_t v) {
    if ((activity[v] += var_inc) > 1e100) {
      for (double& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_index[v] >= 0) heap_up(static_cast<size_t>(heap_index[v]));
  }
  void bump_clause(Clause& c) {
    if ((c.activity += cla_inc) > 1e20) {
      for (auto& cl : clauses)
        if (cl.learnt) cl.activity *= 1e-20;
      cla_inc *= 1e-20;
    }
  }

  void enqueue(Literal p, uint32_t from) {
    assigns[p.var()] = p.negated() ? kFalse : kTrue;
    level[p.var()] = decision_level();
    reason[p.var()] = from;
    trail.push_back(p);
  }

  void attach(uint32_t cref) {
    const auto& lits = clauses[cref].lits;
    watches[(~lits[0]).x].push_back({cref, lits[1]});
    watches[(~lits[1]).x].push_back({cref, lits[0]});
  }

  void cancel_until(uint32_t lvl) {
    if (decision_level() <= lvl) return;
    for (size_t i = trail.size(); i-- > trail_lim[lvl];) {
      uint32_t v = trail[i].var();
      assigns[v] = kUndef;
      reason[v] = kNoReason;
      polarity[v] = trail[i].negated() ? 1 : 0;
      heap_insert(v);
    }
    trail.resize(trail_lim[lvl]);
    trail_lim.resize(lvl);
    qhead = trail.size();
  }

  // Watch lists are keyed by the negation of the watched literal, so a list
  // fires when its key literal becomes true.
  uint32_t propagate() {
    while (qhead < trail.size()) {
      Literal p = trail[qhead++];
      Literal false_lit = ~p;
      auto& ws = watches[p.x];
      size_t i = 0, j = 0;
      while (i < ws.size()) {
        Watcher w = ws[i++];
        if (value(w.blocker) == kTrue) {
          ws[j++] = w;
          continue;
        }
        Clause& c = clauses[w.cref];
        if (c.deleted) continue;
        auto& lits = c.lits;
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        Literal first = lits[0];
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < lits.size(); ++k) {
          if (value(lits[k]) != kFalse) {
            std::swap(lits[1], lits[k]);
            watches[(~lits[1]).x].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (value(first) == kFalse) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          qhead = trail.size();
          return w.cref;
        }
        enqueue(first, w.cref);
      }
      ws.resize(j);
    }
    return kNoReason;
  }

  bool redundant(Literal q) {
    uint32_t r = reason[q.var()];
    if (r == kNoReason) return false;
    const auto& lits = clauses[r].lits;
    for (size_t k = 1; k < lits.size(); ++k) {
      uint32_t v = lits[k].var();
      if (!seen[v] && level[v] > 0) return false;
    }
    return true;
  }

  void analyze(uint32_t confl, std::vector<Literal>& out, uint32_t& bt_level) {
    int path = 0;
    std::optional<Literal> p;
    out.assign(1, Literal{});
    std::vector<uint32_t> to_clear;
    size_t index = trail.size();
    do {
      Clause& c = clauses[confl];
      if (c.learnt) bump_clause(c);
      for (size_t k = p ? 1 : 0; k < c.lits.size(); ++k) {
        Literal q = c.lits[k];
        uint32_t v = q.var();
        if (seen[v] || level[v] == 0) continue;
        bump_var(v);
        seen[v] = 1;
        to_clear.push_back(v);
        if (level[v] >= decision_level())
          ++path;
        else
          out.push_back(q);
      }
      while (!seen[trail[--index].var()]) {
      }
      p = trail[index];
      confl = reason[p->var()];
      seen[p->var()] = 0;
      --path;
    } while (path > 0);
    out[0] = ~*p;

    size_t kept = 1;
    for (size_t k = 1; k < out.size(); ++k)
      if (!redundant(out[k])) out[kept++] = out[k];
    out.resize(kept);

    bt_level = 0;
    if (out.size() > 1) {
      size_t max_k = 1;
      for (size_t k = 2; k < out.size(); ++k)
        if (level[out[k].var()] > level[out[max_k].var()]) max_k = k;
      std::swap(out[1], out[max_k]);
      bt_level = level[out[1].var()];
    }
    for (uint32_t v : to_clear) seen[v] = 0;
  }

  // Assumptions responsible for `p` being false.
  void analyze_final(Literal p, std::vector<Literal>& core) {
    core.clear();
    core.push_back(p);
    if (decision_level() == 0) return;
    seen[p.var()] = 1;
    for (size_t i = trail.size(); i-- > trail_lim[0];) {
      uint32_t v = trail[i].var();
      if (!seen[v]) continue;
      if (reason[v] == kNoReason) {
        if (v != p.var()) core.push_back(trail[i]);
      } else {
        const auto& lits = clauses[reason[v]].lits;
        for (size_t k = 1; k < lits.size(); ++k)
          if (level[lits[k].var()] > 0) seen[lits[k].var()] = 1;
      }
      seen[v] = 0;
    }
    seen[p.var()] = 0;
  }

  bool locked(uint32_t cref) const {
    const auto& lits = clauses[cref].lits;
    uint32_t v = lits[0].var();
    return reason[v] == cref && value(lits[0]) == kTrue;
  }

  void reduce_db() {
    std::vector<uint32_t> learnts;
    for (uint32_t i = 0; i < clauses.size(); ++i)
      if (clauses[i].learnt && !clauses[i].deleted) learnts.push_back(i);
    std::sort(learnts.begin(), learnts.end(), [&](uint32_t a, uint32_t b) {
      const auto& ca = clauses[a];
      const auto& cb = clauses[b];
      if ((ca.lits.size() > 2) != (cb.lits.size() > 2)) return ca.lits.size() > 2;
      return ca.activity < cb.activity;
    });
    const double lim = cla_inc / std::max<size_t>(1, learnts.size());
    for (size_t i = 0; i < learnts.size(); ++i) {
      Clause& c = clauses[learnts[i]];
      if (c.lits.size() > 2 && !locked(learnts[i]) && (i < learnts.size() / 2 || c.activity < lim)) {
        c.deleted = true;
        --num_learnts;
      }
    }
    compact();
  }

  void compact() {
    std::vector<uint32_t> remap(clauses.size(), kNoReason);
    size_t kept = 0;
    for (size_t i = 0; i < clauses.size(); ++i) {
      if (clauses[i].deleted) continue;
      remap[i] = static_cast<uint32_t>(kept);
      if (kept != i) clauses[kept] = std::move(clauses[i]);
      ++kept;
    }
    clauses.resize(kept);
    for (auto& r : reason)
      if (r != kNoReason) r = remap[r];
    for (auto& ws : watches) ws.clear();
    for (uint32_t i = 0; i < clauses.size(); ++i) attach(i);
  }

  uint32_t add_learnt(std::vector<Literal>& lits) {
    uint32_t cref = static_cast<uint32_t>(clauses.size());
    clauses.push_back(Clause{lits, true, false, 0});
    bump_clause(clauses.back());
    attach(cref);
    ++num_learnts;
    return cref;
  }

  std::optional<Literal> pick_branch() {
    while (!heap.empty()) {
      uint32_t v = heap_pop();
      if (assigns[v] == kUndef) return Literal::make(v, polarity[v] != 0);
    }
    return std::nullopt;
  }

  Result search(int64_t nof_conflicts, std::span<const Literal> assumptions, int64_t& budget,
                std::vector<Literal>& core) {
    int64_t local = 0;
    std::vector<Literal> learnt;
    for (;;) {
      uint32_t confl = propagate();
      if (confl != kNoReason) {
        ++total_conflicts;
        ++local;
        if (budget > 0) --budget;
        if (decision_level() == 0) {
          ok = false;
          return Result::Unsat;
        }
        uint32_t bt = 0;
        analyze(confl, learnt, bt);
        cancel_until(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          uint32_t cref = add_learnt(learnt);
          enqueue(learnt[0], cref);
        }
        var_inc /= 0.95;
        cla_inc /= 0.999;
        continue;
      }
      if (local >= nof_conflicts || budget == 0) {
        cancel_until(0);
        return Result::Unknown;
      }
      if (static_cast<double>(num_learnts) - static_cast<double>(trail.size()) >= max_learnts) {
        reduce_db();
        max_learnts *= 1.1;
      }
      std::optional<Literal> next;
      while (decision_level() < assumptions.size()) {
        Literal a = assumptions[decision_level()];
        if (value(a) == kTrue) {
          trail_lim.push_back(trail.size());
        } else if (value(a) == kFalse) {
          analyze_final(~a, core);
          core[0] = a;
          return Result::Unsat;
        } else {
          next = a;
          break;
        }
      }
      if (!next) {
        next = pick_branch();
        if (!next) {
          model = assigns;
          return Result::Sat;
        }
      }
      trail_lim.push_back(trail.size());
      enqueue(*next, kNoReason);
    }
  }
};

Solver::Solver() : Solver(solver_seed_from_env()) {}
Solver::Solver(uint64_t seed) : impl_(new Impl(seed)) {}
Solver::~Solver() { delete impl_; }

uint32_t Solver::new_var() { return impl_->new_var(); }
uint32_t Solver::num_vars() const { return static_cast<uint32_t>(impl_->assigns.size()); }
size_t Solver::num_clauses() const { return impl_->clauses.size(); }
int64_t Solver::conflicts() const { return impl_->total_conflicts; }
void Solver::set_recording(bool on) { impl_->recording = on; }

std::string Solver::dimacs(std::span<const Literal> assumptions) const {
  auto clauses = impl_->recorded;
  for (Literal a : assumptions) clauses.push_back({a});
  return export_dimacs(num_vars(), clauses);
}

void Solver::add_clause(std::span<const Literal> clause) {
  Impl& s = *impl_;
  if (s.recording) s.recorded.emplace_back(clause.begin(), clause.end());
  if (!s.ok) return;
  s.cancel_until(0);
  std::vector<Literal> lits(clause.begin(), clause.end());
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  size_t kept = 0;
  for (size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == ~lits[i]) return;  // tautology
    int8_t v = s.value(lits[i]);
    if (v == kTrue) return;
    if (v == kFalse) continue;
    lits[kept++] = lits[i];
  }
  lits.resize(kept);
  if (lits.empty()) {
    s.ok = false;
  } else if (lits.size() == 1) {
    s.enqueue(lits[0], kNoReason);
    if (s.propagate() != kNoReason) s.ok = false;
  } else {
    uint32_t cref = static_cast<uint32_t>(s.clauses.size());
    s.clauses.push_back(Clause{std::move(lits), false, false, 0});
    s.attach(cref);
  }
}

Result Solver::solve(std::span<const Literal> assumptions, int64_t conflict_budget) {
  Impl& s = *impl_;
  core_.clear();
  s.model.clear();
  if (!s.ok) return Result::Unsat;
  s.cancel_until(0);
  if (s.propagate() != kNoReason) {
    s.ok = false;
    return Result::Unsat;
  }
  if (s.max_learnts == 0) s.max_learnts = std::max<double>(1000, static_cast<double>(s.clauses.size()) / 3);
  int64_t budget = conflict_budget < 0 ? -1 : conflict_budget;
  if (budget == 0) return Result::Unknown;
  Result result = Result::Unknown;
  for (int restart = 0; result == Result::Unknown; ++restart) {
    result = s.search(static_cast<int64_t>(luby(2, restart) * 100), assumptions, budget, core_);
    if (result == Result::Unknown && budget == 0) break;
  }
  s.cancel_until(0);
  return result;
}

bool Solver::model_value(Literal lit) const {
  const auto& m = impl_->model;
  if (lit.var() >= m.size()) return false;
  int8_t v = m[lit.var()];
  bool b = v == kTrue;
  return lit.negated() ? !b : b;
}

Unroller::Unroller(const Netlist& netlist, ClauseSink& sink, InitMode mode)
    : netlist_(netlist), sink_(sink), mode_(mode) {}

Literal Unroller::true_lit() {
  if (!true_) {
    true_ = Literal::make(sink_.new_var());
    sink_.add_clause({*true_});
  }
  return *true_;
}

uint32_t& Unroller::slot(uint32_t var, size_t frame) {
  while (map_.size() <= frame) map_.emplace_back(netlist_.num_vars(), kUnset);
  return map_[frame][var];
}

std::optional<Literal> Unroller::encoded(Lit net, size_t frame) const {
  if (frame >= map_.size() || map_[frame][net.var()] == kUnset) return std::nullopt;
  return Literal{map_[frame][net.var()]} ^ net.inverted();
}

Literal Unroller::input(size_t input_index, size_t frame) {
  return lit(Lit::make(netlist_.inputs()[input_index].var), frame);
}

Literal Unroller::state(size_t register_index, size_t frame) {
  return lit(Lit::make(netlist_.registers()[register_index].var), frame);
}

Literal Unroller::lit(Lit net, size_t frame) {
  if (slot(net.var(), frame) != kUnset) return Literal{slot(net.var(), frame)} ^ net.inverted();
  std::vector<std::pair<uint32_t, size_t>> stack{{net.var(), frame}};
  auto get = [&](Lit l, size_t f) -> std::optional<Literal> {
    uint32_t s = slot(l.var(), f);
    if (s == kUnset) return std::nullopt;
    return Literal{s} ^ l.inverted();
  };
  while (!stack.empty()) {
    auto [v, f] = stack.back();
    if (slot(v, f) != kUnset) {
      stack.pop_back();
      continue;
    }
    const Node& node = netlist_.node(v);
    std::optional<Literal> result;
    switch (node.kind) {
      case NodeKind::Const: result = ~true_lit(); break;
      case NodeKind::Input: result = Literal::make(sink_.new_var()); break;
      case NodeKind::Register: {
        const Register& reg = netlist_.registers()[node.index];
        if (f == 0) {
          if (mode_ == InitMode::Free || reg.init == Init::Uninit)
            result = Literal::make(sink_.new_var());
          else
            result = reg.init == Init::One ? true_lit() : ~true_lit();
        } else if (auto n = get(reg.next, f - 1)) {
          result = *n;
        } else {
          stack.push_back({reg.next.var(), f - 1});
        }
        break;
      }
      case NodeKind::And: {
        auto a = get(node.left, f);
        auto b = get(node.right, f);
        if (!a) stack.push_back({node.left.var(), f});
        if (!b) stack.push_back({node.right.var(), f});
        if (!a || !b) break;
        const Literal t = true_lit();
        if (*a == ~t || *b == ~t || *a == ~*b) {
          result = ~t;
        } else if (*a == t || *a == *b) {
          result = *b;
        } else if (*b == t) {
          result = *a;
        } else {
          // Gates with the same operand literals share one solver variable,
          // across frames too.
          const uint64_t key = *a < *b ? (uint64_t{a->x} << 32 | b->x) : (uint64_t{b->x} << 32 | a->x);
          auto [it, fresh] = and_cache_.try_emplace(key, 0);
          if (fresh) {
            Literal x = Literal::make(sink_.new_var());
            sink_.add_clause({~x, *a});
            sink_.add_clause({~x, *b});
            sink_.add_clause({x, ~*a, ~*b});
            it->second = x.x;
          }
          result = Literal{it->second};
        }
        break;
      }
    }
    if (result) {
      slot(v, f) = result->x;
      stack.pop_back();
    }
  }
  return Literal{slot(net.var(), frame)} ^ net.inverted();
}

}  // namespace seqeq::sat
