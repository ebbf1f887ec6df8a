#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqeq/netlist.hpp"

namespace seqeq::sat {

/// Solver literal: 2 * var + negated, vars from 0.
struct Literal {
  uint32_t x = 0;
  static constexpr Literal make(uint32_t var, bool negated = false) { return {2 * var + (negated ? 1u : 0u)}; }
  constexpr uint32_t var() const { return x >> 1; }
  constexpr bool negated() const { return x & 1u; }
  constexpr Literal operator~() const { return {x ^ 1u}; }
  constexpr Literal operator^(bool flip) const { return {x ^ (flip ? 1u : 0u)}; }
  friend constexpr bool operator==(Literal, Literal) = default;
  friend constexpr auto operator<=>(Literal, Literal) = default;
};

/// Anything that accepts CNF.
class ClauseSink {
 public:
  virtual ~ClauseSink() = default;
  virtual uint32_t new_var() = 0;
  virtual void add_clause(std::span<const Literal> clause) = 0;
  void add_clause(std::initializer_list<Literal> clause) { add_clause(std::span<const Literal>(clause.begin(), clause.size())); }
};

/// Plain clause store, used for DIMACS export.
class CnfInstance : public ClauseSink {
 public:
  uint32_t new_var() override { return num_vars_++; }
  void add_clause(std::span<const Literal> clause) override { clauses_.emplace_back(clause.begin(), clause.end()); }
  using ClauseSink::add_clause;
  uint32_t num_vars() const { return num_vars_; }
  const std::vector<std::vector<Literal>>& clauses() const { return clauses_; }

 private:
  uint32_t num_vars_ = 0;
  std::vector<std::vector<Literal>> clauses_;
};

/// "p cnf V C" followed by one zero-terminated clause per line.
std::string export_dimacs(uint32_t num_vars, const std::vector<std::vector<Literal>>& clauses);

enum class Result { Sat, Unsat, Unknown };

/// SEQEQ_SOLVER_SEED, or 0 when unset.
uint64_t solver_seed_from_env();

const char* to_string(Result result);

/// CDCL solver: two watched literals, first-UIP learning with clause
/// minimization, VSIDS, phase saving, Luby restarts and incremental solving
/// under assumptions. Conflicts under assumptions yield a failed-assumption core.
class Solver : public ClauseSink {
 public:
  /// Seed from SEQEQ_SOLVER_SEED (0 when unset).
  Solver();
  explicit Solver(uint64_t seed);
  ~Solver() override;
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  uint32_t new_var() override;
  void add_clause(std::span<const Literal> clause) override;
  using ClauseSink::add_clause;

  /// `conflict_budget` < 0 means unlimited; exhausting it gives Unknown.
  Result solve(std::span<const Literal> assumptions = {}, int64_t conflict_budget = -1);
  Result solve(std::initializer_list<Literal> assumptions, int64_t conflict_budget = -1) {
    return solve(std::span<const Literal>(assumptions.begin(), assumptions.size()), conflict_budget);
  }

  /// Model after Sat.
  bool model_value(Literal lit) const;
  /// After Unsat under assumptions: assumptions that together are unsatisfiable.
  const std::vector<Literal>& core() const { return core_; }

  uint32_t num_vars() const;
  size_t num_clauses() const;
  int64_t conflicts() const;

  /// Keeps a copy of every added clause for export_dimacs.
  void set_recording(bool on);
  std::string dimacs(std::span<const Literal> assumptions = {}) const;

 private:
  struct Impl;
  Impl* impl_;
  std::vector<Literal> core_;
};

enum class InitMode { Constrain, Free };

/// Time-frame expansion of a netlist with on-demand Tseitin encoding.
/// Register values at frame k+1 are the next-state literals at frame k;
/// frame 0 registers take their init value (Constrain) or are free (Free).
/// UNINIT registers are free at frame 0 in both modes.
class Unroller {
 public:
  Unroller(const Netlist& netlist, ClauseSink& sink, InitMode mode);

  Literal lit(Lit net, size_t frame);
  Literal input(size_t input_index, size_t frame);
  Literal state(size_t register_index, size_t frame);
  Literal true_lit();
  /// Solver literal if the net was already encoded at `frame`.
  std::optional<Literal> encoded(Lit net, size_t frame) const;
  const Netlist& netlist() const { return netlist_; }

 private:
  static constexpr uint32_t kUnset = UINT32_MAX;
  uint32_t& slot(uint32_t var, size_t frame);

  const Netlist& netlist_;
  ClauseSink& sink_;
  InitMode mode_;
  std::optional<Literal> true_;
  std::vector<std::vector<uint32_t>> map_;
  std::unordered_map<uint64_t, uint32_t> and_cache_;
};

}  // namespace seqeq::sat
