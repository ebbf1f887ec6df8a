#include <gtest/gtest.h>

#include <random>

#include "seqeq/sat.hpp"

using namespace seqeq::sat;

namespace {

using Cnf = std::vector<std::vector<Literal>>;

bool brute_force(uint32_t vars, const Cnf& cnf) {
  for (uint64_t m = 0; m < (1ull << vars); ++m) {
    bool all = true;
    for (const auto& c : cnf) {
      bool any = false;
      for (Literal l : c) any |= (((m >> l.var()) & 1) != 0) != l.negated();
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

Cnf random_cnf(std::mt19937_64& rng, uint32_t vars, size_t clauses) {
  Cnf cnf;
  for (size_t i = 0; i < clauses; ++i) {
    std::vector<Literal> c;
    for (int k = 0; k < 3; ++k) c.push_back(Literal::make(rng() % vars, rng() & 1));
    cnf.push_back(c);
  }
  return cnf;
}

bool satisfied_by_model(const Solver& s, const Cnf& cnf) {
  for (const auto& c : cnf) {
    bool any = false;
    for (Literal l : c) any |= s.model_value(l);
    if (!any) return false;
  }
  return true;
}

}  // namespace

TEST(Sat, RandomThreeSatAgreesWithBruteForce) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 300; ++round) {
    const uint32_t vars = 4 + rng() % 9;
    const auto cnf = random_cnf(rng, vars, vars * 4 + rng() % 10);
    Solver s(0);
    for (uint32_t v = 0; v < vars; ++v) s.new_var();
    for (const auto& c : cnf) s.add_clause(c);
    const Result r = s.solve();
    ASSERT_EQ(r == Result::Sat, brute_force(vars, cnf)) << "round " << round;
    if (r == Result::Sat) ASSERT_TRUE(satisfied_by_model(s, cnf));
  }
}

TEST(Sat, AssumptionCoreIsUnsatisfiable) {
  std::mt19937_64 rng(11);
  int unsat_seen = 0;
  for (int round = 0; round < 300; ++round) {
    const uint32_t vars = 8;
    auto cnf = random_cnf(rng, vars, 20);
    Solver s(0);
    for (uint32_t v = 0; v < vars; ++v) s.new_var();
    for (const auto& c : cnf) s.add_clause(c);
    std::vector<Literal> assumptions;
    for (uint32_t v = 0; v < 4; ++v) assumptions.push_back(Literal::make(v, rng() & 1));
    Cnf with = cnf;
    for (Literal a : assumptions) with.push_back({a});
    const Result r = s.solve(assumptions);
    ASSERT_EQ(r == Result::Sat, brute_force(vars, with));
    if (r == Result::Unsat) {
      ++unsat_seen;
      Cnf core_cnf = cnf;
      for (Literal a : s.core()) {
        EXPECT_NE(std::find(assumptions.begin(), assumptions.end(), a), assumptions.end());
        core_cnf.push_back({a});
      }
      EXPECT_FALSE(brute_force(vars, core_cnf));
    }
    // Solver stays usable after assumption conflicts.
    EXPECT_EQ(s.solve() == Result::Sat, brute_force(vars, cnf));
  }
  EXPECT_GT(unsat_seen, 0);
}

TEST(Sat, PigeonholeIsUnsatAndBudgetGivesUnknown) {
  const int holes = 7, pigeons = 8;
  auto build = [&](Solver& s) {
    for (int i = 0; i < pigeons * holes; ++i) s.new_var();
    auto x = [&](int p, int h) { return Literal::make(p * holes + h); };
    for (int p = 0; p < pigeons; ++p) {
      std::vector<Literal> c;
      for (int h = 0; h < holes; ++h) c.push_back(x(p, h));
      s.add_clause(c);
    }
    for (int h = 0; h < holes; ++h)
      for (int p = 0; p < pigeons; ++p)
        for (int q = p + 1; q < pigeons; ++q) s.add_clause({~x(p, h), ~x(q, h)});
  };
  Solver limited(0);
  build(limited);
  EXPECT_EQ(limited.solve({}, 10), Result::Unknown);
  Solver full(0);
  build(full);
  EXPECT_EQ(full.solve(), Result::Unsat);
}

TEST(Sat, SeedDoesNotChangeAnswers) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 100; ++round) {
    const auto cnf = random_cnf(rng, 10, 43);
    Solver a(0), b(12345);
    for (int v = 0; v < 10; ++v) {
      a.new_var();
      b.new_var();
    }
    for (const auto& c : cnf) {
      a.add_clause(c);
      b.add_clause(c);
    }
    EXPECT_EQ(a.solve(), b.solve());
  }
}

TEST(Sat, DimacsExport) {
  CnfInstance cnf;
  auto a = Literal::make(cnf.new_var());
  auto b = Literal::make(cnf.new_var());
  cnf.add_clause({a, ~b});
  cnf.add_clause({b});
  EXPECT_EQ(export_dimacs(cnf.num_vars(), cnf.clauses()), "p cnf 2 2\n1 -2 0\n2 0\n");
}
