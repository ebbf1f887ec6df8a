#include <gtest/gtest.h>

#include <random>
#include <set>

#include "seqeq/bench.hpp"
#include "seqeq/netlist.hpp"
#include "seqeq/sim.hpp"
#include "seqeq/snl.hpp"

using namespace seqeq;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Usage;
}

Netlist elab(const std::string& src, const std::string& top = "top") {
  return snl::elaborate(snl::parse(src), top, {}, snl::XPolicy::all(snl::XMode::Zero));
}

// Random stimulus shared by name; returns output values per cycle by name.
std::vector<std::map<std::string, Tri>> run(const Netlist& n, uint64_t seed, size_t cycles) {
  Stimulus s;
  std::set<std::string> names;
  for (const auto& in : n.inputs()) names.insert(in.name);
  for (size_t c = 0; c < cycles; ++c) {
    std::map<std::string, Tri> m;
    for (const auto& name : names) {
      std::mt19937_64 r(std::hash<std::string>{}(name) ^ (seed * 31 + c));
      m[name] = tri_of(r() & 1);
    }
    s.cycles.push_back(m);
  }
  Waveform w = simulate(n, s);
  std::vector<std::map<std::string, Tri>> out(cycles);
  for (size_t c = 0; c < cycles; ++c)
    for (const auto& o : n.outputs())
      if (!o.auxiliary) out[c][o.name] = w.value(c, o.lit);
  return out;
}

const char* kTwoTrees =
    "module top(input a, input b, input c, input d, output y, output z);\n"
    "  reg r init 0;\n  always r <= a ^ b;\n  assign y = r & a;\n  assign z = c | d;\nendmodule\n";

}  // namespace

TEST(Validate, EmptyNetlistIsValid) {
  Netlist n;
  EXPECT_NO_THROW(validate(n));
  EXPECT_EQ(n.num_ands(), 0u);
  EXPECT_TRUE(topological_ands(n).empty());
}

TEST(Validate, CombinationalCycle) {
  Netlist n;
  uint32_t a = n.add_input("a");
  Lit g1 = n.add_and(Lit::make(a), kTrue);
  Lit g2 = n.add_and(g1, Lit::make(a));
  n.set_and_operands(g1.var(), g2, Lit::make(a));
  n.add_output("y", g2);
  EXPECT_EQ(kind_of([&] { validate(n); }), ErrorKind::CombinationalCycle);
  EXPECT_EQ(kind_of([&] { topological_ands(n); }), ErrorKind::CombinationalCycle);
}

TEST(Validate, CycleThroughRegisterIsFine) {
  Netlist n;
  uint32_t a = n.add_input("a");
  uint32_t r = n.add_register("r", Init::Zero);
  n.set_next(r, n.add_and(Lit::make(n.registers()[r].var), Lit::make(a)));
  n.add_output("y", Lit::make(n.registers()[r].var));
  EXPECT_NO_THROW(validate(n));
}

TEST(Validate, DanglingAndDuplicate) {
  Netlist n;
  n.add_input("a");
  n.add_output("y", Lit::make(99));
  EXPECT_EQ(kind_of([&] { validate(n); }), ErrorKind::DanglingRef);

  Netlist d;
  uint32_t a = d.add_input("a");
  d.add_output("a", Lit::make(a));
  d.add_output("a", !Lit::make(a));
  EXPECT_EQ(kind_of([&] { validate(d); }), ErrorKind::DuplicateName);
}

TEST(Validate, ElaboratedScenariosAreValid) {
  for (auto k : bench::all_kinds()) {
    auto s = bench::generate(k, 1, {3, 3});
    EXPECT_NO_THROW(validate(*bench::scenario_task(s).spec)) << bench::to_string(k);
    EXPECT_NO_THROW(validate(*bench::scenario_task(s).imp)) << bench::to_string(k);
  }
}

TEST(Coi, SingleWireCone) {
  Netlist n = elab("module top(input a, input b, output y, output z);\n  assign y = a;\n  assign z = a & b;\nendmodule\n");
  std::vector<std::string> t{"y"};
  Netlist c = cone_of_influence(n, t);
  EXPECT_EQ(c.num_ands(), 0u);
  EXPECT_EQ(c.inputs().size(), 1u);
  EXPECT_EQ(c.outputs().size(), 1u);
}

TEST(Coi, DisjointTreesAndRegisters) {
  Netlist n = elab(kTwoTrees);
  std::vector<std::string> y{"y"}, z{"z"};
  Netlist cy = cone_of_influence(n, y), cz = cone_of_influence(n, z);
  EXPECT_EQ(cy.registers().size(), 1u);
  EXPECT_EQ(cz.registers().size(), 0u);
  std::set<std::string> iy, iz;
  for (const auto& i : cy.inputs()) iy.insert(i.name);
  for (const auto& i : cz.inputs()) iz.insert(i.name);
  EXPECT_EQ(iy, (std::set<std::string>{"a", "b"}));
  EXPECT_EQ(iz, (std::set<std::string>{"c", "d"}));
  EXPECT_LE(cy.num_ands() + cz.num_ands(), n.num_ands());
  // Behavior of the kept output is unchanged.
  for (uint64_t seed = 0; seed < 8; ++seed) {
    auto full = run(n, seed, 6), part = run(cy, seed, 6);
    for (size_t c = 0; c < 6; ++c) EXPECT_EQ(full[c]["y"], part[c]["y"]);
  }
}

TEST(Coi, UnknownNet) {
  Netlist n = elab(kTwoTrees);
  std::vector<std::string> t{"nope"};
  EXPECT_EQ(kind_of([&] { cone_of_influence(n, t); }), ErrorKind::UnknownNet);
}

TEST(Coi, MatchesReverseReachability) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto r = bench::random_task(seed, 4, 5);
    Netlist n = snl::elaborate(snl::parse(r.spec_source), "top");
    for (const auto& o : n.outputs()) {
      std::vector<std::string> t{o.name};
      Netlist c = cone_of_influence(n, t);
      // Reference: DFS over fanins and register next-states.
      std::set<uint32_t> seen;
      std::vector<uint32_t> stack{o.lit.var()};
      while (!stack.empty()) {
        uint32_t v = stack.back();
        stack.pop_back();
        if (!seen.insert(v).second) continue;
        const Node& nd = n.node(v);
        if (nd.kind == NodeKind::And) {
          stack.push_back(nd.left.var());
          stack.push_back(nd.right.var());
        } else if (nd.kind == NodeKind::Register) {
          stack.push_back(n.registers()[nd.index].next.var());
        }
      }
      size_t regs = 0, ins = 0;
      for (uint32_t v : seen) {
        regs += n.node(v).kind == NodeKind::Register;
        ins += n.node(v).kind == NodeKind::Input;
      }
      EXPECT_EQ(c.registers().size(), regs) << seed << " " << o.name;
      EXPECT_EQ(c.inputs().size(), ins) << seed << " " << o.name;
      EXPECT_LE(c.num_ands(), n.num_ands());
    }
  }
}

TEST(BlackBox, WholeDesign) {
  Netlist n = elab(kTwoTrees);
  std::vector<std::string> p{"top"};
  Netlist b = black_box(n, p);
  EXPECT_EQ(b.num_ands(), 0u);
  EXPECT_EQ(b.registers().size(), 0u);
  ASSERT_EQ(b.blackboxes().size(), 1u);
  for (const auto& o : b.outputs()) {
    if (o.auxiliary) continue;
    EXPECT_EQ(b.node(o.lit.var()).kind, NodeKind::Input);
    EXPECT_EQ(b.inputs()[b.node(o.lit.var()).index].role, InputRole::BlackBoxOutput);
  }
}

TEST(BlackBox, SubmoduleFeedingOneOutput) {
  const std::string src =
      "module inv(input x, output z);\n  assign z = ~x;\nendmodule\n"
      "module top(input a, input b, output y, output w);\n  wire t;\n  inv u (.x(a), .z(t));\n"
      "  assign y = t & b;\n  assign w = a | b;\nendmodule\n";
  Netlist n = elab(src);
  std::vector<std::string> p{"u"};
  Netlist b = black_box(n, p);
  ASSERT_EQ(b.blackboxes().size(), 1u);
  size_t bb_inputs = 0, aux = 0;
  for (const auto& i : b.inputs()) bb_inputs += i.role == InputRole::BlackBoxOutput;
  for (const auto& o : b.outputs()) aux += o.auxiliary;
  EXPECT_EQ(bb_inputs, 1u);
  EXPECT_EQ(aux, 1u);
  EXPECT_NO_THROW(validate(b));
  std::vector<std::string> bad{"nope"};
  EXPECT_EQ(kind_of([&] { black_box(n, bad); }), ErrorKind::NoSuchInstance);
}

TEST(BlackBox, IdenticalBoxingPreservesEquivalence) {
  auto s = bench::generate(bench::ScenarioKind::ParamDefault, 2, {3, 3});
  TaskConfig cfg = bench::scenario_config(s);
  cfg.spec.blackbox = cfg.imp.blackbox = {"k0"};
  EXPECT_EQ(bench::run_task(cfg).status, Status::Equivalent);
  // The defect only reaches the box input, which is still observed.
  TaskConfig bad = bench::scenario_config(bench::generate_faulty(bench::ScenarioKind::ParamDefault, 1, {4, 3}));
  bad.spec.blackbox = bad.imp.blackbox = {"k0"};
  EXPECT_EQ(bench::run_task(bad).status, Status::NotEquivalent);
}

TEST(Strash, MergesAndFolds) {
  Netlist n;
  Lit a = Lit::make(n.add_input("a")), b = Lit::make(n.add_input("b"));
  Lit x = n.add_and(a, b), y = n.add_and(b, a), z = n.add_and(a, !a), t = n.add_and(a, kTrue);
  n.add_output("x", x);
  n.add_output("y", y);
  n.add_output("z", z);
  n.add_output("t", t);
  Netlist h = structural_hash(n);
  EXPECT_EQ(h.num_ands(), 1u);
  EXPECT_EQ(h.outputs()[*h.find_output("x")].lit, h.outputs()[*h.find_output("y")].lit);
  EXPECT_EQ(h.outputs()[*h.find_output("z")].lit, kFalse);
  EXPECT_EQ(h.node(h.outputs()[*h.find_output("t")].lit.var()).kind, NodeKind::Input);
}

TEST(Strash, IdempotentAndBehaviorPreserving) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto r = bench::random_task(seed, 4, 5);
    Netlist n = snl::elaborate(snl::parse(r.imp_source), "top", {}, snl::XPolicy::all(snl::XMode::Zero));
    Netlist h = structural_hash(n), hh = structural_hash(h);
    EXPECT_LE(h.num_ands(), n.num_ands());
    EXPECT_EQ(hh.num_ands(), h.num_ands());
    EXPECT_EQ(hh.num_vars(), h.num_vars());
    auto topo = topological_ands(h);
    for (size_t i = 1; i < topo.size(); ++i) EXPECT_LT(topo[i - 1], topo[i]);
    for (uint64_t s = 0; s < 4; ++s) EXPECT_EQ(run(n, s, 8), run(h, s, 8)) << seed;
  }
}

TEST(Builder, HashedBuilderSharesNodes) {
  Netlist n;
  HashedBuilder hb(n);
  Lit a = Lit::make(n.add_input("a")), b = Lit::make(n.add_input("b"));
  EXPECT_EQ(hb.make_and(a, b), hb.make_and(b, a));
  EXPECT_EQ(hb.make_and(a, kFalse), kFalse);
  EXPECT_EQ(hb.make_and(a, a), a);
  EXPECT_EQ(hb.make_and(a, !a), kFalse);
  EXPECT_EQ(n.num_ands(), 1u);
}

TEST(Lit, Encoding) {
  EXPECT_EQ(Lit::make(3).raw(), 6u);
  EXPECT_EQ((!Lit::make(3)).raw(), 7u);
  EXPECT_TRUE(kFalse.is_const());
  EXPECT_EQ(!kFalse, kTrue);
  EXPECT_EQ((!Lit::make(5)).regular(), Lit::make(5));
}
