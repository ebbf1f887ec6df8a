#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "seqeq/bench.hpp"
#include "seqeq/sim.hpp"
#include "seqeq/sim_kernels.hpp"

using namespace seqeq;
using seqeq::testing::design;
using seqeq::testing::named_task;

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

Lit out(const Netlist& n, const std::string& name) { return n.outputs()[*n.find_output(name)].lit; }

Tri random_tri(std::mt19937_64& rng, bool allow_x) {
  unsigned r = rng() % (allow_x ? 3 : 2);
  return r == 0 ? Tri::Zero : r == 1 ? Tri::One : Tri::X;
}

Stimulus random_stimulus(const Netlist& n, std::mt19937_64& rng, size_t cycles, bool allow_x) {
  Stimulus s;
  for (size_t c = 0; c < cycles; ++c) {
    std::map<std::string, Tri> m;
    for (const auto& i : n.inputs()) m[i.name] = random_tri(rng, allow_x);
    s.cycles.push_back(m);
  }
  return s;
}

}  // namespace

TEST(Kleene, TruthTables) {
  EXPECT_EQ(tri_and(Tri::X, Tri::Zero), Tri::Zero);
  EXPECT_EQ(tri_and(Tri::Zero, Tri::X), Tri::Zero);
  EXPECT_EQ(tri_and(Tri::X, Tri::One), Tri::X);
  EXPECT_EQ(tri_and(Tri::One, Tri::One), Tri::One);
  EXPECT_EQ(tri_not(Tri::X), Tri::X);
  EXPECT_EQ(tri_not(Tri::Zero), Tri::One);
}

TEST(Simulate, AndWithZeroMasksX) {
  auto n = design("module top(input a, output y, output z);\n  assign y = a & 1'b0;\n  assign z = a | 1'b0;\nendmodule\n");
  Stimulus s;
  s.cycles = {{{"a", Tri::X}}};
  Waveform w = simulate(*n, s);
  EXPECT_EQ(w.value(0, out(*n, "y")), Tri::Zero);
  EXPECT_EQ(w.value(0, out(*n, "z")), Tri::X);
}

TEST(Simulate, UninitRegisterStartsX) {
  auto n = design("module top(input a, output y);\n  reg r init uninit;\n  always r <= a;\n  assign y = r;\nendmodule\n");
  Stimulus s;
  s.cycles = {{{"a", Tri::One}}, {{"a", Tri::Zero}}};
  Waveform w = simulate(*n, s);
  EXPECT_EQ(w.value(0, out(*n, "y")), Tri::X);
  EXPECT_EQ(w.value(1, out(*n, "y")), Tri::One);
  s.init["r"] = false;
  EXPECT_EQ(simulate(*n, s).value(0, out(*n, "y")), Tri::Zero);
}

TEST(Simulate, MissingInput) {
  auto n = design("module top(input a, input b, output y);\n  assign y = a & b;\nendmodule\n");
  Stimulus s;
  s.cycles = {{{"a", Tri::One}}};
  EXPECT_EQ(kind_of([&] { simulate(*n, s); }), ErrorKind::MissingInput);
}

TEST(Simulate, CounterSequence) {
  auto n = design(
      "module top(input en, output [2:0] y);\n  reg [2:0] c init 0;\n  always c <= en ? c + 3'd1 : c;\n"
      "  assign y = c;\nendmodule\n");
  Stimulus s;
  const int en[] = {1, 1, 0, 1, 1, 1, 1, 1, 1};
  for (int e : en) s.cycles.push_back({{"en", tri_of(e)}});
  Waveform w = simulate(*n, s);
  unsigned expect = 0;
  for (size_t c = 0; c < s.cycles.size(); ++c) {
    unsigned v = 0;
    for (int b = 0; b < 3; ++b)
      if (w.value(c, out(*n, "y[" + std::to_string(b) + "]")) == Tri::One) v |= 1u << b;
    EXPECT_EQ(v, expect) << c;
    expect = (expect + en[c]) & 7;
  }
}

TEST(Simulate, XMonotonicity) {
  // Refining any X input to 0/1 never changes a definite value.
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto r = bench::random_task(seed, 4, 5);
    auto n = design(r.spec_source);
    std::mt19937_64 rng(seed);
    Stimulus coarse = random_stimulus(*n, rng, 6, true);
    Stimulus fine = coarse;
    for (auto& cyc : fine.cycles)
      for (auto& [k, v] : cyc)
        if (v == Tri::X) v = tri_of(rng() & 1);
    Waveform wc = simulate(*n, coarse), wf = simulate(*n, fine);
    for (size_t c = 0; c < 6; ++c)
      for (uint32_t v = 0; v < n->num_vars(); ++v) {
        Tri a = wc.value(c, Lit::make(v));
        if (a != Tri::X) EXPECT_EQ(a, wf.value(c, Lit::make(v))) << seed;
      }
  }
}

TEST(PackedSim, AgreesWithScalarSimulation) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto r = bench::random_task(seed, 4, 5);
    auto n = design(r.imp_source);
    std::mt19937_64 rng(seed + 100);
    std::vector<Stimulus> runs;
    for (int k = 0; k < 64; ++k) runs.push_back(random_stimulus(*n, rng, 5, true));
    std::vector<Waveform> waves;
    for (const auto& s : runs) waves.push_back(simulate(*n, s));
    PackedSim p(*n, 1);
    p.reset();
    for (size_t c = 0; c < 5; ++c) {
      for (size_t i = 0; i < n->inputs().size(); ++i) {
        uint64_t one = 0, zero = 0;
        for (int k = 0; k < 64; ++k) {
          Tri t = runs[k].cycles[c].at(n->inputs()[i].name);
          if (t == Tri::One) one |= uint64_t{1} << k;
          if (t == Tri::Zero) zero |= uint64_t{1} << k;
        }
        p.set_input(i, std::span<const uint64_t>(&one, 1), std::span<const uint64_t>(&zero, 1));
      }
      p.eval();
      for (const auto& o : n->outputs())
        for (int k = 0; k < 64; ++k) {
          Tri t = (p.one(o.lit)[0] >> k) & 1 ? Tri::One : (p.zero(o.lit)[0] >> k) & 1 ? Tri::Zero : Tri::X;
          EXPECT_EQ(t, waves[k].value(c, o.lit)) << seed << " " << o.name << " cycle " << c;
        }
      p.step();
    }
  }
}

TEST(Kernels, ScalarAndAvx2ProduceIdenticalPlanes) {
  if (!kernels::avx2_available()) GTEST_SKIP() << "no AVX2 on this CPU";
  std::mt19937_64 rng(42);
  for (size_t words : {1u, 3u, 4u, 5u, 8u, 17u, 64u}) {
    const size_t inputs = 12, gates_n = 300, vars = 1 + inputs + gates_n;
    std::vector<uint32_t> gates;
    for (size_t g = 0; g < gates_n; ++g) {
      uint32_t out = static_cast<uint32_t>(1 + inputs + g);
      auto pick = [&] { return static_cast<uint32_t>(((rng() % out) << 1) | (rng() & 1)); };
      gates.insert(gates.end(), {out, pick(), pick()});
    }
    std::vector<uint64_t> one(vars * words), zero(vars * words);
    for (size_t w = 0; w < words; ++w) zero[w] = ~uint64_t{0};  // constant FALSE
    for (size_t v = 1; v <= inputs; ++v)
      for (size_t w = 0; w < words; ++w) {
        uint64_t o = rng(), z = rng() & ~o;  // planes never overlap
        one[v * words + w] = o;
        zero[v * words + w] = z;
      }
    auto one2 = one, zero2 = zero;
    kernels::eval_ands_scalar(gates, one.data(), zero.data(), words);
    kernels::eval_ands_avx2(gates, one2.data(), zero2.data(), words);
    EXPECT_EQ(one, one2) << words;
    EXPECT_EQ(zero, zero2) << words;
    for (size_t i = 0; i < one.size(); ++i) ASSERT_EQ(one[i] & zero[i], 0u);
  }
}

TEST(Kernels, DispatchNamesAKernel) {
  std::string name = kernels::selected_kernel_name();
  EXPECT_TRUE(name == "scalar" || name == "avx2");
  if (!kernels::avx2_available()) EXPECT_EQ(name, "scalar");
}

TEST(Signatures, DeterministicAndDiscriminating) {
  auto a = design("module top(input a, input b, output y, output z);\n  assign y = a & b;\n  assign z = a ^ b;\nendmodule\n");
  auto b = design("module top(input a, input b, output y, output z);\n  assign y = ~(~a | ~b);\n  assign z = a | b;\nendmodule\n");
  Signatures sa(*a, 256, 1, 7), sb(*b, 256, 1, 7);
  EXPECT_EQ(sa.key(out(*a, "y")), sb.key(out(*b, "y")));
  EXPECT_FALSE(sa.differs(out(*a, "y"), sb, out(*b, "y")));
  EXPECT_TRUE(sa.differs(out(*a, "z"), sb, out(*b, "z")));
  Signatures again(*a, 256, 1, 7);
  EXPECT_EQ(sa.key(out(*a, "z")), again.key(out(*a, "z")));
  EXPECT_EQ(stimulus_word("a", 1, 2, 3), stimulus_word("a", 1, 2, 3));
  EXPECT_NE(stimulus_word("a", 1, 2, 3), stimulus_word("b", 1, 2, 3));
}

TEST(Replay, FindsMismatchAndRoundTripsTrace) {
  auto t = named_task("module top(input a, output y);\n  assign y = a;\nendmodule\n",
                      "module top(input a, output y);\n  assign y = a & 1'b0;\nendmodule\n");
  TraceInputs keys = trace_input_names(*t.spec, *t.imp, t.mapping);
  ASSERT_EQ(keys.spec_names.size(), 1u);
  Trace tr;
  tr.inputs = {{{keys.spec_names[0], Tri::Zero}}, {{keys.spec_names[0], Tri::One}}};
  ReplayResult r = replay(*t.spec, *t.imp, t.mapping, tr);
  ASSERT_TRUE(r.mismatch_cycle);
  EXPECT_EQ(*r.mismatch_cycle, 1u);
  EXPECT_EQ(r.mismatch_output, "y");
  Trace back = read_trace(write_trace(tr));
  EXPECT_EQ(back.inputs, tr.inputs);
  EXPECT_EQ(replay(*t.spec, *t.imp, t.mapping, back).mismatch_cycle, r.mismatch_cycle);
  Trace empty_cycle;
  empty_cycle.inputs = {{}};
  EXPECT_EQ(kind_of([&] { replay(*t.spec, *t.imp, t.mapping, empty_cycle); }), ErrorKind::TraceTooShort);
}

TEST(Probe, EvaluatesPredicates) {
  auto t = named_task("module top(input [1:0] a, output y);\n  assign y = a[0];\nendmodule\n",
                      "module top(input [1:0] a, input k, output y);\n  assign y = a[0];\nendmodule\n");
  Probe p(*t.spec, *t.imp, "k == 1'b0");
  ASSERT_EQ(p.sources().size(), 1u);
  EXPECT_EQ(p.sources()[0].key, "imp:k");
  const char zero = 0, one = 1;
  EXPECT_TRUE(p.eval(std::span<const char>(&zero, 1)));
  EXPECT_FALSE(p.eval(std::span<const char>(&one, 1)));
  EXPECT_FALSE(p.references_state());
  EXPECT_EQ(kind_of([&] { Probe(*t.spec, *t.imp, "nothere"); }), ErrorKind::UnknownIdentifier);
}
