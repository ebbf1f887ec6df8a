#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "seqeq/cec.hpp"
#include "seqeq/sat.hpp"
#include "seqeq/sim.hpp"

using namespace seqeq;
using seqeq::testing::design;
using seqeq::testing::named_task;

namespace {

const char* kAdderA = R"(
module top(input [7:0] a, input [7:0] b, input [7:0] c, output [7:0] s);
  assign s = (a + b) + c;
endmodule
)";
const char* kAdderB = R"(
module top(input [7:0] a, input [7:0] b, input [7:0] c, output [7:0] s);
  assign s = a + (c + b);
endmodule
)";
const char* kAdderBad = R"(
module top(input [7:0] a, input [7:0] b, input [7:0] c, output [7:0] s);
  assign s = a + (c ^ b);
endmodule
)";

}  // namespace

TEST(Miter, IdenticalDesignsHashToZero) {
  auto t = named_task(kAdderA, kAdderA);
  Miter m = build_miter(*t.spec, *t.imp, t.mapping);
  for (Lit o : m.outputs) EXPECT_EQ(o, kFalse);
}

TEST(Miter, InvertedOutputIsConstantOne) {
  auto t = named_task(R"(
module top(input a, input b, output y);
  assign y = a & b;
endmodule
)", R"(
module top(input a, input b, output y);
  assign y = ~(a & b);
endmodule
)");
  Miter m = build_miter(*t.spec, *t.imp, t.mapping);
  ASSERT_EQ(m.outputs.size(), 1u);
  EXPECT_EQ(m.outputs[0], kTrue);
}

TEST(Miter, UnmappedRegisterRejected) {
  auto t = named_task(R"(
module top(input a, output y);
  reg r init 0;
  always r <= a;
  assign y = r;
endmodule
)", R"(
module top(input a, output y);
  reg q init 0;
  always q <= a;
  assign y = q;
endmodule
)");
  try {
    build_miter(*t.spec, *t.imp, t.mapping);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnmappedState);
  }
}

TEST(Cec, AdderAssociationEquivalent) {
  auto t = named_task(kAdderA, kAdderB);
  Verdict v = check_cec(t);
  EXPECT_EQ(v.status, Status::Equivalent);
}

TEST(Cec, AdderMutationHasReplayableTrace) {
  auto t = named_task(kAdderA, kAdderBad);
  Verdict v = check_cec(t);
  ASSERT_EQ(v.status, Status::NotEquivalent);
  ASSERT_TRUE(v.trace.has_value());
  EXPECT_EQ(v.trace->cycles(), 1u);
  EXPECT_EQ(replay(*t.spec, *t.imp, t.mapping, *v.trace).mismatch_cycle, std::optional<size_t>(0));
}

TEST(Cec, ChickenBitConstraint) {
  auto t = named_task(R"(
module top(input chicken, input [3:0] a, output [3:0] y);
  assign y = a;
endmodule
)", R"(
module top(input chicken, input [3:0] a, output [3:0] y);
  assign y = chicken ? a + 4'd1 : a;
endmodule
)");
  Verdict open = check_cec(t);
  ASSERT_EQ(open.status, Status::NotEquivalent);
  EXPECT_EQ(open.trace->inputs[0].at("chicken"), Tri::One);
  t.constraints = {"chicken == 0"};
  EXPECT_EQ(check_cec(t).status, Status::Equivalent);
  t.constraints = {"chicken == 0 && chicken == 1"};
  EXPECT_EQ(check_cec(t).status, Status::Vacuous);
}

TEST(Cec, StateMatchingRegistersEquivalent) {
  auto t = named_task(R"(
module top(input [3:0] a, output [3:0] y);
  reg [3:0] r init 0;
  always r <= r + a;
  assign y = r;
endmodule
)", R"(
module top(input [3:0] a, output [3:0] y);
  reg [3:0] r init 0;
  always r <= a + r;
  assign y = r;
endmodule
)");
  EXPECT_EQ(check_cec(t).status, Status::Equivalent);
}

TEST(Sweep, MergesAreConfirmedByDirectSat) {
  auto t = named_task(kAdderA, kAdderB);
  Netlist s = structural_hash(*t.spec), i = structural_hash(*t.imp);
  Miter m = build_miter(s, i, t.mapping);
  SweepResult r = sweep(m);
  ASSERT_FALSE(r.merges.empty());
  std::mt19937 rng(5);
  for (int n = 0; n < 100; ++n) {
    const SweepMerge& mg = r.merges[rng() % r.merges.size()];
    sat::Solver solver;
    sat::Unroller u(m.net, solver, sat::InitMode::Free);
    const sat::Literal a = u.lit(mg.a, 0), b = u.lit(mg.b, 0);
    EXPECT_EQ(solver.solve({a, ~b}), sat::Result::Unsat);
    EXPECT_EQ(solver.solve({~a, b}), sat::Result::Unsat);
  }
  for (Lit o : r.outputs) EXPECT_EQ(o, kFalse);
}
