#include <gtest/gtest.h>

#include "helpers.hpp"
#include "seqeq/sec.hpp"
#include "seqeq/sim.hpp"

using namespace seqeq;
using seqeq::testing::design;
using seqeq::testing::named_task;

namespace {

const char* kPipe = R"(
module top(input [3:0] a, input [3:0] b, output [3:0] y);
  reg [3:0] s1 init 0;
  reg [3:0] s2 init 0;
  always s1 <= a ^ b;
  always s2 <= s1 + 4'd1;
  assign y = s2;
endmodule
)";

const char* kPipeInverted = R"(
module top(input [3:0] a, input [3:0] b, output [3:0] y);
  reg [3:0] s1 init 0;
  reg [3:0] s2 init 0;
  always s1 <= a ^ b;
  always s2 <= s1 + 4'd1;
  assign y = ~s2;
endmodule
)";

// One extra output stage.
const char* kPipeDelayed = R"(
module top(input [3:0] a, input [3:0] b, output [3:0] y);
  reg [3:0] s1 init 0;
  reg [3:0] s2 init 0;
  reg [3:0] s3 init 0;
  always s1 <= a ^ b;
  always s2 <= s1 + 4'd1;
  always s3 <= s2;
  assign y = s3;
endmodule
)";

// Logic moved across the first register boundary.
const char* kPipeRetimed = R"(
module top(input [3:0] a, input [3:0] b, output [3:0] y);
  reg [3:0] ra init 0;
  reg [3:0] rb init 0;
  reg [3:0] s2 init 0;
  always ra <= a;
  always rb <= b;
  always s2 <= (ra ^ rb) + 4'd1;
  assign y = s2;
endmodule
)";

}  // namespace

TEST(Product, IdenticalDesignsHashToConstantBad) {
  auto t = named_task(kPipe, kPipe);
  t.mapping = refine_mapping(t);
  ProductMachine pm = build_product(t);
  EXPECT_EQ(pm.bad, kFalse);
  Verdict v = check_sec(t);
  EXPECT_EQ(v.status, Status::Equivalent);
  EXPECT_EQ(v.method, "structural");
}

TEST(Product, DelayLineOnLowerLatencySide) {
  auto t = named_task(kPipe, kPipeDelayed);
  for (auto& o : t.mapping.outputs) o.imp_latency = 1;
  ProductMachine pm = build_product(t);
  size_t spec_delay = 0, imp_delay = 0, valid = 0;
  for (const auto& r : pm.net.registers()) {
    spec_delay += r.name.rfind("dly:spec:", 0) == 0;
    imp_delay += r.name.rfind("dly:imp:", 0) == 0;
    valid += r.name.rfind("valid#", 0) == 0;
  }
  EXPECT_EQ(spec_delay, 4u);  // one stage per output bit
  EXPECT_EQ(imp_delay, 0u);
  EXPECT_EQ(valid, 1u);
}

TEST(Sec, InvertedOutputFailsAtMaxLatency) {
  auto t = named_task(kPipe, kPipeInverted);
  Verdict v = check_sec(t);
  ASSERT_EQ(v.status, Status::NotEquivalent);
  ASSERT_TRUE(v.mismatch_cycle.has_value());
  EXPECT_EQ(*v.mismatch_cycle, 0u);
  ASSERT_TRUE(v.trace.has_value());
  ReplayResult r = replay(*t.spec, *t.imp, t.mapping, *v.trace);
  EXPECT_EQ(r.mismatch_cycle, v.mismatch_cycle);
}

TEST(Sec, LatencyDeclaredMakesDelayedCopyEquivalent) {
  auto t = named_task(kPipe, kPipeDelayed);
  Verdict without = check_sec(t);
  EXPECT_EQ(without.status, Status::NotEquivalent);
  ASSERT_TRUE(without.trace.has_value());
  EXPECT_TRUE(replay(*t.spec, *t.imp, t.mapping, *without.trace).mismatch_cycle.has_value());

  for (auto& o : t.mapping.outputs) o.imp_latency = 1;
  Verdict with = check_sec(t);
  EXPECT_EQ(with.status, Status::Equivalent);
}

TEST(Sec, RetimedPipelineProvenByInduction) {
  auto t = named_task(kPipe, kPipeRetimed);
  t.engine.refine = false;
  Verdict v = check_sec(t);
  EXPECT_EQ(v.status, Status::Equivalent);
  EXPECT_EQ(v.method, "k-induction");
  EXPECT_GE(v.k, 1);
}

TEST(Sec, RefinementProvesOutputStageAfterRetiming) {
  auto t = named_task(kPipe, kPipeRetimed);
  Mapping m = refine_mapping(t);
  for (const auto& p : m.registers) {
    if (p.spec.rfind("s2", 0) == 0) EXPECT_EQ(p.tag, PairTag::Proven) << p.spec;
  }
  EXPECT_EQ(check_sec(t).status, Status::Equivalent);
}

TEST(Sec, ConstraintPinsChickenBit) {
  const char* legacy = R"(
module top(input chicken, input [1:0] a, output [1:0] y);
  reg [1:0] r init 0;
  always r <= a;
  assign y = r;
endmodule
)";
  const char* feature = R"(
module top(input chicken, input [1:0] a, output [1:0] y);
  reg [1:0] r init 0;
  always r <= chicken ? ~a : a;
  assign y = r;
endmodule
)";
  auto t = named_task(legacy, feature);
  Verdict open = check_sec(t);
  ASSERT_EQ(open.status, Status::NotEquivalent);
  bool chicken_high = false;
  for (const auto& cycle : open.trace->inputs)
    if (auto it = cycle.find("chicken"); it != cycle.end() && it->second == Tri::One) chicken_high = true;
  EXPECT_TRUE(chicken_high);

  t.constraints = {"chicken == 0"};
  EXPECT_EQ(check_sec(t).status, Status::Equivalent);
  t.constraints = {"chicken == 0 && chicken == 1"};
  EXPECT_EQ(check_sec(t).status, Status::Vacuous);
}

TEST(Sec, QualifierMasksIdleCycles) {
  const char* ungated = R"(
module top(input en, input [1:0] d, output [1:0] q);
  reg [1:0] r init 0;
  always r <= en ? d : r;
  assign q = r;
endmodule
)";
  // Output only meaningful while enabled: differs when idle.
  const char* gated = R"(
module top(input en, input [1:0] d, output [1:0] q);
  reg [1:0] r init 0;
  always r <= d;
  assign q = r;
endmodule
)";
  auto t = named_task(ungated, gated);
  EXPECT_EQ(check_sec(t).status, Status::NotEquivalent);
}

TEST(Sec, HelpersAreProvenAndUsed) {
  auto t = named_task(kPipe, kPipeRetimed);
  t.helpers = {{"s2[0]", "s2[0]"}, {"s1[0]", "ra[0]"}};
  auto results = prove_helpers(t, t.helpers);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_TRUE(results[0].proven);
  EXPECT_FALSE(results[1].proven);
  EXPECT_TRUE(results[1].falsified_at.has_value());
  Verdict v = check_sec(t);
  EXPECT_EQ(v.status, Status::Equivalent);
  EXPECT_EQ(v.helpers_used.size(), 1u);
}

TEST(Sec, BmcFindsDeepBug) {
  const char* counter = R"(
module top(input inc, output hit);
  reg [2:0] c init 0;
  always c <= inc ? c + 3'd1 : c;
  assign hit = 0;
endmodule
)";
  const char* buggy = R"(
module top(input inc, output hit);
  reg [2:0] c init 0;
  always c <= inc ? c + 3'd1 : c;
  assign hit = c == 3'd5;
endmodule
)";
  auto t = named_task(counter, buggy);
  Verdict v = bmc(t, 10);
  ASSERT_EQ(v.status, Status::NotEquivalent);
  EXPECT_EQ(*v.mismatch_cycle, 5u);
  EXPECT_EQ(check_sec(t).status, Status::NotEquivalent);
}

TEST(CaseSplit, IncompleteSplitGivesWitness) {
  auto t = named_task(kPipe, kPipeRetimed);
  t.cases = {{"low", "a < 4'd8"}, {"mid", "a == 4'd8"}};
  try {
    case_split(t);
    FAIL() << "expected IncompleteSplit";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompleteSplit);
    EXPECT_NE(std::string(e.what()).find("a="), std::string::npos);
  }
}

TEST(CaseSplit, CompleteSplitMatchesMonolithic) {
  auto t = named_task(kPipe, kPipeRetimed);
  t.cases = {{"low", "a < 4'd8"}, {"high", "a >= 4'd8"}};
  t.engine.jobs = 2;
  Verdict v = check_sec(t);
  EXPECT_EQ(v.status, Status::Equivalent);
  EXPECT_EQ(v.cases.size(), 2u);

  auto bad = named_task(kPipe, kPipeInverted);
  bad.cases = t.cases;
  EXPECT_EQ(check_sec(bad).status, Status::NotEquivalent);
}

TEST(Sec, UninitRegistersAreSymbolic) {
  const char* spec = R"(
module top(input d, output q);
  reg r init uninit;
  always r <= d;
  assign q = r;
endmodule
)";
  const char* imp = R"(
module top(input d, output q);
  reg r init 0;
  always r <= d;
  assign q = r;
endmodule
)";
  auto t = named_task(spec, imp);
  t.engine.refine = false;
  Verdict v = check_sec(t);
  ASSERT_EQ(v.status, Status::NotEquivalent);
  EXPECT_TRUE(v.trace->registers.count("spec:r"));
  EXPECT_EQ(replay(*t.spec, *t.imp, t.mapping, *v.trace).mismatch_cycle, std::optional<size_t>(0));
}

TEST(Sec, ComplementedRegisterCorrespondence) {
  // The IMP keeps the accumulator inverted under another name, so no register
  // pairs by name and plain induction has no invariant to work with.
  const std::string spec =
      "module top(input [3:0] a, output y);\n  reg [3:0] acc init 0;\n  always acc <= acc + a;\n"
      "  assign y = acc[3];\nendmodule\n";
  const std::string imp =
      "module top(input [3:0] a, output y);\n  reg [3:0] nacc init 4'd15;\n  always nacc <= ~(~nacc + a);\n"
      "  assign y = ~nacc[3];\nendmodule\n";
  auto t = named_task(spec, imp);
  t.engine.k_max = 6;
  t.engine.bmc_depth = 6;
  Verdict v = check_sec(t);
  EXPECT_EQ(v.status, Status::Equivalent) << v.method;
  t.engine.refine = false;
  EXPECT_EQ(check_sec(t).status, Status::Inconclusive);

  std::string bad = imp;
  bad.replace(bad.find("4'd15"), 5, "4'd14");
  auto f = named_task(spec, bad);
  EXPECT_EQ(check_sec(f).status, Status::NotEquivalent);
}
