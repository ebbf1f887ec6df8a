#include <gtest/gtest.h>

#include "seqeq/xcheck.hpp"

using namespace seqeq;

namespace {

XCheckReport run(const std::string& text, XCheckMode mode, XCheckPolicy policy,
                 std::vector<std::string> constraints = {}) {
  XCheckOptions o;
  o.mode = mode;
  o.policy = policy;
  o.constraints = std::move(constraints);
  return check_x(snl::parse(text), "top", o);
}

}  // namespace

TEST(XCheck, FullyResetDesignIsClean) {
  auto r = run(R"(
module top(input a, output y);
  reg q init 0;
  always q <= a;
  assign y = q;
endmodule
)", XCheckMode::Both, XCheckPolicy::ZeroOne);
  EXPECT_TRUE(r.clean);
  EXPECT_TRUE(r.sources.empty());
  EXPECT_FALSE(r.notes.empty());
}

TEST(XCheck, UninitLeakDetectedAndLocalized) {
  auto r = run(R"(
module top(input a, output y, output z);
  reg q init uninit;
  reg p init 0;
  always q <= a;
  always p <= a;
  assign y = q;
  assign z = p;
endmodule
)", XCheckMode::UninitFlops, XCheckPolicy::ZeroOne);
  EXPECT_FALSE(r.clean);
  EXPECT_EQ(r.verdict.status, Status::NotEquivalent);
  ASSERT_EQ(r.cone.size(), 1u);
  EXPECT_EQ(r.cone[0].net, "q");
  EXPECT_EQ(r.policy_pair, "X_TO_ZERO/X_TO_ONE");
}

TEST(XCheck, MaskedUninitIsClean) {
  auto r = run(R"(
module top(input a, output y);
  reg q init uninit;
  always q <= q;
  assign y = q & 0;
endmodule
)", XCheckMode::UninitFlops, XCheckPolicy::ZeroOne);
  EXPECT_TRUE(r.clean);
}

TEST(XCheck, XorOfTwoUninitNeedsSymbolic) {
  const char* text = R"(
module top(input a, output y);
  reg r1 init uninit;
  reg r2 init uninit;
  always r1 <= r1;
  always r2 <= r2;
  assign y = r1 ^ r2;
endmodule
)";
  EXPECT_TRUE(run(text, XCheckMode::UninitFlops, XCheckPolicy::ZeroOne).clean);
  EXPECT_FALSE(run(text, XCheckMode::UninitFlops, XCheckPolicy::Symbolic).clean);
}

TEST(XCheck, XLiteralNeedsXsrcMode) {
  const char* text = R"(
module top(input s, input a, output y);
  assign y = s ? a : 1'bx;
endmodule
)";
  EXPECT_TRUE(run(text, XCheckMode::UninitFlops, XCheckPolicy::ZeroOne).clean);
  EXPECT_FALSE(run(text, XCheckMode::XSources, XCheckPolicy::ZeroOne).clean);
  EXPECT_FALSE(run(text, XCheckMode::XSources, XCheckPolicy::Symbolic).clean);
  // Bogus X from unconstrained select disappears once the input is constrained.
  EXPECT_TRUE(run(text, XCheckMode::XSources, XCheckPolicy::Symbolic, {"s == 1"}).clean);
}

TEST(XCheck, ModeAndPolicyNames) {
  EXPECT_EQ(parse_xcheck_mode("uninit"), XCheckMode::UninitFlops);
  EXPECT_EQ(parse_xcheck_mode("xsrc"), XCheckMode::XSources);
  EXPECT_EQ(parse_xcheck_mode("both"), XCheckMode::Both);
  EXPECT_FALSE(parse_xcheck_mode("x").has_value());
  EXPECT_EQ(parse_xcheck_policy("01"), XCheckPolicy::ZeroOne);
  EXPECT_EQ(parse_xcheck_policy("symbolic"), XCheckPolicy::Symbolic);
}
