#include <gtest/gtest.h>

#include "helpers.hpp"
#include "seqeq/mapper.hpp"
#include "seqeq/sim.hpp"

using namespace seqeq;
using seqeq::testing::design;

namespace {

const char* kSpec = R"(
module top(input [1:0] a, input b, output y);
  reg [1:0] r init 0;
  reg s init 1;
  always r <= a;
  always s <= b ^ s;
  assign y = r[0] ^ r[1] ^ s;
endmodule
)";

const char* kRenamed = R"(
module top(input [1:0] a, input b, output y);
  reg [1:0] r_q init 0;
  reg s_q init 1;
  always r_q <= a;
  always s_q <= b ^ s_q;
  assign y = r_q[0] ^ r_q[1] ^ s_q;
endmodule
)";

}  // namespace

TEST(MapByName, IdenticalDesignsAreTotal) {
  auto s = design(kSpec);
  Mapping m = map_by_name(*s, *s);
  EXPECT_EQ(m.inputs.size(), 3u);
  EXPECT_EQ(m.outputs.size(), 1u);
  ASSERT_EQ(m.registers.size(), 3u);
  for (const auto& p : m.registers) EXPECT_EQ(p.tag, PairTag::Candidate);
  EXPECT_TRUE(m.unmatched_spec.empty());
  EXPECT_TRUE(m.unmatched_imp.empty());
}

TEST(MapByName, SuffixRuleOnRegisters) {
  auto s = design(kSpec);
  auto i = design(kRenamed);
  Mapping plain = map_by_name(*s, *i);
  EXPECT_TRUE(plain.registers.empty());
  EXPECT_EQ(plain.unmatched_spec.size(), 3u);

  Mapping m = map_by_name(*s, *i, {RenameRule::parse("register: $ -> _q")});
  ASSERT_EQ(m.registers.size(), 3u);
  EXPECT_EQ(m.registers[0].spec, "r[0]");
  EXPECT_EQ(m.registers[0].imp, "r_q[0]");
  EXPECT_EQ(m.outputs.size(), 1u);
}

TEST(MapByName, CollidingRulesAreAmbiguous) {
  auto s = design(R"(
module top(input a, input b, output y);
  assign y = a & b;
endmodule
)");
  auto i = design(R"(
module top(input c, output y);
  assign y = c;
endmodule
)");
  EXPECT_THROW(map_by_name(*s, *i, {RenameRule::parse("input: ^[ab]$ -> c")}), Error);
  try {
    map_by_name(*s, *i, {RenameRule::parse("input: ^[ab]$ -> c")});
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AmbiguousRule);
  }
}

TEST(MapBySignature, RecoversRenamedRegisters) {
  auto s = design(kSpec);
  auto i = design(kRenamed);
  Mapping m = map_by_name(*s, *i);
  add_signature_pairs(*s, *i, m, SignatureConfig{});
  std::map<std::string, std::string> got;
  for (const auto& p : m.registers) got[p.spec] = p.imp;
  EXPECT_EQ(got["r[0]"], "r_q[0]");
  EXPECT_EQ(got["r[1]"], "r_q[1]");
  EXPECT_EQ(got["s"], "s_q");
}

TEST(MapBySignature, CollisionsStayUnpaired) {
  const char* two_zero = R"(
module top(input a, output y);
  reg z1 init 0;
  reg z2 init 0;
  always z1 <= 0;
  always z2 <= 0;
  assign y = a ^ z1 ^ z2;
endmodule
)";
  auto s = design(two_zero);
  Mapping m = map_by_name(*s, *s);
  m.registers.clear();
  add_signature_pairs(*s, *s, m, SignatureConfig{});
  EXPECT_TRUE(m.registers.empty());
}

TEST(MapBySignature, ConfigMismatchRejected) {
  auto s = design(kSpec);
  Signatures a(*s, 64, 4, 1), b(*s, 64, 4, 2);
  EXPECT_THROW(map_by_signature(*s, *s, a, b, Mapping{}), Error);
}

TEST(Refine, IdenticalDesignsAllProven) {
  auto t = seqeq::testing::named_task(kSpec, kSpec);
  Mapping m = refine_mapping(t);
  for (const auto& p : m.registers) EXPECT_EQ(p.tag, PairTag::Proven) << p.spec;
}

TEST(Refine, WrongPairsAreDroppedWithoutChangingVerdict) {
  auto t = seqeq::testing::named_task(kSpec, kSpec);
  // Adversarial list: every pair crossed.
  t.mapping.registers = {{"r[0]", "r[1]", PairTag::Candidate, {}, false},
                         {"r[1]", "s", PairTag::Candidate, {}, false},
                         {"s", "r[0]", PairTag::Candidate, {}, false}};
  Mapping m = refine_mapping(t);
  for (const auto& p : m.registers) {
    EXPECT_EQ(p.tag, PairTag::Dropped) << p.spec;
    EXPECT_TRUE(p.falsified_at.has_value() || p.induction_only);
  }
}

TEST(Refine, ProvenPairsAgreeInRandomSimulation) {
  auto t = seqeq::testing::named_task(kSpec, kRenamed);
  t.mapping = map_by_name(*t.spec, *t.imp, {RenameRule::parse("register: $ -> _q")});
  Mapping m = refine_mapping(t);
  std::map<std::string, std::string> stim;
  Signatures s(*t.spec, 1024, 8, 3);
  Signatures i(*t.imp, 1024, 8, 3, stim);
  for (const auto& p : m.registers) {
    ASSERT_EQ(p.tag, PairTag::Proven);
    const Lit a = Lit::make(t.spec->registers()[*t.spec->find_register(p.spec)].var);
    const Lit b = Lit::make(t.imp->registers()[*t.imp->find_register(p.imp)].var);
    EXPECT_FALSE(s.differs(a, i, b)) << p.spec;
  }
}
