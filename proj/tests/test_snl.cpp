#include <gtest/gtest.h>

#include "seqeq/bench.hpp"
#include "seqeq/sim.hpp"
#include "seqeq/snl.hpp"

using namespace seqeq;
using namespace seqeq::snl;

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

std::string detail_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.detail();
  }
  return {};
}

// Evaluates output `y` of a combinational module for given input words.
uint64_t eval(const Netlist& n, const std::map<std::string, uint64_t>& in, const std::string& out = "y") {
  Stimulus s;
  std::map<std::string, Tri> cyc;
  for (const auto& i : n.inputs()) {
    auto [base, bit] = split_bit_name(i.name);
    cyc[i.name] = tri_of((in.at(base) >> std::max(bit, 0)) & 1);
  }
  s.cycles.push_back(cyc);
  Waveform w = simulate(n, s);
  auto words = group_words([&] {
    std::map<std::string, Lit> m;
    for (const auto& o : n.outputs()) m[o.name] = o.lit;
    return m;
  }());
  uint64_t v = 0;
  const Word& word = words.at(out);
  for (size_t b = 0; b < word.size(); ++b)
    if (w.value(0, word[b]) == Tri::One) v |= uint64_t{1} << b;
  return v;
}

const char* kAdder =
    "module top(input [3:0] a, input [3:0] b, output [3:0] y, output c);\n"
    "  wire [4:0] s;\n  assign s = {1'b0, a} + {1'b0, b};\n  assign y = s[3:0];\n  assign c = s[4];\nendmodule\n";

}  // namespace

TEST(Parse, RoundTripIsFixedPoint) {
  for (auto k : bench::all_kinds()) {
    auto sc = bench::generate(k, 4, {4, 3});
    for (const std::string* src : {&sc.spec_source, &sc.imp_source}) {
      auto ast = parse(*src);
      std::string printed = print(ast);
      EXPECT_EQ(parse(printed), ast) << bench::to_string(k);
      EXPECT_EQ(print(parse(printed)), printed);
    }
  }
}

TEST(Parse, SyntaxErrorHasLineAndColumn) {
  const std::string src = "module top(input a, output y);\n  assign y = a &;\nendmodule\n";
  EXPECT_EQ(kind_of([&] { parse(src); }), ErrorKind::SyntaxError);
  EXPECT_EQ(detail_of([&] { parse(src); }).substr(0, 5), "2:17:");
  EXPECT_EQ(kind_of([&] { parse("module top(input a output y); endmodule"); }), ErrorKind::SyntaxError);
}

TEST(Parse, ExpressionPrecedence) {
  EXPECT_EQ(print(parse_expression("a + b * c")), print(parse_expression("a + (b * c)")));
  EXPECT_EQ(print(parse_expression("a & b | c")), print(parse_expression("(a & b) | c")));
  EXPECT_EQ(print(parse_expression("s ? a : b")), "s ? a : b");
}

TEST(Elaborate, AdderMatchesIntegers) {
  Netlist n = elaborate(parse(kAdder), "top");
  for (uint64_t a = 0; a < 16; ++a)
    for (uint64_t b = 0; b < 16; ++b) {
      EXPECT_EQ(eval(n, {{"a", a}, {"b", b}}, "y"), (a + b) & 15);
      EXPECT_EQ(eval(n, {{"a", a}, {"b", b}}, "c"), (a + b) >> 4);
    }
}

TEST(Elaborate, OperatorsAgreeWithIntegers) {
  struct Case {
    const char* op;
    uint64_t (*f)(uint64_t, uint64_t);
  };
  const Case cases[] = {
      {"a - b", [](uint64_t a, uint64_t b) { return (a - b) & 7; }},
      {"a * b", [](uint64_t a, uint64_t b) { return (a * b) & 7; }},
      {"a ^ b", [](uint64_t a, uint64_t b) { return a ^ b; }},
      {"{2'b0, a < b}", [](uint64_t a, uint64_t b) { return uint64_t{a < b}; }},
      {"{2'b0, a == b}", [](uint64_t a, uint64_t b) { return uint64_t{a == b}; }},
      {"a << 1", [](uint64_t a, uint64_t) { return (a << 1) & 7; }},
      {"a >> 1", [](uint64_t a, uint64_t) { return a >> 1; }},
      {"~a", [](uint64_t a, uint64_t) { return ~a & 7; }},
  };
  for (const auto& c : cases) {
    std::string src = std::string("module top(input [2:0] a, input [2:0] b, output [2:0] y);\n  assign y = ") +
                      c.op + ";\nendmodule\n";
    Netlist n = elaborate(parse(src), "top");
    for (uint64_t a = 0; a < 8; ++a)
      for (uint64_t b = 0; b < 8; ++b) EXPECT_EQ(eval(n, {{"a", a}, {"b", b}}), c.f(a, b)) << c.op << " " << a << " " << b;
  }
}

TEST(Elaborate, ParametersAndOverrides) {
  const std::string src =
      "module addk #(param K = 3) (input [3:0] x, output [3:0] z);\n  assign z = x + K;\nendmodule\n"
      "module top #(param J = 1) (input [3:0] a, output [3:0] y, output [3:0] w);\n"
      "  addk u (.x(a), .z(y));\n  addk #(.K(J)) v (.x(a), .z(w));\nendmodule\n";
  Netlist n = elaborate(parse(src), "top");
  EXPECT_EQ(eval(n, {{"a", 2}}, "y"), 5u);
  EXPECT_EQ(eval(n, {{"a", 2}}, "w"), 3u);
  Netlist o = elaborate(parse(src), "top", {{"J", 7}});
  EXPECT_EQ(eval(o, {{"a", 2}}, "w"), 9u);
  EXPECT_EQ(kind_of([&] { elaborate(parse(src), "top", {{"NOPE", 1}}); }), ErrorKind::UnknownParameter);
  EXPECT_FALSE(n.instances().empty());
}

TEST(Elaborate, Errors) {
  auto err = [](const std::string& body) {
    return kind_of([&] { elaborate(parse(body), "top"); });
  };
  EXPECT_EQ(err("module top(input a, input a, output y);\n  assign y = a;\nendmodule\n"), ErrorKind::DuplicatePort);
  EXPECT_EQ(err("module top(input a, output y);\n  assign y = q;\nendmodule\n"), ErrorKind::UnknownIdentifier);
  EXPECT_EQ(err("module top(input a, output y);\n  nomod u (.x(a));\n  assign y = a;\nendmodule\n"),
            ErrorKind::UnknownModule);
  EXPECT_EQ(err("module top(input a, output y);\n  assign y = a;\n  assign y = ~a;\nendmodule\n"),
            ErrorKind::MultipleDrivers);
  EXPECT_EQ(err("module top(input a, output y);\n  wire w;\n  assign y = w;\nendmodule\n"), ErrorKind::UndrivenNet);
  EXPECT_EQ(err("module top(input [1:0] a, output y);\n  assign y = a;\nendmodule\n"), ErrorKind::WidthMismatch);
  EXPECT_EQ(err("module top(input a, output y);\n  top u (.a(a), .y(y));\nendmodule\n"),
            ErrorKind::RecursiveInstantiation);
  EXPECT_EQ(kind_of([&] { elaborate(parse("module m(input a, output y);\n  assign y = a;\nendmodule\n"), "top"); }),
            ErrorKind::UnknownModule);
}

TEST(Elaborate, UninitAndXPolicies) {
  const std::string src =
      "module top(input a, output y);\n  reg r init uninit;\n  always r <= a;\n  assign y = r;\nendmodule\n";
  Netlist sym = elaborate(parse(src), "top");
  EXPECT_EQ(sym.registers()[0].init, Init::Uninit);
  Netlist zero = elaborate(parse(src), "top", {}, XPolicy::all(XMode::Zero));
  EXPECT_EQ(zero.registers()[0].init, Init::Zero);
  Netlist one = elaborate(parse(src), "top", {}, XPolicy::all(XMode::One));
  EXPECT_EQ(one.registers()[0].init, Init::One);

  const std::string xlit = "module top(input a, output y);\n  assign y = a ^ 1'bx;\nendmodule\n";
  Netlist xs = elaborate(parse(xlit), "top");
  bool has_xsource = false;
  for (const auto& i : xs.inputs()) has_xsource |= i.role == InputRole::XSource;
  EXPECT_TRUE(has_xsource);
  EXPECT_EQ(parse_xmode("symbolic"), XMode::Symbolic);
  EXPECT_EQ(parse_xmode(to_string(XMode::Zero)), XMode::Zero);
  EXPECT_FALSE(parse_xmode("maybe"));
}

TEST(Elaborate, ListXSources) {
  const std::string src =
      "module top(input a, output y);\n  reg [1:0] r init uninit;\n  reg s init 0;\n  always r <= {a, a};\n"
      "  always s <= a;\n  assign y = r[0] ^ s ^ 1'bx;\nendmodule\n";
  auto xs = list_x_sources(parse(src), "top");
  size_t regs = 0, lits = 0;
  for (const auto& x : xs) {
    regs += x.kind == XSourceKind::UninitRegister;
    lits += x.kind == XSourceKind::XLiteral;
  }
  EXPECT_EQ(regs, 2u);
  EXPECT_EQ(lits, 1u);
  EXPECT_GT(xs.front().loc.line, 0);
}

TEST(Elaborate, Deterministic) {
  for (auto k : bench::all_kinds()) {
    auto sc = bench::generate(k, 9, {3, 3});
    auto ast = parse(sc.imp_source);
    std::string top = "top";
    EXPECT_EQ(dump(elaborate(ast, top)), dump(elaborate(ast, top))) << bench::to_string(k);
  }
}

TEST(Elaborate, ParameterIfSelectsBranch) {
  const std::string src =
      "module top #(param FAST = 0) (input [1:0] d, output [1:0] y);\n"
      "  if (FAST)\n    assign y = d;\n  else\n    assign y = ~d;\n  endif\nendmodule\n";
  EXPECT_EQ(eval(elaborate(parse(src), "top"), {{"d", 1}}), 2u);
  EXPECT_EQ(eval(elaborate(parse(src), "top", {{"FAST", 1}}), {{"d", 1}}), 1u);
  const std::string bad = "module top(input en, output y);\n  if (en)\n    assign y = en;\n  endif\nendmodule\n";
  EXPECT_EQ(kind_of([&] { elaborate(parse(bad), "top"); }), ErrorKind::UnknownIdentifier);
}

TEST(Elaborate, RegisterWithoutAlwaysHolds) {
  const std::string src =
      "module top(input a, output [1:0] y);\n  reg [1:0] r init 2'd2;\n  assign y = r;\nendmodule\n";
  Netlist n = elaborate(parse(src), "top");
  Stimulus s;
  s.cycles = {{{"a", Tri::Zero}}, {{"a", Tri::One}}, {{"a", Tri::Zero}}};
  Waveform w = simulate(n, s);
  for (size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(w.value(c, n.outputs()[*n.find_output("y[0]")].lit), Tri::Zero);
    EXPECT_EQ(w.value(c, n.outputs()[*n.find_output("y[1]")].lit), Tri::One);
  }
}
