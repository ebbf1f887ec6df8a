#include "seqeq/bench.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "seqeq/cec.hpp"
#include "seqeq/sec.hpp"
#include "seqeq/snl.hpp"
#include "seqeq/xcheck.hpp"

namespace seqeq::bench {

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Retime: return "RETIME";
    case ScenarioKind::ParallelPath: return "PARALLEL_PATH";
    case ScenarioKind::PipelineDelta: return "PIPELINE_DELTA";
    case ScenarioKind::ChickenBit: return "CHICKEN_BIT";
    case ScenarioKind::ClockGate: return "CLOCK_GATE";
    case ScenarioKind::ParamDefault: return "PARAM_DEFAULT";
    case ScenarioKind::XUninit: return "X_UNINIT";
    case ScenarioKind::OpcodeBuckets: return "OPCODE_BUCKETS";
  }
  return "?";
}

std::vector<ScenarioKind> all_kinds() {
  return {ScenarioKind::Retime,    ScenarioKind::ParallelPath, ScenarioKind::PipelineDelta, ScenarioKind::ChickenBit,
          ScenarioKind::ClockGate, ScenarioKind::ParamDefault, ScenarioKind::XUninit,       ScenarioKind::OpcodeBuckets};
}

std::optional<ScenarioKind> parse_kind(const std::string& text) {
  std::string norm;
  for (char c : text) norm += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (ScenarioKind k : all_kinds())
    if (norm == to_string(k)) return k;
  return std::nullopt;
}

const char* to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::OperatorSwap: return "operator-swap";
    case MutationKind::OperandSwap: return "operand-swap";
    case MutationKind::InvertedLiteral: return "inverted-literal";
    case MutationKind::ConstantFlip: return "constant-flip";
    case MutationKind::WrongWire: return "wrong-wire";
  }
  return "?";
}

namespace {

using Rng = std::mt19937_64;

uint64_t pick(Rng& rng, uint64_t n) { return n ? rng() % n : 0; }
uint64_t mask(int w) { return w >= 64 ? ~uint64_t{0} : (uint64_t{1} << w) - 1; }
std::string dec(int w, uint64_t v) { return std::to_string(w) + "'d" + std::to_string(v & mask(w)); }
std::string range(int w) { return w == 1 ? "" : "[" + std::to_string(w - 1) + ":0] "; }

std::string bits(const std::string& x, int msb, int lsb) {
  if (msb == lsb) return x + "[" + std::to_string(msb) + "]";
  return x + "[" + std::to_string(msb) + ":" + std::to_string(lsb) + "]";
}

/// Rotate left by r, 1 <= r < w.
std::string rotl(const std::string& x, int r, int w) {
  return "{" + bits(x, w - 1 - r, 0) + ", " + bits(x, w - 1, w - r) + "}";
}

/// A bijective word function g with g(0) = c.
struct Stage {
  int family = 0;
  int r = 1;
  uint64_t c = 0;
  uint64_t k = 1;  // odd multiplier
};

Stage random_stage(Rng& rng, int w, bool zero_const = false) {
  Stage s;
  s.family = static_cast<int>(pick(rng, 4));
  s.r = 1 + static_cast<int>(pick(rng, static_cast<uint64_t>(w - 1)));
  const uint64_t c = pick(rng, uint64_t{1} << w);
  s.c = zero_const ? 0 : c;
  s.k = (pick(rng, uint64_t{1} << w) | 1) & mask(w);
  return s;
}

std::string apply(const Stage& s, const std::string& x, int w) {
  switch (s.family) {
    case 0: return "(" + rotl(x, s.r, w) + " ^ " + dec(w, s.c) + ")";
    case 1: return "(" + rotl(x, s.r, w) + " + " + dec(w, s.c) + ")";
    case 2: return "((" + x + " ^ (" + x + " >> " + std::to_string(s.r) + ")) + " + dec(w, s.c) + ")";
    default: return "((" + x + " * " + dec(w, s.k) + ") + " + dec(w, s.c) + ")";
  }
}

/// Config fragments of one scenario.
struct Parts {
  std::string mode = "sec";
  std::vector<std::string> mapping;
  std::vector<std::string> constraints;
  std::vector<std::string> cases;
  std::vector<std::string> helpers;
  std::vector<std::string> engine = {"bmc_depth = 20", "k_max = 20"};
  std::vector<std::string> tail;  // extra sections, verbatim
};

std::string render(const Parts& p) {
  std::ostringstream os;
  os << "[spec]\nfile = spec.snl\ntop = top\n\n[imp]\nfile = imp.snl\ntop = top\n\n[task]\nmode = " << p.mode << "\n";
  auto section = [&](const char* name, const std::vector<std::string>& lines) {
    if (lines.empty()) return;
    os << "\n[" << name << "]\n";
    for (const auto& l : lines) os << l << "\n";
  };
  section("mapping", p.mapping);
  section("constraints", p.constraints);
  section("cases", p.cases);
  section("helpers", p.helpers);
  section("engine", p.engine);
  for (const auto& t : p.tail) os << "\n" << t;
  return os.str();
}

struct Built {
  std::string spec;
  std::string imp;
  Parts parts;
  std::string requirement;
  std::vector<NetPair> truth;
  Status expected = Status::Equivalent;
};

std::string port_in(const std::string& name, int w) { return "input " + range(w) + name; }
std::string port_out(const std::string& name, int w) { return "output " + range(w) + name; }
std::string reg(const std::string& name, int w, const std::string& init) {
  return "  reg " + range(w) + name + " init " + init + ";\n";
}
std::string s_name(int i) { return "s" + std::to_string(i); }

std::vector<NetPair> same_names(int from, int to, const std::string& prefix = "s") {
  std::vector<NetPair> out;
  for (int i = from; i <= to; ++i) out.push_back({prefix + std::to_string(i), prefix + std::to_string(i)});
  return out;
}

// Spec: s1 <= g1(a), s_i <= g_i(s_{i-1}), y = sD. Imp: the logic of stage j
// moves behind the register of stage j+1 (m_j).
Built retime(Rng& rng, int w, int d, bool faulty) {
  std::vector<Stage> g(d + 1);
  for (int i = 1; i <= d; ++i) g[i] = random_stage(rng, w);
  const int j = 1 + static_cast<int>(pick(rng, static_cast<uint64_t>(d - 1)));
  const std::string head = "module top(" + port_in("a", w) + ", " + port_out("y", w) + ");\n";
  std::string spec = head, imp = head;
  for (int i = 1; i <= d; ++i) {
    spec += reg(s_name(i), w, "0");
    if (i != j) imp += reg(s_name(i), w, "0");
  }
  const uint64_t m_init = g[j + 1].c ^ (faulty ? 1 : 0);
  imp += reg("m" + std::to_string(j), w, dec(w, m_init));
  imp += "  wire " + range(w) + "t" + std::to_string(j) + ";\n";
  for (int i = 1; i <= d; ++i) {
    const std::string prev = i == 1 ? "a" : s_name(i - 1);
    spec += "  always " + s_name(i) + " <= " + apply(g[i], prev, w) + ";\n";
    if (i == j) {
      imp += "  assign t" + std::to_string(j) + " = " + apply(g[i], prev, w) + ";\n";
      imp += "  always m" + std::to_string(j) + " <= " + apply(g[i + 1], "t" + std::to_string(j), w) + ";\n";
    } else if (i == j + 1) {
      imp += "  always " + s_name(i) + " <= m" + std::to_string(j) + ";\n";
    } else {
      imp += "  always " + s_name(i) + " <= " + apply(g[i], prev, w) + ";\n";
    }
  }
  spec += "  assign y = " + s_name(d) + ";\nendmodule\n";
  imp += "  assign y = " + s_name(d) + ";\nendmodule\n";
  Built b{spec, imp, {}, "", {}, faulty ? Status::NotEquivalent : Status::Equivalent};
  for (auto& p : same_names(1, d))
    if (p.spec != s_name(j)) b.truth.push_back(p);
  return b;
}

// Spec computes f1(a) op f2(b) into one register; imp keeps both halves in
// parallel registers and combines them one stage later.
Built parallel_path(Rng& rng, int w, int d, bool faulty) {
  static const char* kOps[] = {"^", "+", "|", "&"};
  const Stage f1 = random_stage(rng, w), f2 = random_stage(rng, w);
  std::vector<Stage> g(d + 1);
  for (int i = 2; i <= d; ++i) g[i] = random_stage(rng, w);
  const int op = static_cast<int>(pick(rng, 4));
  const int imp_op = faulty ? (op + 1 + static_cast<int>(pick(rng, 3))) % 4 : op;
  const std::string head =
      "module top(" + port_in("a", w) + ", " + port_in("b", w) + ", " + port_out("y", w) + ");\n";
  std::string spec = head, imp = head;
  spec += reg("st1", w, "0");
  imp += reg("p1", w, "0") + reg("q1", w, "0");
  imp += "  wire " + range(w) + "pq;\n";
  for (int i = 2; i <= d; ++i) {
    spec += reg(s_name(i), w, "0");
    imp += reg(s_name(i), w, "0");
  }
  spec += "  always st1 <= " + apply(f1, "a", w) + " " + kOps[op] + " " + apply(f2, "b", w) + ";\n";
  spec += "  always s2 <= " + apply(g[2], "st1", w) + ";\n";
  imp += "  always p1 <= " + apply(f1, "a", w) + ";\n";
  imp += "  always q1 <= " + apply(f2, "b", w) + ";\n";
  imp += std::string("  assign pq = p1 ") + kOps[imp_op] + " q1;\n";
  imp += "  always s2 <= " + apply(g[2], "pq", w) + ";\n";
  for (int i = 3; i <= d; ++i) {
    const std::string line = "  always " + s_name(i) + " <= " + apply(g[i], s_name(i - 1), w) + ";\n";
    spec += line;
    imp += line;
  }
  spec += "  assign y = " + s_name(d) + ";\nendmodule\n";
  imp += "  assign y = " + s_name(d) + ";\nendmodule\n";
  return {spec, imp, {}, "", same_names(2, d), faulty ? Status::NotEquivalent : Status::Equivalent};
}

// Imp has one extra register after stage k; outputs match with latency (0, 1).
// Stage functions fix 0 so the reset state is consistent across the shift.
Built pipeline_delta(Rng& rng, int w, int d, bool faulty) {
  std::vector<Stage> g(d + 1);
  for (int i = 1; i <= d; ++i) g[i] = random_stage(rng, w, true);
  const int k = 1 + static_cast<int>(pick(rng, static_cast<uint64_t>(d)));
  std::vector<Stage> gi = g;
  if (faulty) gi[1 + pick(rng, static_cast<uint64_t>(d))].c = 1;
  const std::string head = "module top(" + port_in("a", w) + ", " + port_out("y", w) + ");\n";
  std::string spec = head, imp = head;
  for (int i = 1; i <= d; ++i) {
    spec += reg(s_name(i), w, "0");
    imp += reg(s_name(i), w, "0");
  }
  imp += reg("x" + std::to_string(k), w, "0");
  for (int i = 1; i <= d; ++i) {
    const std::string prev = i == 1 ? "a" : s_name(i - 1);
    spec += "  always " + s_name(i) + " <= " + apply(g[i], prev, w) + ";\n";
    const std::string iprev = i == k + 1 ? "x" + std::to_string(k) : prev;
    imp += "  always " + s_name(i) + " <= " + apply(gi[i], iprev, w) + ";\n";
  }
  imp += "  always x" + std::to_string(k) + " <= " + s_name(k) + ";\n";
  spec += "  assign y = " + s_name(d) + ";\nendmodule\n";
  imp += "  assign y = " + (k == d ? "x" + std::to_string(k) : s_name(d)) + ";\nendmodule\n";
  Built b{spec, imp, {}, "latency = [0, 1]", same_names(1, k), faulty ? Status::NotEquivalent : Status::Equivalent};
  b.parts.mapping.push_back("latency = [0, 1]");
  return b;
}

// Imp adds a chicken bit selecting a new datapath; legacy behavior when 0.
Built chicken_bit(Rng& rng, int w, int d, bool faulty) {
  std::vector<Stage> g(d + 1);
  for (int i = 1; i <= d; ++i) g[i] = random_stage(rng, w);
  const uint64_t flip = 1 + pick(rng, mask(w));
  Stage legacy = g[1];
  if (faulty) legacy.c = (legacy.c + 1) & mask(w);
  std::string spec = "module top(" + port_in("a", w) + ", " + port_out("y", w) + ");\n";
  std::string imp =
      "module top(" + port_in("a", w) + ", " + port_in("chicken", 1) + ", " + port_out("y", w) + ");\n";
  for (int i = 1; i <= d; ++i) {
    spec += reg(s_name(i), w, "0");
    imp += reg(s_name(i), w, "0");
  }
  spec += "  always s1 <= " + apply(g[1], "a", w) + ";\n";
  imp += "  always s1 <= chicken ? (" + apply(g[1], "a", w) + " ^ " + dec(w, flip) + ") : " + apply(legacy, "a", w) +
         ";\n";
  for (int i = 2; i <= d; ++i) {
    const std::string line = "  always " + s_name(i) + " <= " + apply(g[i], s_name(i - 1), w) + ";\n";
    spec += line;
    imp += line;
  }
  spec += "  assign y = " + s_name(d) + ";\nendmodule\n";
  imp += "  assign y = " + s_name(d) + ";\nendmodule\n";
  Built b{spec, imp, {}, "constraint chicken == 1'b0", same_names(1, d),
          faulty ? Status::NotEquivalent : Status::Equivalent};
  b.parts.constraints.push_back("legacy_mode = chicken == 1'b0");
  return b;
}

// Imp updates data registers only when the valid bit of the previous stage
// is set; outputs are compared only while the last valid bit is high.
Built clock_gate(Rng& rng, int w, int d, bool faulty) {
  std::vector<Stage> g(d + 1);
  for (int i = 1; i <= d; ++i) g[i] = random_stage(rng, w);
  const std::string head = "module top(" + port_in("en", 1) + ", " + port_in("d", w) + ", " + port_out("y", w) +
                           ", " + port_out("vld", 1) + ");\n";
  std::string spec = head, imp = head;
  for (int i = 1; i <= d; ++i) {
    const std::string decl = reg("v" + std::to_string(i), 1, "0") + reg("r" + std::to_string(i), w, "0");
    spec += decl;
    imp += decl;
  }
  for (int i = 1; i <= d; ++i) {
    const std::string v = "v" + std::to_string(i), r = "r" + std::to_string(i);
    const std::string prev_v = i == 1 ? "en" : "v" + std::to_string(i - 1);
    const std::string prev_r = i == 1 ? "d" : "r" + std::to_string(i - 1);
    const std::string valid_line = "  always " + v + " <= " + prev_v + ";\n";
    spec += valid_line;
    imp += valid_line;
    spec += "  always " + r + " <= " + apply(g[i], prev_r, w) + ";\n";
    const std::string gate = faulty && i == 1 ? "(en & d[0])" : prev_v;
    imp += "  always " + r + " <= " + gate + " ? " + apply(g[i], prev_r, w) + " : " + r + ";\n";
  }
  const std::string outs = "  assign y = r" + std::to_string(d) + ";\n  assign vld = v" + std::to_string(d) + ";\n";
  spec += outs + "endmodule\n";
  imp += outs + "endmodule\n";
  Built b{spec, imp, {}, "qualifier v" + std::to_string(d), same_names(1, d, "v"),
          faulty ? Status::NotEquivalent : Status::Equivalent};
  b.parts.mapping.push_back("qualifier = v" + std::to_string(d));
  return b;
}

// A parameterized submodule whose default changed in the imp, which instead
// passes the old value explicitly. A second submodule is untouched.
Built param_default(Rng& rng, int w, int d, bool faulty) {
  const Stage inner = random_stage(rng, w);
  const Stage kept = random_stage(rng, w);
  std::vector<Stage> g(d + 1);
  for (int i = 3; i <= d; ++i) g[i] = random_stage(rng, w);
  const uint64_t old_k = pick(rng, uint64_t{1} << w);
  const uint64_t new_k = (old_k + 1 + pick(rng, mask(w))) & mask(w);
  auto stage_module = [&](uint64_t k) {
    return "module stage #(param K = " + std::to_string(k) + ") (" + port_in("x", w) + ", " + port_out("z", w) +
           ");\n  assign z = " + apply(inner, "x", w) + " + K;\nendmodule\n\n";
  };
  const std::string keep = "module keep(" + port_in("x", w) + ", " + port_out("z", w) + ");\n  assign z = " +
                           apply(kept, "x", w) + ";\nendmodule\n\n";
  auto top = [&](const std::string& inst) {
    std::string t = "module top(" + port_in("a", w) + ", " + port_out("y", w) + ");\n";
    t += "  wire " + range(w) + "u_out;\n  wire " + range(w) + "k_out;\n";
    for (int i = 1; i <= d; ++i) t += reg(s_name(i), w, "0");
    t += "  " + inst + " (.x(a), .z(u_out));\n";
    t += "  keep k0 (.x(s1), .z(k_out));\n";
    t += "  always s1 <= u_out;\n  always s2 <= k_out;\n";
    for (int i = 3; i <= d; ++i) t += "  always " + s_name(i) + " <= " + apply(g[i], s_name(i - 1), w) + ";\n";
    t += "  assign y = " + s_name(d) + ";\nendmodule\n";
    return t;
  };
  const std::string spec = stage_module(old_k) + keep + top("stage u");
  const std::string imp = stage_module(new_k) + keep +
                          top(faulty ? "stage u" : "stage #(.K(" + std::to_string(old_k) + ")) u");
  return {spec, imp, {}, "", same_names(1, d), faulty ? Status::NotEquivalent : Status::Equivalent};
}

// An uninitialized register feeding the datapath: masked by an AND with 0
// in the clean variant, leaking to the output in the faulty one.
Built x_uninit(Rng& rng, int w, int d, bool faulty) {
  const Stage fu = random_stage(rng, w);
  std::vector<Stage> g(d + 1);
  for (int i = 2; i <= d; ++i) g[i] = random_stage(rng, w);
  std::string src = "module top(" + port_in("a", w) + ", " + port_out("y", w) + ");\n";
  src += reg("u", w, "uninit");
  for (int i = 1; i <= d; ++i) src += reg(s_name(i), w, "0");
  src += "  always u <= " + apply(fu, "a", w) + ";\n";
  src += faulty ? "  always s1 <= u + a;\n" : "  always s1 <= (u & " + dec(w, 0) + ") + a;\n";
  for (int i = 2; i <= d; ++i) src += "  always " + s_name(i) + " <= " + apply(g[i], s_name(i - 1), w) + ";\n";
  src += "  assign y = " + s_name(d) + ";\nendmodule\n";
  Built b{src, src, {}, "xcheck mode uninit, policy 01", {}, faulty ? Status::NotEquivalent : Status::Equivalent};
  b.parts.mode = "xcheck";
  b.parts.tail.push_back("[xcheck]\nmode = uninit\npolicy = 01\n");
  return b;
}

// 16-opcode ALU with a registered result. The imp decodes opcode bits as a
// tree and rewrites each operation into an equivalent form.
Built opcode_buckets(Rng& rng, int w, int /*depth*/, bool faulty) {
  const std::string W = std::to_string(w);
  const uint64_t k1 = pick(rng, uint64_t{1} << w), k2 = pick(rng, uint64_t{1} << w);
  const std::vector<std::pair<std::string, std::string>> ops = {
      {"a + b", "b + a"},
      {"a - b", faulty ? "a + ~b" : "a + ~b + " + dec(w, 1)},
      {"a & b", "~(~a | ~b)"},
      {"a | b", "~(~a & ~b)"},
      {"a ^ b", "(a | b) & ~(a & b)"},
      {"~a", "a ^ " + dec(w, mask(w))},
      {"a << 1", "a + a"},
      {"a >> 1", "{1'b0, " + bits("a", w - 1, 1) + "}"},
      {"b - a", "~a + b + " + dec(w, 1)},
      {"a + " + dec(w, k1), dec(w, k1) + " + a"},
      {"(a < b) ? a : b", "(b > a) ? a : b"},
      {"(a > b) ? a : b", "(b < a) ? a : b"},
      {"{" + bits("a", w - 2, 0) + ", " + bits("a", w - 1, w - 1) + "}", "(a << 1) | (a >> " + std::to_string(w - 1) + ")"},
      {"~(a & b)", "~a | ~b"},
      {"(a == b) ? " + dec(w, 1) + " : " + dec(w, 0), "((a ^ b) == " + dec(w, 0) + ") ? " + dec(w, 1) + " : " + dec(w, 0)},
      {"a ^ " + dec(w, k2), "~(~a ^ " + dec(w, k2) + ")"},
  };
  std::vector<int> perm(16);
  for (int i = 0; i < 16; ++i) perm[i] = i;
  for (int i = 15; i > 0; --i) std::swap(perm[i], perm[pick(rng, static_cast<uint64_t>(i + 1))]);

  const std::string head = "module top(" + port_in("op", 4) + ", " + port_in("a", w) + ", " + port_in("b", w) + ", " +
                           port_out("y", w) + ");\n" + reg("r", w, "0");
  std::string chain;
  for (int code = 0; code < 15; ++code)
    chain += "op == 4'd" + std::to_string(code) + " ? (" + ops[perm[code]].first + ") :\n      ";
  chain += "(" + ops[perm[15]].first + ")";
  std::function<std::string(int, int)> tree = [&](int bit, int prefix) -> std::string {
    if (bit < 0) return "(" + ops[perm[prefix]].second + ")";
    return "(op[" + std::to_string(bit) + "] ? " + tree(bit - 1, prefix | (1 << bit)) + " : " + tree(bit - 1, prefix) +
           ")";
  };
  const std::string spec = head + "  always r <= " + chain + ";\n  assign y = r;\nendmodule\n";
  const std::string imp = head + "  always r <= " + tree(3, 0) + ";\n  assign y = r;\nendmodule\n";
  Built b{spec, imp, {}, "", {{"r", "r"}}, faulty ? Status::NotEquivalent : Status::Equivalent};
  b.parts.cases = {"low = op < 4'd8", "high = op >= 4'd8"};
  return b;
}

void check_size(ScenarioKind kind, const BenchSize& size) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::SizeOutOfRange, std::string(to_string(kind)) + " width=" + std::to_string(size.width) +
                                               " depth=" + std::to_string(size.depth) + ": " + why);
  };
  if (size.width < 2 || size.width > 16) fail("width must be within 2..16");
  if (size.depth < 2 || size.depth > 64) fail("depth must be within 2..64");
  if (kind == ScenarioKind::OpcodeBuckets && 4 + 2 * size.width > 36) fail("too many inputs");
}

constexpr size_t kStressRegisters = 512;
constexpr size_t kDeskRegisters = 64;
constexpr size_t kOracleStateBits = 24;

Scenario build(ScenarioKind kind, uint64_t seed, BenchSize size, bool faulty) {
  check_size(kind, size);
  Rng rng(seed * 0x9E3779B97F4A7C15ull + static_cast<uint64_t>(kind) + 1);
  Built b;
  switch (kind) {
    case ScenarioKind::Retime: b = retime(rng, size.width, size.depth, faulty); break;
    case ScenarioKind::ParallelPath: b = parallel_path(rng, size.width, size.depth, faulty); break;
    case ScenarioKind::PipelineDelta: b = pipeline_delta(rng, size.width, size.depth, faulty); break;
    case ScenarioKind::ChickenBit: b = chicken_bit(rng, size.width, size.depth, faulty); break;
    case ScenarioKind::ClockGate: b = clock_gate(rng, size.width, size.depth, faulty); break;
    case ScenarioKind::ParamDefault: b = param_default(rng, size.width, size.depth, faulty); break;
    case ScenarioKind::XUninit: b = x_uninit(rng, size.width, size.depth, faulty); break;
    case ScenarioKind::OpcodeBuckets: b = opcode_buckets(rng, size.width, size.depth, faulty); break;
  }
  Scenario s;
  s.kind = kind;
  s.seed = seed;
  s.size = size;
  s.spec_source = std::move(b.spec);
  s.imp_source = std::move(b.imp);
  s.config = render(b.parts);
  s.expected = b.expected;
  s.requirement = b.requirement;
  s.register_truth = std::move(b.truth);

  // Size tiers and generation-time certification.
  EquivalenceTask task = scenario_task(s);
  const size_t regs = std::max(task.spec->registers().size(), task.imp->registers().size());
  if (regs > kStressRegisters)
    throw Error(ErrorKind::SizeOutOfRange, std::string(to_string(kind)) + ": " + std::to_string(regs) +
                                               " registers exceed the stress tier (512)");
  if (regs > kDeskRegisters) {
    s.oracle = "skipped (stress tier)";
  } else if (task.spec->registers().size() + task.imp->registers().size() > kOracleStateBits) {
    s.oracle = "skipped (above oracle size)";
  } else if (auto verdict = oracle_check(task)) {
    if (*verdict != s.expected)
      throw std::logic_error(std::string("bench: oracle says ") + seqeq::to_string(*verdict) + " for " +
                             to_string(kind) + " seed " + std::to_string(seed) + ", expected " +
                             seqeq::to_string(s.expected));
    s.oracle = "confirmed";
  } else {
    s.oracle = "skipped (state limit)";
  }
  return s;
}

}  // namespace

Scenario generate(ScenarioKind kind, uint64_t seed, BenchSize size) { return build(kind, seed, size, false); }

Scenario generate_faulty(ScenarioKind kind, uint64_t seed, BenchSize size) { return build(kind, seed, size, true); }

void write_scenario(const Scenario& s, const std::filesystem::path& dir) {
  write_file(dir / "spec.snl", s.spec_source);
  write_file(dir / "imp.snl", s.imp_source);
  write_file(dir / "task.cfg", s.config);
  std::ostringstream os;
  os << seqeq::to_string(s.expected) << "\n";
  os << "kind: " << to_string(s.kind) << "\n";
  os << "seed: " << s.seed << "\n";
  os << "width: " << s.size.width << "\ndepth: " << s.size.depth << "\n";
  os << "requires: " << (s.requirement.empty() ? "nothing" : s.requirement) << "\n";
  os << "oracle: " << s.oracle << "\n";
  os << "registers:";
  for (const auto& p : s.register_truth) os << " " << p.spec << "=" << p.imp;
  os << "\n";
  write_file(dir / "expected.txt", os.str());
}

TaskConfig scenario_config(const Scenario& s) {
  TaskConfig c = parse_config(s.config);
  c.spec.source = s.spec_source;
  c.imp.source = s.imp_source;
  return c;
}

EquivalenceTask scenario_task(const Scenario& s) {
  const TaskConfig c = scenario_config(s);
  if (c.mode == TaskMode::XCheck) {
    XCheckOptions o{c.xmode, c.xpolicy, c.constraints, c.spec.params, c.engine};
    return xcheck_task(snl::parse(s.spec_source), c.spec.top.empty() ? "top" : c.spec.top, o);
  }
  return build_task(c);
}

Verdict run_task(const TaskConfig& c) {
  if (c.mode == TaskMode::XCheck) {
    auto modules = snl::parse(c.spec.source.empty() ? read_file(c.spec.file) : c.spec.source);
    if (modules.empty()) throw Error(ErrorKind::ConfigError, "[spec] design has no modules");
    const std::string top = c.spec.top.empty() ? modules.back().name : c.spec.top;
    XCheckReport r = check_x(modules, top, XCheckOptions{c.xmode, c.xpolicy, c.constraints, c.spec.params, c.engine});
    Verdict v = r.verdict;
    for (const auto& n : r.notes) v.notes.push_back(n);
    for (const auto& src : r.cone) v.notes.push_back(std::string("X source in cone: ") + snl::to_string(src.kind) + " " + src.net);
    return v;
  }
  EquivalenceTask t = build_task(c);
  return c.mode == TaskMode::Cec ? check_cec(t) : check_sec(t);
}

// ---------------------------------------------------------------------------
// Mutation
// ---------------------------------------------------------------------------

namespace {

struct Site {
  MutationKind kind;
  snl::Expr* expr;
  size_t module;
};

const std::vector<std::vector<std::string>> kOperatorClasses = {
    {"&", "|", "^"}, {"+", "-"}, {"==", "!="}, {"<", ">=", ">", "<="}, {"&&", "||"}};

const std::vector<std::string>* operator_class(const std::string& op) {
  for (const auto& c : kOperatorClasses)
    if (std::find(c.begin(), c.end(), op) != c.end()) return &c;
  return nullptr;
}

bool commutative(const std::string& op) {
  return op == "&" || op == "|" || op == "^" || op == "+" || op == "*" || op == "==" || op == "!=" || op == "&&" ||
         op == "||";
}

std::optional<int64_t> literal_value(const snl::Expr& e) {
  if (e.kind != snl::ExprKind::Const || e.value.bits.empty() || e.value.bits.size() > 62) return std::nullopt;
  int64_t v = 0;
  for (char c : e.value.bits) {
    if (c != '0' && c != '1') return std::nullopt;
    v = v * 2 + (c - '0');
  }
  return v;
}

std::optional<int> declared_width(const std::optional<snl::Range>& r) {
  if (!r) return 1;
  auto msb = literal_value(r->msb), lsb = literal_value(r->lsb);
  if (!msb || !lsb) return std::nullopt;
  return static_cast<int>(std::abs(*msb - *lsb) + 1);
}

using Widths = std::map<std::string, int>;

Widths module_widths(const snl::SourceModule& m) {
  Widths w;
  for (const auto& p : m.ports)
    if (auto n = declared_width(p.range)) w[p.name] = *n;
  std::function<void(const std::vector<snl::Item>&)> walk = [&](const std::vector<snl::Item>& items) {
    for (const auto& it : items) {
      if (it.kind == snl::ItemKind::Wire || it.kind == snl::ItemKind::Reg)
        if (auto n = declared_width(it.range)) w[it.name] = *n;
      walk(it.then_items);
      walk(it.else_items);
    }
  };
  walk(m.items);
  return w;
}

std::vector<std::string> same_width(const Widths& widths, const std::string& name) {
  std::vector<std::string> out;
  auto it = widths.find(name);
  if (it == widths.end()) return out;
  for (const auto& [n, w] : widths)
    if (w == it->second && n != name) out.push_back(n);
  return out;
}

void collect_expr(snl::Expr& e, size_t module, const Widths& widths, std::vector<Site>& out) {
  using snl::ExprKind;
  switch (e.kind) {
    case ExprKind::Ident:
      out.push_back({MutationKind::InvertedLiteral, &e, module});
      if (!same_width(widths, e.name).empty()) out.push_back({MutationKind::WrongWire, &e, module});
      return;
    case ExprKind::Const:
      if (e.value.width && literal_value(e)) out.push_back({MutationKind::ConstantFlip, &e, module});
      return;
    case ExprKind::Binary:
      if (operator_class(e.op)) out.push_back({MutationKind::OperatorSwap, &e, module});
      if (!commutative(e.op)) out.push_back({MutationKind::OperandSwap, &e, module});
      break;
    case ExprKind::Ternary:
      out.push_back({MutationKind::OperandSwap, &e, module});
      break;
    case ExprKind::Index:
    case ExprKind::Slice:
      return;  // selects keep their constant positions
    default:
      break;
  }
  for (auto& a : e.args) collect_expr(a, module, widths, out);
}

void collect_items(std::vector<snl::Item>& items, size_t module, const Widths& widths, std::vector<Site>& out) {
  for (auto& it : items) {
    switch (it.kind) {
      case snl::ItemKind::Assign:
      case snl::ItemKind::Always:
      case snl::ItemKind::If:
        collect_expr(it.rhs, module, widths, out);
        break;
      default:
        break;
    }
    collect_items(it.then_items, module, widths, out);
    collect_items(it.else_items, module, widths, out);
  }
}

std::vector<Site> collect_sites(std::vector<snl::SourceModule>& modules) {
  std::vector<Site> sites;
  for (size_t m = 0; m < modules.size(); ++m) collect_items(modules[m].items, m, module_widths(modules[m]), sites);
  return sites;
}

/// Applies the site's mutation in place; false when it cannot change anything.
bool apply_mutation(const Site& site, const Widths& widths, Rng& rng) {
  snl::Expr& e = *site.expr;
  switch (site.kind) {
    case MutationKind::OperatorSwap: {
      const auto& cls = *operator_class(e.op);
      std::vector<std::string> others;
      for (const auto& o : cls)
        if (o != e.op) others.push_back(o);
      e.op = others[pick(rng, others.size())];
      return true;
    }
    case MutationKind::OperandSwap:
      if (e.kind == snl::ExprKind::Ternary) {
        if (e.args[1] == e.args[2]) return false;
        std::swap(e.args[1], e.args[2]);
      } else {
        if (e.args[0] == e.args[1]) return false;
        std::swap(e.args[0], e.args[1]);
      }
      return true;
    case MutationKind::InvertedLiteral: {
      snl::Expr inner = e;
      snl::Expr inv;
      inv.kind = snl::ExprKind::Unary;
      inv.op = "~";
      inv.loc = e.loc;
      inv.args.push_back(std::move(inner));
      e = std::move(inv);
      return true;
    }
    case MutationKind::ConstantFlip: {
      std::string b = e.value.bits;
      const size_t i = pick(rng, b.size());
      b[i] = b[i] == '0' ? '1' : '0';
      e.value.bits = b;
      e.value.base = 'b';
      e.value.digits = b;
      e.value.width = static_cast<int>(b.size());
      return true;
    }
    case MutationKind::WrongWire: {
      auto others = same_width(widths, e.name);
      if (others.empty()) return false;
      e.name = others[pick(rng, others.size())];
      return true;
    }
  }
  return false;
}

}  // namespace

Mutant mutate(const std::string& source, uint64_t seed, const std::string& top) {
  const auto original = snl::parse(source);
  const std::string canonical = snl::print(original);
  auto probe = original;
  const size_t n = collect_sites(probe).size();
  if (n == 0) throw Error(ErrorKind::NoMutationSite, "no expression to mutate");
  Rng rng(seed);
  const size_t start = pick(rng, n);
  for (size_t step = 0; step < n; ++step) {
    auto modules = original;
    auto sites = collect_sites(modules);
    const Site site = sites[(start + step) % n];
    const Widths widths = module_widths(modules[site.module]);
    Mutation m;
    m.kind = site.kind;
    m.module = modules[site.module].name;
    m.line = site.expr->loc.line;
    m.col = site.expr->loc.col;
    m.before = snl::print(*site.expr);
    if (!apply_mutation(site, widths, rng)) continue;
    m.after = snl::print(*site.expr);
    std::string text = snl::print(modules);
    if (text == canonical) continue;
    if (!top.empty()) {
      try {
        snl::elaborate(snl::parse(text), top);
      } catch (const Error&) {
        continue;
      }
    }
    return {std::move(text), std::move(m)};
  }
  throw Error(ErrorKind::NoMutationSite, "no mutation site yields a valid design");
}

LabeledMutant mutate_scenario(const Scenario& scenario, uint64_t seed) {
  Mutant mu = mutate(scenario.imp_source, seed, "top");
  LabeledMutant out{scenario, mu.mutation};
  out.scenario.imp_source = mu.source;
  if (scenario.kind == ScenarioKind::XUninit) out.scenario.spec_source = mu.source;
  out.scenario.expected = Status::Inconclusive;
  out.scenario.oracle = "skipped (state limit)";
  if (auto v = oracle_check(scenario_task(out.scenario))) {
    out.mutation.equivalent = *v == Status::Equivalent;
    out.scenario.expected = *v;
    out.scenario.oracle = "confirmed";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random tasks
// ---------------------------------------------------------------------------

namespace {

struct Node {
  enum Kind { Var, Not, And, Or, Xor, Mux } kind = Var;
  std::string name;
  bool is_register = false;
  int reg = -1;
  std::vector<Node> kids;
};

Node random_tree(Rng& rng, int depth, int inputs, int registers) {
  Node n;
  if (depth == 0 || pick(rng, 4) == 0) {
    const uint64_t k = pick(rng, static_cast<uint64_t>(inputs + registers));
    if (k < static_cast<uint64_t>(inputs)) {
      n.name = "i" + std::to_string(k);
    } else {
      n.is_register = true;
      n.reg = static_cast<int>(k) - inputs;
      n.name = "r" + std::to_string(n.reg);
    }
    return n;
  }
  n.kind = static_cast<Node::Kind>(1 + pick(rng, 5));
  const int arity = n.kind == Node::Not ? 1 : n.kind == Node::Mux ? 3 : 2;
  for (int i = 0; i < arity; ++i) n.kids.push_back(random_tree(rng, depth - 1, inputs, registers));
  return n;
}

std::string print_spec(const Node& n) {
  switch (n.kind) {
    case Node::Var: return n.name;
    case Node::Not: return "~" + print_spec(n.kids[0]);
    case Node::And: return "(" + print_spec(n.kids[0]) + " & " + print_spec(n.kids[1]) + ")";
    case Node::Or: return "(" + print_spec(n.kids[0]) + " | " + print_spec(n.kids[1]) + ")";
    case Node::Xor: return "(" + print_spec(n.kids[0]) + " ^ " + print_spec(n.kids[1]) + ")";
    case Node::Mux:
      return "(" + print_spec(n.kids[0]) + " ? " + print_spec(n.kids[1]) + " : " + print_spec(n.kids[2]) + ")";
  }
  return {};
}

/// Function-preserving rewrite. Registers listed in `inverted` store their
/// complement under the name "rn<k>".
std::string print_imp(const Node& n, Rng& rng, const std::vector<bool>& inverted) {
  auto p = [&](size_t i) { return print_imp(n.kids[i], rng, inverted); };
  const uint64_t choice = pick(rng, 3);
  switch (n.kind) {
    case Node::Var:
      if (n.is_register && inverted[n.reg]) return "~rn" + std::to_string(n.reg);
      return n.name;
    case Node::Not: return "~" + p(0);
    case Node::And: {
      const std::string a = p(0), b = p(1);
      if (choice == 0) return "~(~" + a + " | ~" + b + ")";
      if (choice == 1) return "(" + b + " & " + a + ")";
      return "(" + a + " & " + b + ")";
    }
    case Node::Or: {
      const std::string a = p(0), b = p(1);
      if (choice == 0) return "~(~" + a + " & ~" + b + ")";
      if (choice == 1) return "(" + b + " | " + a + ")";
      return "(" + a + " | " + b + ")";
    }
    case Node::Xor: {
      const std::string a = p(0), b = p(1);
      if (choice == 0) return "((" + a + " & ~" + b + ") | (~" + a + " & " + b + "))";
      if (choice == 1) return "(" + b + " ^ " + a + ")";
      return "(" + a + " ^ " + b + ")";
    }
    case Node::Mux: {
      const std::string s = p(0), t = p(1), e = p(2);
      if (choice == 0) return "((" + s + " & " + t + ") | (~" + s + " & " + e + "))";
      if (choice == 1) return "(~" + s + " ? " + e + " : " + t + ")";
      return "(" + s + " ? " + t + " : " + e + ")";
    }
  }
  return {};
}

}  // namespace

RandomTask random_task(uint64_t seed, int max_inputs, int max_registers) {
  Rng rng(seed ^ 0x5DEECE66Dull);
  const int inputs = 1 + static_cast<int>(pick(rng, static_cast<uint64_t>(std::max(1, max_inputs))));
  const int registers = 1 + static_cast<int>(pick(rng, static_cast<uint64_t>(std::max(1, max_registers))));
  const int outputs = 1 + static_cast<int>(pick(rng, 2));
  std::vector<bool> init(registers), inverted(registers);
  std::vector<Node> next, outs;
  for (int r = 0; r < registers; ++r) {
    init[r] = pick(rng, 2);
    inverted[r] = pick(rng, 3) == 0;
    next.push_back(random_tree(rng, 3, inputs, registers));
  }
  for (int o = 0; o < outputs; ++o) outs.push_back(random_tree(rng, 3, inputs, registers));

  std::string head = "module top(";
  for (int i = 0; i < inputs; ++i) head += "input i" + std::to_string(i) + ", ";
  for (int o = 0; o < outputs; ++o) head += std::string(o ? ", " : "") + "output o" + std::to_string(o);
  head += ");\n";
  std::string spec = head, imp = head;
  for (int r = 0; r < registers; ++r) {
    const std::string k = std::to_string(r);
    spec += "  reg r" + k + " init " + (init[r] ? "1" : "0") + ";\n";
    if (inverted[r])
      imp += "  reg rn" + k + " init " + (init[r] ? "0" : "1") + ";\n";
    else
      imp += "  reg r" + k + " init " + (init[r] ? "1" : "0") + ";\n";
  }
  for (int r = 0; r < registers; ++r) {
    const std::string k = std::to_string(r);
    spec += "  always r" + k + " <= " + print_spec(next[r]) + ";\n";
    const std::string body = print_imp(next[r], rng, inverted);
    if (inverted[r])
      imp += "  always rn" + k + " <= ~(" + body + ");\n";
    else
      imp += "  always r" + k + " <= " + body + ";\n";
  }
  for (int o = 0; o < outputs; ++o) {
    spec += "  assign o" + std::to_string(o) + " = " + print_spec(outs[o]) + ";\n";
    imp += "  assign o" + std::to_string(o) + " = " + print_imp(outs[o], rng, inverted) + ";\n";
  }
  spec += "endmodule\n";
  imp += "endmodule\n";
  RandomTask t{spec, imp, false};
  if (pick(rng, 2) == 0) {
    t.imp_source = mutate(imp, rng(), "top").source;
    t.mutated = true;
  }
  return t;
}

Scenario helper_pipeline(bool with_helpers, int stages, int width) {
  if (stages < 4 || stages > 32 || width < 1 || width > 8)
    throw Error(ErrorKind::SizeOutOfRange, "helper pipeline: stages 4..32, width 1..8");
  Rng rng(0xC0FFEEull + static_cast<uint64_t>(stages * 64 + width));
  std::vector<uint64_t> c(stages + 1);
  for (int i = 1; i <= stages; ++i) c[i] = 1 + pick(rng, mask(width));
  const std::string head = "module top(" + port_in("a", width) + ", " + port_out("y", width) + ");\n";
  std::string spec = head, imp = head;
  for (int i = 1; i <= stages; ++i) {
    const std::string k = std::to_string(i);
    spec += reg("s" + k, width, "0");
    imp += reg("n" + k, width, dec(width, mask(width)));
    imp += "  wire " + range(width) + "t" + k + ";\n";
  }
  for (int i = 1; i <= stages; ++i) {
    const std::string k = std::to_string(i);
    const std::string sp = i == 1 ? "a" : "s" + std::to_string(i - 1);
    const std::string ip = i == 1 ? "a" : "t" + std::to_string(i - 1);
    spec += "  always s" + k + " <= " + sp + " + " + dec(width, c[i]) + ";\n";
    imp += "  always n" + k + " <= ~(" + ip + " + " + dec(width, c[i]) + ");\n";
    imp += "  assign t" + k + " = ~n" + k + ";\n";
  }
  spec += "  assign y = s" + std::to_string(stages) + ";\nendmodule\n";
  imp += "  assign y = t" + std::to_string(stages) + ";\nendmodule\n";

  Parts parts;
  // Refinement would find the complemented register pairs on its own; this
  // scenario shows what helpers add to plain induction.
  parts.engine = {"bmc_depth = 5", "k_max = 5"};
  parts.mapping = {"refine = false"};
  Scenario s;
  s.kind = ScenarioKind::Retime;
  s.size = {width, stages};
  s.spec_source = spec;
  s.imp_source = imp;
  for (int i = 1; i <= stages; ++i)
    s.register_truth.push_back({"s" + std::to_string(i), "t" + std::to_string(i)});
  if (with_helpers) {
    for (int i = 3; i < stages; i += 3)
      parts.helpers.push_back("h" + std::to_string(i) + " = [s" + std::to_string(i) + ", t" + std::to_string(i) + "]");
    s.expected = Status::Equivalent;
    s.requirement = "helpers every third stage";
  } else {
    s.expected = Status::Inconclusive;
  }
  s.config = render(parts);
  OracleLimits limits;
  limits.max_states = size_t{1} << 20;
  const auto v = oracle_check(scenario_task(s), limits);
  s.oracle = v ? (v == Status::Equivalent ? "confirmed equivalent" : "DISAGREES") : "skipped (state limit)";
  return s;
}

}  // namespace seqeq::bench
