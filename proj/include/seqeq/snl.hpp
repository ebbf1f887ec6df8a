#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqeq/netlist.hpp"

/// Frontend for SNL, the small synthesizable HDL subset the checker reads.
namespace seqeq::snl {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

enum class ExprKind { Ident, Const, Unary, Binary, Ternary, Concat, Index, Slice };

/// Literal as written. `bits` is MSB-first over {0,1,x}; unsized decimals
/// carry no width and size to their magnitude.
struct Constant {
  std::optional<int> width;
  char base = 0;  // 'b', 'd', 'h' or 0 for a plain decimal
  std::string digits;
  std::string bits;
};

struct Expr {
  ExprKind kind = ExprKind::Const;
  std::string op;    // operator for Unary/Binary
  std::string name;  // Ident, and the base signal of Index/Slice
  Constant value;
  std::vector<Expr> args;  // operands; Index: [index]; Slice: [msb, lsb]
  SourceLoc loc;

  bool operator==(const Expr& other) const;
};

struct Range {
  Expr msb;
  Expr lsb;
  bool operator==(const Range&) const = default;
};

struct Binding {
  std::string name;
  Expr value;
  bool operator==(const Binding&) const = default;
};

enum class ItemKind { Wire, Assign, Reg, Always, Instance, If };

struct Item {
  ItemKind kind = ItemKind::Wire;
  SourceLoc loc;
  std::string name;    // Wire/Reg/Always target, Instance name
  std::string module;  // Instance
  std::optional<Range> range;
  Expr lhs;          // Assign target
  Expr rhs;          // Assign/Always value, Reg init, If condition
  bool uninit = false;
  std::vector<Binding> overrides;
  std::vector<Binding> connections;
  std::vector<Item> then_items;
  std::vector<Item> else_items;

  bool operator==(const Item& other) const;
};

enum class Direction { Input, Output };

struct Port {
  Direction dir = Direction::Input;
  std::optional<Range> range;
  std::string name;
  SourceLoc loc;
  bool operator==(const Port& o) const { return dir == o.dir && range == o.range && name == o.name; }
};

struct Param {
  std::string name;
  Expr value;
  bool operator==(const Param& o) const { return name == o.name && value == o.value; }
};

struct SourceModule {
  std::string name;
  std::vector<Param> params;
  std::vector<Port> ports;
  std::vector<Item> items;
  SourceLoc loc;
  bool operator==(const SourceModule& o) const {
    return name == o.name && params == o.params && ports == o.ports && items == o.items;
  }
};

/// Throws SyntaxError("line:col: expected ..."), DuplicatePort or WidthMismatch.
std::vector<SourceModule> parse(std::string_view text);
Expr parse_expression(std::string_view text);

/// Canonical source text; parse(print(m)) == m.
std::string print(const std::vector<SourceModule>& modules);
std::string print(const SourceModule& module);
std::string print(const Expr& expr);

enum class XMode { Zero, One, Symbolic };

/// How X sources are resolved: `uninit` governs registers without a reset
/// value, `xvalue` governs X literal bits and undriven nets. Symbolic
/// registers keep an UNINIT init (one free value per trace); symbolic X
/// values become fresh XSource inputs sampled every cycle.
struct XPolicy {
  XMode uninit = XMode::Symbolic;
  XMode xvalue = XMode::Symbolic;
  bool allow_undriven = false;

  static XPolicy all(XMode mode, bool allow_undriven = false) { return XPolicy{mode, mode, allow_undriven}; }
};

const char* to_string(XMode mode);
std::optional<XMode> parse_xmode(std::string_view text);

/// Throws UnknownParameter, UnknownModule, RecursiveInstantiation,
/// MultipleDrivers, ZeroWidth, UndrivenNet, UnknownIdentifier,
/// WidthMismatch or CombinationalCycle.
Netlist elaborate(const std::vector<SourceModule>& modules, const std::string& top,
                  const std::map<std::string, int64_t>& overrides = {}, const XPolicy& policy = {});

enum class XSourceKind { UninitRegister, XLiteral, UndrivenNet };

struct XSource {
  XSourceKind kind;
  std::string net;  // register bit, X-literal source id, or undriven wire bit
  SourceLoc loc;
};

const char* to_string(XSourceKind kind);

std::vector<XSource> list_x_sources(const std::vector<SourceModule>& modules, const std::string& top,
                                    const std::map<std::string, int64_t>& overrides = {},
                                    bool allow_undriven = false);

/// Word-level value, least significant bit first.
using Word = std::vector<Lit>;
using Resolver = std::function<std::optional<Word>(const std::string& identifier)>;

/// Bit-blasts an expression into `builder`'s netlist, resolving identifiers
/// through `resolve`. Throws UnknownIdentifier or WidthMismatch.
Word elaborate_expression(const Expr& expr, HashedBuilder& builder, const Resolver& resolve);

/// Groups bit-level names back to words: "a[3]".."a[0]" -> "a" with bits.
std::map<std::string, Word> group_words(const std::map<std::string, Lit>& bit_names);
/// Splits "name[idx]" into ("name", idx); plain names give idx = -1.
std::pair<std::string, int> split_bit_name(const std::string& name);

}  // namespace seqeq::snl
