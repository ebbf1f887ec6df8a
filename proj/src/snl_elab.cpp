#include <algorithm>
#include <cstring>
#include <set>

#include "seqeq/snl.hpp"

namespace seqeq::snl {

const char* to_string(XMode mode) {
  switch (mode) {
    case XMode::Zero: return "zero";
    case XMode::One: return "one";
    case XMode::Symbolic: return "symbolic";
  }
  return "?";
}

std::optional<XMode> parse_xmode(std::string_view text) {
  if (text == "zero" || text == "0") return XMode::Zero;
  if (text == "one" || text == "1") return XMode::One;
  if (text == "symbolic") return XMode::Symbolic;
  return std::nullopt;
}

const char* to_string(XSourceKind kind) {
  switch (kind) {
    case XSourceKind::UninitRegister: return "uninit-register";
    case XSourceKind::XLiteral: return "x-literal";
    case XSourceKind::UndrivenNet: return "undriven-net";
  }
  return "?";
}

std::pair<std::string, int> split_bit_name(const std::string& name) {
  if (name.empty() || name.back() != ']') return {name, -1};
  auto open = name.rfind('[');
  if (open == std::string::npos) return {name, -1};
  try {
    return {name.substr(0, open), std::stoi(name.substr(open + 1, name.size() - open - 2))};
  } catch (...) {
    return {name, -1};
  }
}

std::map<std::string, Word> group_words(const std::map<std::string, Lit>& bit_names) {
  std::map<std::string, std::map<int, Lit>> grouped;
  for (const auto& [name, lit] : bit_names) {
    auto [base, idx] = split_bit_name(name);
    grouped[base][idx] = lit;
  }
  std::map<std::string, Word> out;
  for (auto& [base, bits] : grouped) {
    if (bits.count(-1) && bits.size() > 1) continue;  // a scalar and a vector share the base: ambiguous
    Word w;
    for (auto& [idx, lit] : bits) w.push_back(lit);
    out[base] = std::move(w);
  }
  return out;
}

namespace {

std::string loc_text(SourceLoc loc) { return std::to_string(loc.line) + ":" + std::to_string(loc.col); }

// ---------------------------------------------------------------------------
// Constant expressions (parameters, ranges, conditions)
// ---------------------------------------------------------------------------

int64_t const_value(const Constant& k, SourceLoc loc) {
  if (k.bits.find('x') != std::string::npos)
    throw Error(ErrorKind::WidthMismatch, loc_text(loc) + ": X digits in a constant expression");
  int64_t v = 0;
  for (char c : k.bits) v = (v << 1) | (c == '1' ? 1 : 0);
  return v;
}

int64_t const_eval(const Expr& e, const std::map<std::string, int64_t>& params) {
  auto sub = [&](size_t i) { return const_eval(e.args[i], params); };
  switch (e.kind) {
    case ExprKind::Const: return const_value(e.value, e.loc);
    case ExprKind::Ident: {
      auto it = params.find(e.name);
      if (it == params.end()) throw Error(ErrorKind::UnknownIdentifier, e.name + " at " + loc_text(e.loc) + " is not a parameter");
      return it->second;
    }
    case ExprKind::Unary: {
      int64_t v = sub(0);
      if (e.op == "!") return v == 0;
      if (e.op == "~") return ~v;
      if (e.op == "-") return -v;
      break;
    }
    case ExprKind::Binary: {
      int64_t a = sub(0), b = sub(1);
      const std::string& op = e.op;
      if (op == "+") return a + b;
      if (op == "-") return a - b;
      if (op == "*") return a * b;
      if (op == "/" || op == "%") {
        if (b == 0) throw Error(ErrorKind::WidthMismatch, "division by zero at " + loc_text(e.loc));
        return op == "/" ? a / b : a % b;
      }
      if (op == "==") return a == b;
      if (op == "!=") return a != b;
      if (op == "<") return a < b;
      if (op == "<=") return a <= b;
      if (op == ">") return a > b;
      if (op == ">=") return a >= b;
      if (op == "&&") return a && b;
      if (op == "||") return a || b;
      if (op == "&") return a & b;
      if (op == "|") return a | b;
      if (op == "^") return a ^ b;
      if (op == "<<") return a << b;
      if (op == ">>") return a >> b;
      break;
    }
    case ExprKind::Ternary: return sub(0) ? sub(1) : sub(2);
    default: break;
  }
  throw Error(ErrorKind::WidthMismatch, "not a constant expression at " + loc_text(e.loc));
}

// ---------------------------------------------------------------------------
// Bit-blasting
// ---------------------------------------------------------------------------

class Blaster {
 public:
  virtual ~Blaster() = default;

  Word eval(const Expr& e);

 protected:
  virtual Lit make_and(Lit a, Lit b) = 0;
  virtual std::optional<Word> resolve(const std::string& name, SourceLoc loc) = 0;
  virtual const std::map<std::string, int64_t>& params() const = 0;
  virtual Lit x_bit(const Expr& at, int bit) = 0;
  /// Lowest declared index of a signal (for [h:l] ranges with l != 0).
  virtual int lsb_of(const std::string&) const { return 0; }

  Lit make_or(Lit a, Lit b) { return !make_and(!a, !b); }
  Lit make_xor(Lit a, Lit b) { return make_or(make_and(a, !b), make_and(!a, b)); }
  Lit make_mux(Lit s, Lit t, Lit e) {
    if (t == e) return t;
    return make_or(make_and(s, t), make_and(!s, e));
  }

 private:
  static Word extend(Word w, size_t n) {
    while (w.size() < n) w.push_back(kFalse);
    return w;
  }
  Lit reduce_or(const Word& w) {
    Lit acc = kFalse;
    for (Lit l : w) acc = make_or(acc, l);
    return acc;
  }
  Lit reduce_and(const Word& w) {
    Lit acc = kTrue;
    for (Lit l : w) acc = make_and(acc, l);
    return acc;
  }
  Lit reduce_xor(const Word& w) {
    Lit acc = kFalse;
    for (Lit l : w) acc = make_xor(acc, l);
    return acc;
  }
  /// a + b + carry_in; returns sum (width of a) and carry out.
  std::pair<Word, Lit> add(const Word& a, const Word& b, Lit carry) {
    Word sum(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
      Lit axb = make_xor(a[i], b[i]);
      sum[i] = make_xor(axb, carry);
      carry = make_or(make_and(a[i], b[i]), make_and(carry, axb));
    }
    return {sum, carry};
  }
  Word invert(Word w) {
    for (Lit& l : w) l = !l;
    return w;
  }
  Lit less_than(const Word& a, const Word& b) {
    // a < b  <=>  no carry out of a + ~b + 1
    return !add(a, invert(b), kTrue).second;
  }
  Lit equal(const Word& a, const Word& b) {
    Lit acc = kTrue;
    for (size_t i = 0; i < a.size(); ++i) acc = make_and(acc, !make_xor(a[i], b[i]));
    return acc;
  }
  Word multiply(const Word& a, const Word& b) {
    Word acc(a.size(), kFalse);
    for (size_t i = 0; i < b.size() && i < a.size(); ++i) {
      Word partial(a.size(), kFalse);
      for (size_t j = 0; j + i < a.size(); ++j) partial[j + i] = make_and(a[j], b[i]);
      acc = add(acc, partial, kFalse).first;
    }
    return acc;
  }
  Word shift(const Word& a, const Word& amount, bool left) {
    Word cur = a;
    Lit overflow = kFalse;
    for (size_t k = 0; k < amount.size(); ++k) {
      size_t dist = size_t{1} << std::min<size_t>(k, 62);
      if (k >= 62 || dist >= a.size()) {
        overflow = make_or(overflow, amount[k]);
        continue;
      }
      Word next(a.size());
      for (size_t i = 0; i < a.size(); ++i) {
        Lit moved = kFalse;
        if (left && i >= dist) moved = cur[i - dist];
        if (!left && i + dist < a.size()) moved = cur[i + dist];
        next[i] = make_mux(amount[k], moved, cur[i]);
      }
      cur = std::move(next);
    }
    for (Lit& l : cur) l = make_and(l, !overflow);
    return cur;
  }

  Word constant_word(const Expr& e) {
    const std::string& bits = e.value.bits;
    Word w;
    for (size_t i = 0; i < bits.size(); ++i) {
      char c = bits[bits.size() - 1 - i];
      if (c == 'x') w.push_back(x_bit(e, static_cast<int>(i)));
      else w.push_back(c == '1' ? kTrue : kFalse);
    }
    return w;
  }

  static Word int_word(int64_t v) {
    Word w;
    auto u = static_cast<uint64_t>(v);
    do {
      w.push_back((u & 1) ? kTrue : kFalse);
      u >>= 1;
    } while (u);
    return w;
  }

  Word signal(const std::string& name, SourceLoc loc) {
    if (auto w = resolve(name, loc)) return *w;
    auto it = params().find(name);
    if (it != params().end()) return int_word(it->second);
    throw Error(ErrorKind::UnknownIdentifier, name + " at " + loc_text(loc));
  }
};

Word Blaster::eval(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Const: return constant_word(e);
    case ExprKind::Ident: return signal(e.name, e.loc);
    case ExprKind::Index: {
      Word base = signal(e.name, e.loc);
      int lsb = lsb_of(e.name);
      try {
        int64_t idx = const_eval(e.args[0], params()) - lsb;
        if (idx < 0 || idx >= static_cast<int64_t>(base.size()))
          throw Error(ErrorKind::WidthMismatch, "index out of range on " + e.name + " at " + loc_text(e.loc));
        return {base[static_cast<size_t>(idx)]};
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::UnknownIdentifier) throw;
      }
      // variable index: mux over the bits, out-of-range reads 0
      Word idx = eval(e.args[0]);
      Lit out = kFalse;
      for (size_t i = 0; i < base.size(); ++i) {
        Word target = int_word(static_cast<int64_t>(i) + lsb);
        size_t n = std::max(idx.size(), target.size());
        out = make_mux(equal(extend(idx, n), extend(target, n)), base[i], out);
      }
      return {out};
    }
    case ExprKind::Slice: {
      Word base = signal(e.name, e.loc);
      int lsb = lsb_of(e.name);
      int64_t hi = const_eval(e.args[0], params()) - lsb;
      int64_t lo = const_eval(e.args[1], params()) - lsb;
      if (hi < lo) throw Error(ErrorKind::ZeroWidth, "slice " + e.name + " at " + loc_text(e.loc));
      if (lo < 0 || hi >= static_cast<int64_t>(base.size()))
        throw Error(ErrorKind::WidthMismatch, "slice out of range on " + e.name + " at " + loc_text(e.loc));
      return Word(base.begin() + lo, base.begin() + hi + 1);
    }
    case ExprKind::Concat: {
      Word out;
      for (auto it = e.args.rbegin(); it != e.args.rend(); ++it) {
        Word part = eval(*it);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    case ExprKind::Unary: {
      Word a = eval(e.args[0]);
      if (e.op == "~") return invert(a);
      if (e.op == "!") return {!reduce_or(a)};
      if (e.op == "&") return {reduce_and(a)};
      if (e.op == "|") return {reduce_or(a)};
      if (e.op == "^") return {reduce_xor(a)};
      if (e.op == "-") return add(invert(a), Word(a.size(), kFalse), kTrue).first;
      break;
    }
    case ExprKind::Ternary: {
      Lit sel = reduce_or(eval(e.args[0]));
      Word t = eval(e.args[1]);
      Word f = eval(e.args[2]);
      size_t n = std::max(t.size(), f.size());
      t = extend(t, n);
      f = extend(f, n);
      Word out(n);
      for (size_t i = 0; i < n; ++i) out[i] = make_mux(sel, t[i], f[i]);
      return out;
    }
    case ExprKind::Binary: {
      const std::string& op = e.op;
      Word a = eval(e.args[0]);
      Word b = eval(e.args[1]);
      if (op == "&&") return {make_and(reduce_or(a), reduce_or(b))};
      if (op == "||") return {make_or(reduce_or(a), reduce_or(b))};
      if (op == "<<" || op == ">>") return shift(a, b, op == "<<");
      size_t n = std::max(a.size(), b.size());
      a = extend(a, n);
      b = extend(b, n);
      Word out(n);
      if (op == "&" || op == "|" || op == "^") {
        for (size_t i = 0; i < n; ++i)
          out[i] = op == "&" ? make_and(a[i], b[i]) : op == "|" ? make_or(a[i], b[i]) : make_xor(a[i], b[i]);
        return out;
      }
      if (op == "==") return {equal(a, b)};
      if (op == "!=") return {!equal(a, b)};
      if (op == "<") return {less_than(a, b)};
      if (op == ">") return {less_than(b, a)};
      if (op == "<=") return {!less_than(b, a)};
      if (op == ">=") return {!less_than(a, b)};
      if (op == "+") return add(a, b, kFalse).first;
      if (op == "-") return add(a, invert(b), kTrue).first;
      if (op == "*") return multiply(a, b);
      throw Error(ErrorKind::SyntaxError, loc_text(e.loc) + ": expected a supported operator (found '" + op + "')");
    }
  }
  throw Error(ErrorKind::SyntaxError, loc_text(e.loc) + ": expected a supported operator (found '" + e.op + "')");
}

// ---------------------------------------------------------------------------
// Elaboration
// ---------------------------------------------------------------------------

enum class SignalKind { Input, Output, Wire, Reg };

struct Signal {
  SignalKind kind = SignalKind::Wire;
  int msb = 0;
  int lsb = 0;
  bool scalar = true;
  Word bits;                  // buffers for nets, state literals for registers
  std::vector<bool> driven;   // nets: has a driver; registers: has an always
  std::vector<uint32_t> regs; // register indices
  SourceLoc loc;

  size_t width() const { return bits.size(); }
};

struct PendingNet {
  std::string name;
  uint32_t var;
  SourceLoc loc;
};

class Elaborator {
 public:
  Elaborator(const std::vector<SourceModule>& modules, const XPolicy& policy) : modules_(modules), policy_(policy) {}

  Netlist run(const std::string& top, const std::map<std::string, int64_t>& overrides) {
    const SourceModule& mod = lookup(top, SourceLoc{});
    net_.name = top;
    std::map<std::string, int64_t> params = bind_params(mod, overrides, {});
    Scope scope = instantiate(mod, "", std::move(params), nullptr);
    for (const auto& port : mod.ports) {
      if (port.dir != Direction::Output) continue;
      const Signal& sig = scope.signals.at(port.name);
      for (size_t i = 0; i < sig.width(); ++i) net_.add_output(bit_name("", port.name, sig, i), sig.bits[i]);
    }
    resolve_undriven();
    validate(net_);
    return std::move(net_);
  }

  std::vector<XSource> sources() const { return sources_; }

 private:
  struct Scope;

  class ScopeBlaster : public Blaster {
   public:
    ScopeBlaster(Elaborator& owner, Scope& scope) : owner_(owner), scope_(scope) {}

   protected:
    Lit make_and(Lit a, Lit b) override { return owner_.fold_and(a, b); }
    std::optional<Word> resolve(const std::string& name, SourceLoc) override {
      auto it = scope_.signals.find(name);
      if (it == scope_.signals.end()) return std::nullopt;
      return it->second.bits;
    }
    const std::map<std::string, int64_t>& params() const override { return scope_.params; }
    int lsb_of(const std::string& name) const override {
      auto it = scope_.signals.find(name);
      return it == scope_.signals.end() ? 0 : it->second.lsb;
    }
    Lit x_bit(const Expr& at, int bit) override {
      std::string id = scope_.prefix + "$x" + std::to_string(at.loc.line) + "_" + std::to_string(at.loc.col) + "[" +
                       std::to_string(bit) + "]";
      // the same literal can be evaluated more than once (e.g. shared lvalue
      // widths); keep one source per site
      auto it = owner_.x_literals_.find(id);
      if (it != owner_.x_literals_.end()) return it->second;
      owner_.sources_.push_back(XSource{XSourceKind::XLiteral, id, at.loc});
      Lit lit = owner_.x_value(id);
      owner_.x_literals_[id] = lit;
      return lit;
    }

   private:
    Elaborator& owner_;
    Scope& scope_;
  };

  struct Scope {
    std::string prefix;
    std::map<std::string, int64_t> params;
    std::map<std::string, Signal> signals;
  };

  const SourceModule& lookup(const std::string& name, SourceLoc loc) {
    for (const auto& m : modules_)
      if (m.name == name) return m;
    throw Error(ErrorKind::UnknownModule, name + (loc.line ? " at " + loc_text(loc) : ""));
  }

  std::map<std::string, int64_t> bind_params(const SourceModule& mod, const std::map<std::string, int64_t>& overrides,
                                             const std::string& where) {
    std::map<std::string, int64_t> params;
    for (const auto& [name, value] : overrides) {
      bool declared = std::any_of(mod.params.begin(), mod.params.end(), [&](const Param& p) { return p.name == name; });
      if (!declared) throw Error(ErrorKind::UnknownParameter, name + " of module " + mod.name + where);
    }
    for (const auto& p : mod.params) {
      auto it = overrides.find(p.name);
      params[p.name] = it != overrides.end() ? it->second : const_eval(p.value, params);
    }
    return params;
  }

  Lit fold_and(Lit a, Lit b) {
    if (a == kFalse || b == kFalse) return kFalse;
    if (a == kTrue) return b;
    if (b == kTrue) return a;
    if (a == b) return a;
    if (a == !b) return kFalse;
    return net_.add_and(a, b);
  }

  Lit x_value(const std::string& id) {
    switch (policy_.xvalue) {
      case XMode::Zero: return kFalse;
      case XMode::One: return kTrue;
      case XMode::Symbolic: return Lit::make(net_.add_input(id, InputRole::XSource));
    }
    return kFalse;
  }

  static std::string bit_name(const std::string& prefix, const std::string& name, const Signal& sig, size_t i) {
    if (sig.scalar) return prefix + name;
    return prefix + name + "[" + std::to_string(sig.lsb + static_cast<int>(i)) + "]";
  }

  Signal make_signal(SignalKind kind, const std::optional<Range>& range, const Scope& scope, const std::string& name,
                     SourceLoc loc) {
    Signal sig;
    sig.kind = kind;
    sig.loc = loc;
    if (range) {
      sig.scalar = false;
      sig.msb = static_cast<int>(const_eval(range->msb, scope.params));
      sig.lsb = static_cast<int>(const_eval(range->lsb, scope.params));
      if (sig.msb < sig.lsb) throw Error(ErrorKind::ZeroWidth, scope.prefix + name + " at " + loc_text(loc));
    }
    size_t width = static_cast<size_t>(sig.msb - sig.lsb + 1);
    sig.bits.resize(width);
    sig.driven.assign(width, false);
    return sig;
  }

  /// Net bit backed by a placeholder buffer node, driven later.
  Lit make_buffer(const std::string& name, SourceLoc loc) {
    Lit lit = net_.add_and(kFalse, kFalse);
    pending_.push_back(PendingNet{name, lit.var(), loc});
    net_.add_name(name, lit);
    return lit;
  }

  void declare(Scope& scope, const std::string& name, Signal sig) {
    if (!scope.signals.emplace(name, std::move(sig)).second) throw Error(ErrorKind::DuplicateName, scope.prefix + name);
  }

  void flatten(const std::vector<Item>& items, const Scope& scope, std::vector<const Item*>& out) {
    for (const auto& it : items) {
      if (it.kind != ItemKind::If) {
        out.push_back(&it);
        continue;
      }
      flatten(const_eval(it.rhs, scope.params) ? it.then_items : it.else_items, scope, out);
    }
  }

  void drive(Scope& scope, const std::string& name, size_t bit, Lit value, SourceLoc loc) {
    Signal& sig = scope.signals.at(name);
    std::string full = bit_name(scope.prefix, name, sig, bit);
    if (sig.kind == SignalKind::Reg)
      throw Error(ErrorKind::MultipleDrivers, full + " is a register; drive it with always at " + loc_text(loc));
    if (sig.driven[bit]) throw Error(ErrorKind::MultipleDrivers, full + " at " + loc_text(loc));
    sig.driven[bit] = true;
    driven_vars_.insert(sig.bits[bit].var());
    net_.set_and_operands(sig.bits[bit].var(), value, value);
  }

  /// Resolves an lvalue to (signal, bit) pairs, LSB first.
  std::vector<std::pair<std::string, size_t>> lvalue_bits(const Expr& e, Scope& scope) {
    std::vector<std::pair<std::string, size_t>> out;
    if (e.kind == ExprKind::Concat) {
      for (auto it = e.args.rbegin(); it != e.args.rend(); ++it) {
        auto part = lvalue_bits(*it, scope);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    auto sit = scope.signals.find(e.name);
    if (sit == scope.signals.end()) throw Error(ErrorKind::UnknownIdentifier, e.name + " at " + loc_text(e.loc));
    const Signal& sig = sit->second;
    auto in_range = [&](int64_t idx) {
      if (idx < 0 || idx >= static_cast<int64_t>(sig.width()))
        throw Error(ErrorKind::WidthMismatch, "index out of range on " + e.name + " at " + loc_text(e.loc));
      return static_cast<size_t>(idx);
    };
    if (e.kind == ExprKind::Ident) {
      for (size_t i = 0; i < sig.width(); ++i) out.emplace_back(e.name, i);
    } else if (e.kind == ExprKind::Index) {
      out.emplace_back(e.name, in_range(const_eval(e.args[0], scope.params) - sig.lsb));
    } else if (e.kind == ExprKind::Slice) {
      size_t hi = in_range(const_eval(e.args[0], scope.params) - sig.lsb);
      size_t lo = in_range(const_eval(e.args[1], scope.params) - sig.lsb);
      if (hi < lo) throw Error(ErrorKind::ZeroWidth, "slice " + e.name + " at " + loc_text(e.loc));
      for (size_t i = lo; i <= hi; ++i) out.emplace_back(e.name, i);
    } else {
      throw Error(ErrorKind::SyntaxError, loc_text(e.loc) + ": expected an assignable expression");
    }
    return out;
  }

  static Word fit(Word value, size_t width, const std::string& what, SourceLoc loc) {
    if (value.size() > width) {
      // tolerate high zero bits (e.g. unsized constants)
      for (size_t i = width; i < value.size(); ++i)
        if (value[i] != kFalse)
          throw Error(ErrorKind::WidthMismatch, what + " at " + loc_text(loc) + ": " + std::to_string(value.size()) +
                                                    " bits into " + std::to_string(width));
      value.resize(width);
    }
    while (value.size() < width) value.push_back(kFalse);
    return value;
  }

  Scope instantiate(const SourceModule& mod, const std::string& path, std::map<std::string, int64_t> params,
                    std::vector<std::pair<std::string, Word>>* port_inputs) {
    if (std::find(stack_.begin(), stack_.end(), mod.name) != stack_.end())
      throw Error(ErrorKind::RecursiveInstantiation, mod.name);
    stack_.push_back(mod.name);

    Scope scope;
    scope.prefix = path.empty() ? "" : path + ".";
    scope.params = std::move(params);

    // ports
    for (const auto& port : mod.ports) {
      Signal sig = make_signal(port.dir == Direction::Input ? SignalKind::Input : SignalKind::Output, port.range,
                               scope, port.name, port.loc);
      for (size_t i = 0; i < sig.width(); ++i) {
        std::string name = bit_name(scope.prefix, port.name, sig, i);
        if (port.dir == Direction::Input && path.empty()) {
          sig.bits[i] = Lit::make(net_.add_input(name));
          sig.driven[i] = true;
        } else {
          sig.bits[i] = make_buffer(name, port.loc);
        }
      }
      declare(scope, port.name, std::move(sig));
    }

    std::vector<const Item*> items;
    flatten(mod.items, scope, items);

    // declarations
    for (const Item* it : items) {
      if (it->kind == ItemKind::Wire) {
        Signal sig = make_signal(SignalKind::Wire, it->range, scope, it->name, it->loc);
        for (size_t i = 0; i < sig.width(); ++i) sig.bits[i] = make_buffer(bit_name(scope.prefix, it->name, sig, i), it->loc);
        declare(scope, it->name, std::move(sig));
      } else if (it->kind == ItemKind::Reg) {
        Signal sig = make_signal(SignalKind::Reg, it->range, scope, it->name, it->loc);
        std::string init_bits(sig.width(), 'x');
        if (!it->uninit) {
          std::string bits;
          if (it->rhs.kind == ExprKind::Const) {
            bits = it->rhs.value.bits;
          } else {
            auto v = static_cast<uint64_t>(const_eval(it->rhs, scope.params));
            do {
              bits.insert(bits.begin(), (v & 1) ? '1' : '0');
              v >>= 1;
            } while (v);
          }
          while (bits.size() > sig.width() && bits.front() == '0') bits.erase(bits.begin());
          if (bits.size() > sig.width())
            throw Error(ErrorKind::WidthMismatch, "init of " + scope.prefix + it->name + " at " + loc_text(it->loc));
          while (bits.size() < sig.width()) bits.insert(bits.begin(), '0');
          std::reverse(bits.begin(), bits.end());  // LSB first
          init_bits = bits;
        }
        for (size_t i = 0; i < sig.width(); ++i) {
          std::string name = bit_name(scope.prefix, it->name, sig, i);
          Init init = init_bits[i] == '1' ? Init::One : Init::Zero;
          if (init_bits[i] == 'x') {
            sources_.push_back(XSource{XSourceKind::UninitRegister, name, it->loc});
            init = policy_.uninit == XMode::Zero ? Init::Zero : policy_.uninit == XMode::One ? Init::One : Init::Uninit;
          }
          uint32_t idx = net_.add_register(name, init);
          sig.regs.push_back(idx);
          sig.bits[i] = Lit::make(net_.registers()[idx].var);
        }
        declare(scope, it->name, std::move(sig));
      }
    }

    // submodule input ports get driven by the parent
    if (port_inputs) {
      for (auto& [name, value] : *port_inputs) {
        Signal& sig = scope.signals.at(name);
        Word fitted = fit(value, sig.width(), scope.prefix + name, sig.loc);
        for (size_t i = 0; i < sig.width(); ++i) drive(scope, name, i, fitted[i], sig.loc);
      }
    }

    ScopeBlaster blaster(*this, scope);
    for (const Item* it : items) {
      switch (it->kind) {
        case ItemKind::Assign: {
          auto targets = lvalue_bits(it->lhs, scope);
          Word value = fit(blaster.eval(it->rhs), targets.size(), "assign", it->loc);
          for (size_t i = 0; i < targets.size(); ++i) {
            const Signal& sig = scope.signals.at(targets[i].first);
            if (sig.kind == SignalKind::Input)
              throw Error(ErrorKind::MultipleDrivers, bit_name(scope.prefix, targets[i].first, sig, targets[i].second) +
                                                          " is an input at " + loc_text(it->loc));
            drive(scope, targets[i].first, targets[i].second, value[i], it->loc);
          }
          break;
        }
        case ItemKind::Always: {
          auto sit = scope.signals.find(it->name);
          if (sit == scope.signals.end()) throw Error(ErrorKind::UnknownIdentifier, it->name + " at " + loc_text(it->loc));
          if (sit->second.kind != SignalKind::Reg)
            throw Error(ErrorKind::MultipleDrivers, scope.prefix + it->name + " is not a register at " + loc_text(it->loc));
          Word value = fit(blaster.eval(it->rhs), sit->second.width(), "always " + it->name, it->loc);
          Signal& sig = scope.signals.at(it->name);
          for (size_t i = 0; i < sig.width(); ++i) {
            if (sig.driven[i]) throw Error(ErrorKind::MultipleDrivers, bit_name(scope.prefix, it->name, sig, i));
            sig.driven[i] = true;
            net_.set_next(sig.regs[i], value[i]);
          }
          break;
        }
        case ItemKind::Instance: elaborate_instance(*it, scope, blaster); break;
        default: break;
      }
    }
    stack_.pop_back();
    return scope;
  }

  void elaborate_instance(const Item& it, Scope& scope, Blaster& blaster) {
    const SourceModule& child = lookup(it.module, it.loc);
    std::map<std::string, int64_t> overrides;
    for (const auto& b : it.overrides) overrides[b.name] = const_eval(b.value, scope.params);
    std::string path = scope.prefix + it.name;
    auto params = bind_params(child, overrides, " (instance " + path + ")");

    std::vector<std::pair<std::string, Word>> inputs;
    std::vector<const Binding*> outputs;
    for (const auto& b : it.connections) {
      auto port = std::find_if(child.ports.begin(), child.ports.end(), [&](const Port& p) { return p.name == b.name; });
      if (port == child.ports.end()) throw Error(ErrorKind::UnknownIdentifier, "port " + b.name + " of " + child.name);
      bool unconnected = b.value.kind == ExprKind::Concat && b.value.args.empty();
      if (unconnected) continue;
      if (port->dir == Direction::Input) inputs.emplace_back(b.name, blaster.eval(b.value));
      else outputs.push_back(&b);
    }
    Scope inner = instantiate(child, path, std::move(params), &inputs);

    Instance record{path, child.name, {}, {}};
    for (const auto& port : child.ports) {
      const Signal& sig = inner.signals.at(port.name);
      for (size_t i = 0; i < sig.width(); ++i) {
        PortBit bit{bit_name(inner.prefix, port.name, sig, i), sig.bits[i]};
        (port.dir == Direction::Input ? record.inputs : record.outputs).push_back(bit);
      }
    }
    net_.add_instance(std::move(record));

    for (const Binding* b : outputs) {
      const Signal& sig = inner.signals.at(b->name);
      auto targets = lvalue_bits(b->value, scope);
      Word value = fit(sig.bits, targets.size(), "port " + b->name + " of " + path, it.loc);
      for (size_t i = 0; i < targets.size(); ++i) drive(scope, targets[i].first, targets[i].second, value[i], it.loc);
    }
  }

  void resolve_undriven() {
    for (const auto& p : pending_) {
      if (driven_vars_.count(p.var)) continue;
      if (!policy_.allow_undriven) throw Error(ErrorKind::UndrivenNet, p.name + " declared at " + loc_text(p.loc));
      sources_.push_back(XSource{XSourceKind::UndrivenNet, p.name, p.loc});
      Lit value = x_value("$undriven." + p.name);
      net_.set_and_operands(p.var, value, value);
    }
  }

  const std::vector<SourceModule>& modules_;
  XPolicy policy_;
  Netlist net_;
  std::vector<std::string> stack_;
  std::vector<PendingNet> pending_;
  std::vector<XSource> sources_;
  std::map<std::string, Lit> x_literals_;
  std::set<uint32_t> driven_vars_;
};

class ResolverBlaster : public Blaster {
 public:
  ResolverBlaster(HashedBuilder& builder, const Resolver& resolve) : builder_(builder), resolve_(resolve) {}

 protected:
  Lit make_and(Lit a, Lit b) override { return builder_.make_and(a, b); }
  std::optional<Word> resolve(const std::string& name, SourceLoc) override { return resolve_(name); }
  const std::map<std::string, int64_t>& params() const override { return no_params_; }
  Lit x_bit(const Expr& at, int) override {
    throw Error(ErrorKind::SyntaxError, loc_text(at.loc) + ": expected a constant without X digits");
  }

 private:
  HashedBuilder& builder_;
  const Resolver& resolve_;
  std::map<std::string, int64_t> no_params_;
};

}  // namespace

Netlist elaborate(const std::vector<SourceModule>& modules, const std::string& top,
                  const std::map<std::string, int64_t>& overrides, const XPolicy& policy) {
  return Elaborator(modules, policy).run(top, overrides);
}

std::vector<XSource> list_x_sources(const std::vector<SourceModule>& modules, const std::string& top,
                                    const std::map<std::string, int64_t>& overrides, bool allow_undriven) {
  Elaborator elab(modules, XPolicy::all(XMode::Symbolic, allow_undriven));
  elab.run(top, overrides);
  return elab.sources();
}

Word elaborate_expression(const Expr& expr, HashedBuilder& builder, const Resolver& resolve) {
  return ResolverBlaster(builder, resolve).eval(expr);
}

}  // namespace seqeq::snl
