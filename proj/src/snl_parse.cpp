#include <cctype>
#include <cstring>
#include <set>
#include <sstream>

#include "seqeq/snl.hpp"

namespace seqeq::snl {

bool Expr::operator==(const Expr& o) const {
  if (kind != o.kind || op != o.op || name != o.name || args != o.args) return false;
  if (kind == ExprKind::Const)
    return value.width == o.value.width && value.base == o.value.base && value.bits == o.value.bits;
  return true;
}

bool Item::operator==(const Item& o) const {
  return kind == o.kind && name == o.name && module == o.module && range == o.range && lhs == o.lhs &&
         rhs == o.rhs && uninit == o.uninit && overrides == o.overrides && connections == o.connections &&
         then_items == o.then_items && else_items == o.else_items;
}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

[[noreturn]] void syntax_error(SourceLoc loc, const std::string& expected) {
  throw Error(ErrorKind::SyntaxError,
              std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": expected " + expected);
}

std::vector<Token> lex(std::string_view text) {
  static const char* kPuncts[] = {"<=", ">=", "==", "!=", "&&", "||", "<<", ">>", "#(", "(", ")", "[", "]", "{",
                                  "}",  ";",  ",",  ":",  "?",  "=",  "<",  ">",  "&",  "|", "^", "~", "!", "+",
                                  "-",  "*",  ".",  "/",  "%"};
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    SourceLoc loc{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back(Token{Tok::Ident, std::string(text.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      if (j < text.size() && text[j] == '\'') {
        ++j;
        if (j >= text.size() || !std::strchr("bBdDhH", text[j])) syntax_error(SourceLoc{line, col + int(j - i)}, "base b, d or h");
        ++j;
        while (j < text.size() && (std::isxdigit(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                   text[j] == 'x' || text[j] == 'X'))
          ++j;
      }
      out.push_back(Token{Tok::Number, std::string(text.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const char* p : kPuncts) {
      std::string_view pv(p);
      if (text.substr(i, pv.size()) == pv) {
        out.push_back(Token{Tok::Punct, std::string(pv), loc});
        advance(pv.size());
        matched = true;
        break;
      }
    }
    if (!matched) syntax_error(loc, "a token (found '" + std::string(1, c) + "')");
  }
  out.push_back(Token{Tok::End, "", SourceLoc{line, col}});
  return out;
}

std::string strip_underscores(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != '_') out.push_back(c);
  return out;
}

/// Decodes a numeric literal; validates digits against the declared width.
Constant decode_number(const Token& tok) {
  Constant k;
  auto quote = tok.text.find('\'');
  if (quote == std::string::npos) {
    k.digits = strip_underscores(tok.text);
    uint64_t v = std::stoull(k.digits);
    if (v == 0) k.bits = "0";
    while (v) {
      k.bits.insert(k.bits.begin(), (v & 1) ? '1' : '0');
      v >>= 1;
    }
    return k;
  }
  int width = std::stoi(strip_underscores(tok.text.substr(0, quote)));
  if (width <= 0) throw Error(ErrorKind::ZeroWidth, tok.text);
  k.width = width;
  k.base = static_cast<char>(std::tolower(tok.text[quote + 1]));
  k.digits = strip_underscores(tok.text.substr(quote + 2));
  if (k.digits.empty()) syntax_error(tok.loc, "digits after base");
  std::string bits;
  if (k.base == 'b') {
    for (char c : k.digits) {
      char l = static_cast<char>(std::tolower(c));
      if (l != '0' && l != '1' && l != 'x') syntax_error(tok.loc, "binary digit");
      bits.push_back(l);
    }
  } else if (k.base == 'h') {
    for (char c : k.digits) {
      char l = static_cast<char>(std::tolower(c));
      if (l == 'x') {
        bits += "xxxx";
        continue;
      }
      if (!std::isxdigit(static_cast<unsigned char>(l))) syntax_error(tok.loc, "hex digit");
      int v = std::stoi(std::string(1, l), nullptr, 16);
      for (int b = 3; b >= 0; --b) bits.push_back((v >> b) & 1 ? '1' : '0');
    }
  } else {
    for (char c : k.digits)
      if (!std::isdigit(static_cast<unsigned char>(c))) syntax_error(tok.loc, "decimal digit");
    uint64_t v = std::stoull(k.digits);
    if (v == 0) bits = "0";
    while (v) {
      bits.insert(bits.begin(), (v & 1) ? '1' : '0');
      v >>= 1;
    }
  }
  // drop leading zeros beyond the width, reject significant overflow
  while (static_cast<int>(bits.size()) > width && bits.front() == '0' && k.base != 'b') bits.erase(bits.begin());
  if (static_cast<int>(bits.size()) > width) throw Error(ErrorKind::WidthMismatch, tok.text + " does not fit in " + std::to_string(width) + " bits");
  while (static_cast<int>(bits.size()) < width) bits.insert(bits.begin(), '0');
  k.bits = bits;
  return k;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  std::vector<SourceModule> modules() {
    std::vector<SourceModule> out;
    while (peek().kind != Tok::End) out.push_back(module());
    return out;
  }

  Expr whole_expression() {
    Expr e = expr();
    if (peek().kind != Tok::End) syntax_error(peek().loc, "end of expression");
    return e;
  }

 private:
  const Token& peek(size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool is(std::string_view text) const { return peek().kind != Tok::End && peek().text == text && peek().kind != Tok::Number; }
  bool accept(std::string_view text) {
    if (!is(text)) return false;
    ++pos_;
    return true;
  }
  const Token& expect(std::string_view text) {
    if (!is(text)) syntax_error(peek().loc, "'" + std::string(text) + "'");
    return toks_[pos_++];
  }
  std::string ident() {
    if (peek().kind != Tok::Ident || keyword(peek().text)) syntax_error(peek().loc, "identifier");
    return toks_[pos_++].text;
  }
  static bool keyword(const std::string& t) {
    static const std::set<std::string> kw{"module", "endmodule", "input", "output", "wire", "assign", "reg",
                                          "init", "uninit", "always", "if", "else", "endif", "param"};
    return kw.count(t) > 0;
  }

  SourceModule module() {
    SourceModule m;
    m.loc = peek().loc;
    expect("module");
    m.name = ident();
    if (accept("#(")) {
      do {
        expect("param");
        Param p;
        p.name = ident();
        expect("=");
        p.value = expr();
        m.params.push_back(std::move(p));
      } while (accept(","));
      expect(")");
    }
    expect("(");
    std::set<std::string> seen;
    if (!is(")")) {
      do {
        Port p;
        p.loc = peek().loc;
        if (accept("input")) {
          p.dir = Direction::Input;
        } else if (accept("output")) {
          p.dir = Direction::Output;
        } else {
          syntax_error(peek().loc, "'input' or 'output'");
        }
        if (is("[")) p.range = range();
        p.name = ident();
        if (!seen.insert(p.name).second) throw Error(ErrorKind::DuplicatePort, p.name);
        m.ports.push_back(std::move(p));
      } while (accept(","));
    }
    expect(")");
    expect(";");
    while (!is("endmodule")) {
      if (peek().kind == Tok::End) syntax_error(peek().loc, "'endmodule'");
      m.items.push_back(item());
    }
    expect("endmodule");
    return m;
  }

  Range range() {
    expect("[");
    Range r;
    r.msb = expr();
    expect(":");
    r.lsb = expr();
    expect("]");
    return r;
  }

  std::vector<Binding> bindings() {
    std::vector<Binding> out;
    if (is(")")) return out;
    do {
      expect(".");
      Binding b;
      b.name = ident();
      expect("(");
      if (!is(")")) b.value = expr();
      else b.value.kind = ExprKind::Concat;  // unconnected
      expect(")");
      out.push_back(std::move(b));
    } while (accept(","));
    return out;
  }

  Item item() {
    Item it;
    it.loc = peek().loc;
    if (accept("wire")) {
      it.kind = ItemKind::Wire;
      if (is("[")) it.range = range();
      it.name = ident();
      expect(";");
    } else if (accept("assign")) {
      it.kind = ItemKind::Assign;
      it.lhs = lvalue();
      expect("=");
      it.rhs = expr();
      expect(";");
    } else if (accept("reg")) {
      it.kind = ItemKind::Reg;
      if (is("[")) it.range = range();
      it.name = ident();
      expect("init");
      if (accept("uninit")) {
        it.uninit = true;
      } else {
        it.rhs = expr();
      }
      expect(";");
    } else if (accept("always")) {
      it.kind = ItemKind::Always;
      it.name = ident();
      expect("<=");
      it.rhs = expr();
      expect(";");
    } else if (accept("if")) {
      it.kind = ItemKind::If;
      expect("(");
      it.rhs = expr();
      expect(")");
      while (!is("else") && !is("endif")) {
        if (peek().kind == Tok::End) syntax_error(peek().loc, "'endif'");
        it.then_items.push_back(item());
      }
      if (accept("else")) {
        while (!is("endif")) {
          if (peek().kind == Tok::End) syntax_error(peek().loc, "'endif'");
          it.else_items.push_back(item());
        }
      }
      expect("endif");
    } else if (peek().kind == Tok::Ident && !keyword(peek().text)) {
      it.kind = ItemKind::Instance;
      it.module = ident();
      if (accept("#(")) {
        it.overrides = bindings();
        expect(")");
      }
      it.name = ident();
      expect("(");
      it.connections = bindings();
      expect(")");
      expect(";");
    } else {
      syntax_error(peek().loc, "module item");
    }
    return it;
  }

  Expr lvalue() {
    SourceLoc loc = peek().loc;
    if (accept("{")) {
      Expr e;
      e.kind = ExprKind::Concat;
      e.loc = loc;
      do e.args.push_back(lvalue());
      while (accept(","));
      expect("}");
      return e;
    }
    Expr e;
    e.kind = ExprKind::Ident;
    e.loc = loc;
    e.name = ident();
    return select(std::move(e));
  }

  Expr select(Expr base) {
    if (!is("[")) return base;
    SourceLoc loc = peek().loc;
    expect("[");
    Expr first = expr();
    Expr out;
    out.name = base.name;
    out.loc = loc;
    if (accept(":")) {
      out.kind = ExprKind::Slice;
      out.args.push_back(std::move(first));
      out.args.push_back(expr());
    } else {
      out.kind = ExprKind::Index;
      out.args.push_back(std::move(first));
    }
    expect("]");
    return out;
  }

  // precedence climbing, loosest first
  static int precedence(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
    if (op == "<<" || op == ">>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    return 0;
  }

  Expr expr() {
    Expr cond = binary(1);
    if (!is("?")) return cond;
    SourceLoc loc = peek().loc;
    expect("?");
    Expr t = expr();
    expect(":");
    Expr e = expr();
    Expr out;
    out.kind = ExprKind::Ternary;
    out.loc = loc;
    out.args = {std::move(cond), std::move(t), std::move(e)};
    return out;
  }

  Expr binary(int min_prec) {
    Expr lhs = unary();
    while (peek().kind == Tok::Punct) {
      int prec = precedence(peek().text);
      if (prec == 0 || prec < min_prec) break;
      Token op = toks_[pos_++];
      Expr rhs = binary(prec + 1);
      Expr out;
      out.kind = ExprKind::Binary;
      out.op = op.text;
      out.loc = op.loc;
      out.args = {std::move(lhs), std::move(rhs)};
      lhs = std::move(out);
    }
    return lhs;
  }

  Expr unary() {
    SourceLoc loc = peek().loc;
    for (const char* op : {"~", "!", "&", "|", "^", "-"}) {
      if (accept(op)) {
        Expr out;
        out.kind = ExprKind::Unary;
        out.op = op;
        out.loc = loc;
        out.args.push_back(unary());
        return out;
      }
    }
    return primary();
  }

  Expr primary() {
    const Token& tok = peek();
    if (tok.kind == Tok::Number) {
      ++pos_;
      Expr e;
      e.kind = ExprKind::Const;
      e.loc = tok.loc;
      e.value = decode_number(tok);
      return e;
    }
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (is("{")) {
      SourceLoc loc = tok.loc;
      expect("{");
      Expr e;
      e.kind = ExprKind::Concat;
      e.loc = loc;
      do e.args.push_back(expr());
      while (accept(","));
      expect("}");
      return e;
    }
    if (tok.kind == Tok::Ident && !keyword(tok.text)) {
      Expr e;
      e.kind = ExprKind::Ident;
      e.loc = tok.loc;
      e.name = tok.text;
      ++pos_;
      return select(std::move(e));
    }
    syntax_error(tok.loc, "expression");
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

std::string const_text(const Constant& k) {
  if (!k.width) return k.digits;
  return std::to_string(*k.width) + "'" + std::string(1, k.base) + k.digits;
}

void print_expr(std::ostream& os, const Expr& e, bool nested) {
  switch (e.kind) {
    case ExprKind::Ident: os << e.name; break;
    case ExprKind::Const: os << const_text(e.value); break;
    case ExprKind::Unary:
      os << e.op;
      print_expr(os, e.args[0], true);
      break;
    case ExprKind::Binary:
      if (nested) os << "(";
      print_expr(os, e.args[0], true);
      os << " " << e.op << " ";
      print_expr(os, e.args[1], true);
      if (nested) os << ")";
      break;
    case ExprKind::Ternary:
      if (nested) os << "(";
      print_expr(os, e.args[0], true);
      os << " ? ";
      print_expr(os, e.args[1], true);
      os << " : ";
      print_expr(os, e.args[2], true);
      if (nested) os << ")";
      break;
    case ExprKind::Concat:
      os << "{";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, e.args[i], false);
      }
      os << "}";
      break;
    case ExprKind::Index:
      os << e.name << "[";
      print_expr(os, e.args[0], false);
      os << "]";
      break;
    case ExprKind::Slice:
      os << e.name << "[";
      print_expr(os, e.args[0], false);
      os << ":";
      print_expr(os, e.args[1], false);
      os << "]";
      break;
  }
}

void print_range(std::ostream& os, const std::optional<Range>& r) {
  if (!r) return;
  os << "[";
  print_expr(os, r->msb, false);
  os << ":";
  print_expr(os, r->lsb, false);
  os << "] ";
}

void print_bindings(std::ostream& os, const std::vector<Binding>& bs) {
  for (size_t i = 0; i < bs.size(); ++i) {
    if (i) os << ", ";
    os << "." << bs[i].name << "(";
    if (!(bs[i].value.kind == ExprKind::Concat && bs[i].value.args.empty())) print_expr(os, bs[i].value, false);
    os << ")";
  }
}

void print_items(std::ostream& os, const std::vector<Item>& items, int indent) {
  std::string pad(static_cast<size_t>(indent), ' ');
  for (const auto& it : items) {
    os << pad;
    switch (it.kind) {
      case ItemKind::Wire:
        os << "wire ";
        print_range(os, it.range);
        os << it.name << ";\n";
        break;
      case ItemKind::Assign:
        os << "assign ";
        print_expr(os, it.lhs, false);
        os << " = ";
        print_expr(os, it.rhs, false);
        os << ";\n";
        break;
      case ItemKind::Reg:
        os << "reg ";
        print_range(os, it.range);
        os << it.name << " init ";
        if (it.uninit) os << "uninit";
        else print_expr(os, it.rhs, false);
        os << ";\n";
        break;
      case ItemKind::Always:
        os << "always " << it.name << " <= ";
        print_expr(os, it.rhs, false);
        os << ";\n";
        break;
      case ItemKind::Instance:
        os << it.module << " ";
        if (!it.overrides.empty()) {
          os << "#(";
          print_bindings(os, it.overrides);
          os << ") ";
        }
        os << it.name << " (";
        print_bindings(os, it.connections);
        os << ");\n";
        break;
      case ItemKind::If:
        os << "if (";
        print_expr(os, it.rhs, false);
        os << ")\n";
        print_items(os, it.then_items, indent + 2);
        if (!it.else_items.empty()) {
          os << pad << "else\n";
          print_items(os, it.else_items, indent + 2);
        }
        os << pad << "endif\n";
        break;
    }
  }
}

}  // namespace

std::vector<SourceModule> parse(std::string_view text) { return Parser(text).modules(); }

Expr parse_expression(std::string_view text) { return Parser(text).whole_expression(); }

std::string print(const Expr& expr) {
  std::ostringstream os;
  print_expr(os, expr, false);
  return os.str();
}

std::string print(const SourceModule& m) {
  std::ostringstream os;
  os << "module " << m.name;
  if (!m.params.empty()) {
    os << " #(";
    for (size_t i = 0; i < m.params.size(); ++i) {
      if (i) os << ", ";
      os << "param " << m.params[i].name << " = ";
      print_expr(os, m.params[i].value, false);
    }
    os << ")";
  }
  os << " (";
  for (size_t i = 0; i < m.ports.size(); ++i) {
    if (i) os << ", ";
    os << (m.ports[i].dir == Direction::Input ? "input " : "output ");
    print_range(os, m.ports[i].range);
    os << m.ports[i].name;
  }
  os << ");\n";
  print_items(os, m.items, 2);
  os << "endmodule\n";
  return os.str();
}

std::string print(const std::vector<SourceModule>& modules) {
  std::string out;
  for (size_t i = 0; i < modules.size(); ++i) {
    if (i) out += "\n";
    out += print(modules[i]);
  }
  return out;
}

}  // namespace seqeq::snl
