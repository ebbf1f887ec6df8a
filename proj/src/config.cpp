#include "seqeq/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "seqeq/mapper.hpp"
#include "seqeq/sim.hpp"

namespace seqeq {

const char* to_string(TaskMode mode) {
  switch (mode) {
    case TaskMode::Cec: return "cec";
    case TaskMode::Sec: return "sec";
    case TaskMode::XCheck: return "xcheck";
  }
  return "?";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

namespace {

/// Scalar text or a bracketed list.
struct Value {
  std::string text;
  std::vector<Value> items;
  bool is_list = false;
};

class ValueParser {
 public:
  ValueParser(const std::string& s, int line) : s_(s), line_(line) {}

  Value parse() {
    Value v = value(true);
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("unexpected text after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ConfigError, "line " + std::to_string(line_) + ": " + what);
  }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  /// Top-level bare scalars run to the end of the line (minus a comment).
  Value value(bool top = false) {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    Value v;
    if (s_[pos_] == '[') {
      ++pos_;
      v.is_list = true;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      for (;;) {
        v.items.push_back(value());
        skip_ws();
        if (pos_ >= s_.size()) fail("unterminated list");
        if (s_[pos_] == ']') {
          ++pos_;
          return v;
        }
        if (s_[pos_] != ',') fail("expected ',' or ']'");
        ++pos_;
      }
    }
    if (s_[pos_] == '"') {
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
        v.text += s_[pos_++];
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      ++pos_;
      return v;
    }
    const size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != '#' && (top || (s_[pos_] != ',' && s_[pos_] != ']'))) ++pos_;
    v.text = s_.substr(start, pos_ - start);
    while (!v.text.empty() && (v.text.back() == ' ' || v.text.back() == '\t')) v.text.pop_back();
    if (v.text.empty()) fail("missing value");
    return v;
  }

  const std::string& s_;
  int line_;
  size_t pos_ = 0;
};

struct Entry {
  std::string section;
  std::string key;
  Value value;
  int line;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

[[noreturn]] void bad(const Entry& e, const std::string& what) {
  throw Error(ErrorKind::ConfigError,
              "line " + std::to_string(e.line) + ": [" + e.section + "] " + e.key + ": " + what);
}

std::string scalar(const Entry& e) {
  if (e.value.is_list) bad(e, "expected a scalar");
  return e.value.text;
}

int64_t integer(const Entry& e) {
  const std::string s = scalar(e);
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) bad(e, "expected an integer, got '" + s + "'");
  return v;
}

bool boolean(const Entry& e) {
  const std::string s = scalar(e);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad(e, "expected true or false");
}

std::vector<std::string> strings(const Entry& e) {
  if (!e.value.is_list) return {e.value.text};
  std::vector<std::string> out;
  for (const auto& item : e.value.items) {
    if (item.is_list) bad(e, "expected a list of strings");
    out.push_back(item.text);
  }
  return out;
}

NetPair pair_of(const Entry& e, const Value& v) {
  if (!v.is_list || v.items.size() != 2 || v.items[0].is_list || v.items[1].is_list)
    bad(e, "expected [spec-name, imp-name]");
  return {v.items[0].text, v.items[1].text};
}

std::vector<NetPair> pairs(const Entry& e) {
  if (!e.value.is_list) bad(e, "expected a list of [spec-name, imp-name] pairs");
  if (e.value.items.size() == 2 && !e.value.items[0].is_list) return {pair_of(e, e.value)};
  std::vector<NetPair> out;
  for (const auto& item : e.value.items) out.push_back(pair_of(e, item));
  return out;
}

LatencyPair latency(const Entry& e) {
  auto vals = strings(e);
  if (vals.size() != 2) bad(e, "expected [l_spec, l_imp]");
  LatencyPair l;
  Entry tmp = e;
  tmp.value = Value{vals[0], {}, false};
  l.spec = static_cast<int>(integer(tmp));
  tmp.value = Value{vals[1], {}, false};
  l.imp = static_cast<int>(integer(tmp));
  if (l.spec < 0 || l.imp < 0) bad(e, "latencies must be >= 0");
  return l;
}

snl::XMode xmode(const Entry& e) {
  const std::string s = scalar(e);
  if (s == "zero" || s == "0" || s == "X_TO_ZERO") return snl::XMode::Zero;
  if (s == "one" || s == "1" || s == "X_TO_ONE") return snl::XMode::One;
  if (s == "symbolic" || s == "X_SYMBOLIC") return snl::XMode::Symbolic;
  bad(e, "expected zero, one or symbolic");
}

void design_key(DesignConfig& d, const Entry& e) {
  if (e.key == "file") {
    d.file = scalar(e);
  } else if (e.key == "top") {
    d.top = scalar(e);
  } else if (e.key == "xpolicy") {
    d.xpolicy.uninit = d.xpolicy.xvalue = xmode(e);
  } else if (e.key == "uninit") {
    d.xpolicy.uninit = xmode(e);
  } else if (e.key == "xvalue") {
    d.xpolicy.xvalue = xmode(e);
  } else if (e.key == "allow_undriven") {
    d.xpolicy.allow_undriven = boolean(e);
  } else if (e.key.rfind("param.", 0) == 0 && e.key.size() > 6) {
    d.params[e.key.substr(6)] = integer(e);
  } else {
    bad(e, "unknown key");
  }
}

}  // namespace

TaskConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  static const std::set<std::string> sections = {"spec",   "imp",   "task",    "mapping", "constraints", "blackbox",
                                                 "cases",  "helpers", "engine", "xcheck",  "report"};
  std::vector<Entry> entries;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s[0] == '[') {
      if (s.back() != ']') throw Error(ErrorKind::ConfigError, "line " + std::to_string(line) + ": bad section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!sections.count(section))
        throw Error(ErrorKind::ConfigError, "line " + std::to_string(line) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(line) + ": expected key = value");
    if (section.empty())
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(line) + ": key outside a section");
    const std::string key = trim(s.substr(0, eq));
    const std::string rest = s.substr(eq + 1);
    entries.push_back({section, key, ValueParser(rest, line).parse(), line});
  }

  TaskConfig c;
  c.base_dir = base_dir;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : entries) {
    const bool repeatable = e.section == "constraints" || e.section == "cases" || e.section == "helpers";
    if (!repeatable && !seen.insert({e.section, e.key}).second) bad(e, "duplicate key");
    if (e.section == "spec") {
      design_key(c.spec, e);
    } else if (e.section == "imp") {
      design_key(c.imp, e);
    } else if (e.section == "task") {
      if (e.key != "mode") bad(e, "unknown key");
      const std::string m = scalar(e);
      if (m == "cec")
        c.mode = TaskMode::Cec;
      else if (m == "sec")
        c.mode = TaskMode::Sec;
      else if (m == "xcheck")
        c.mode = TaskMode::XCheck;
      else
        bad(e, "expected cec, sec or xcheck");
    } else if (e.section == "mapping") {
      auto& m = c.mapping;
      if (e.key == "by_name")
        m.by_name = boolean(e);
      else if (e.key == "by_signature")
        m.by_signature = boolean(e);
      else if (e.key == "rename")
        m.rename = strings(e);
      else if (e.key == "inputs")
        m.inputs = pairs(e);
      else if (e.key == "outputs")
        m.outputs = pairs(e);
      else if (e.key == "registers")
        m.registers = pairs(e);
      else if (e.key == "assume")
        m.assume = pairs(e);
      else if (e.key == "latency")
        m.latency = latency(e);
      else if (e.key.rfind("latency.", 0) == 0 && e.key.size() > 8)
        m.output_latency[e.key.substr(8)] = latency(e);
      else if (e.key == "qualifier")
        m.qualifier = scalar(e);
      else if (e.key == "refine")
        c.engine.refine = boolean(e);
      else
        bad(e, "unknown key");
    } else if (e.section == "constraints") {
      c.constraints.push_back(scalar(e));
    } else if (e.section == "blackbox") {
      if (e.key == "spec")
        c.spec.blackbox = strings(e);
      else if (e.key == "imp")
        c.imp.blackbox = strings(e);
      else
        bad(e, "unknown key");
    } else if (e.section == "cases") {
      c.cases.push_back({e.key, scalar(e)});
    } else if (e.section == "helpers") {
      c.helpers.push_back(pair_of(e, e.value));
    } else if (e.section == "engine") {
      auto& g = c.engine;
      if (e.key == "bmc_depth")
        g.bmc_depth = static_cast<int>(integer(e));
      else if (e.key == "k_max")
        g.k_max = static_cast<int>(integer(e));
      else if (e.key == "conflicts")
        g.conflicts = integer(e);
      else if (e.key == "jobs")
        g.jobs = static_cast<int>(integer(e));
      else if (e.key == "seed")
        g.seed = static_cast<uint64_t>(integer(e));
      else if (e.key == "signature_runs")
        g.signature_runs = static_cast<int>(integer(e));
      else if (e.key == "signature_depth")
        g.signature_depth = static_cast<int>(integer(e));
      else
        bad(e, "unknown key");
      if (g.bmc_depth < 0 || g.k_max < 0 || g.jobs < 1 || g.signature_runs < 1 || g.signature_depth < 0)
        bad(e, "out of range");
    } else if (e.section == "xcheck") {
      if (e.key == "mode") {
        auto m = parse_xcheck_mode(scalar(e));
        if (!m) bad(e, "expected uninit, xsrc or both");
        c.xmode = *m;
      } else if (e.key == "policy") {
        auto p = parse_xcheck_policy(scalar(e));
        if (!p) bad(e, "expected 01 or symbolic");
        c.xpolicy = *p;
      } else {
        bad(e, "unknown key");
      }
    } else if (e.section == "report") {
      if (e.key == "trace")
        c.report.trace = scalar(e);
      else if (e.key == "path")
        c.report.path = scalar(e);
      else if (e.key == "format") {
        c.report.format = scalar(e);
        if (c.report.format != "text" && c.report.format != "json") bad(e, "expected text or json");
      } else {
        bad(e, "unknown key");
      }
    }
  }
  return c;
}

TaskConfig load_config(const std::filesystem::path& path) {
  TaskConfig c = parse_config(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
  for (DesignConfig* d : {&c.spec, &c.imp}) {
    if (d->file.empty()) continue;
    if (d->file.is_relative()) d->file = c.base_dir / d->file;
    if (!std::filesystem::exists(d->file)) throw Error(ErrorKind::ConfigError, "file not found: " + d->file.string());
  }
  for (auto* p : {&c.report.trace, &c.report.path})
    if (!p->empty() && p->is_relative()) *p = c.base_dir / *p;
  return c;
}

namespace {

/// Expands word-level names ("data") to bit pairs ("data[0]".."data[n-1]").
std::vector<NetPair> bit_pairs(const Netlist& spec, const Netlist& imp, const NetPair& p, const char* what) {
  auto s = word_bits(spec, p.spec);
  auto i = word_bits(imp, p.imp);
  if (s.empty()) throw Error(ErrorKind::UnknownNet, std::string("SPEC ") + what + " " + p.spec);
  if (i.empty()) throw Error(ErrorKind::UnknownNet, std::string("IMP ") + what + " " + p.imp);
  if (s.size() != i.size()) throw Error(ErrorKind::WidthMismatch, p.spec + " vs " + p.imp);
  std::vector<NetPair> out;
  for (size_t k = 0; k < s.size(); ++k) out.push_back({s[k], i[k]});
  return out;
}

template <typename T, typename Key>
void upsert(std::vector<T>& v, const T& item, Key key) {
  for (auto& x : v)
    if (key(x) == key(item)) {
      x = item;
      return;
    }
  v.push_back(item);
}

std::shared_ptr<const Netlist> load_design(const DesignConfig& d, const char* side) {
  if (d.file.empty() && d.source.empty())
    throw Error(ErrorKind::ConfigError, std::string("[") + side + "] file is required");
  auto modules = snl::parse(d.source.empty() ? read_file(d.file) : d.source);
  std::string top = d.top;
  if (top.empty()) {
    if (modules.empty()) throw Error(ErrorKind::ConfigError, d.file.string() + " has no modules");
    top = modules.back().name;
  }
  Netlist n = snl::elaborate(modules, top, d.params, d.xpolicy);
  if (!d.blackbox.empty()) n = black_box(n, d.blackbox);
  return std::make_shared<const Netlist>(std::move(n));
}

}  // namespace

void apply_latencies(const MappingConfig& config, Mapping& mapping) {
  if (!config.output_latency.empty() && !config.latency) {
    for (const auto& o : mapping.outputs) {
      auto [base, idx] = snl::split_bit_name(o.spec);
      if (!config.output_latency.count(o.spec) && !config.output_latency.count(base))
        throw Error(ErrorKind::LatencyMismatchUnspecified, o.spec);
    }
  }
  for (const auto& [name, _] : config.output_latency) {
    bool found = false;
    for (const auto& o : mapping.outputs)
      found |= o.spec == name || snl::split_bit_name(o.spec).first == name;
    if (!found) throw Error(ErrorKind::UnmappedOutput, "latency for unknown output " + name);
  }
  for (auto& o : mapping.outputs) {
    auto [base, idx] = snl::split_bit_name(o.spec);
    std::optional<LatencyPair> l = config.latency;
    if (auto it = config.output_latency.find(base); it != config.output_latency.end()) l = it->second;
    if (auto it = config.output_latency.find(o.spec); it != config.output_latency.end()) l = it->second;
    if (l) {
      o.spec_latency = l->spec;
      o.imp_latency = l->imp;
    }
  }
}

EquivalenceTask build_task(const TaskConfig& config) {
  EquivalenceTask t;
  t.spec = load_design(config.spec, "spec");
  t.imp = load_design(config.imp, "imp");
  const MappingConfig& mc = config.mapping;
  std::vector<RenameRule> rules;
  for (const auto& r : mc.rename) rules.push_back(RenameRule::parse(r));
  if (mc.by_name) t.mapping = map_by_name(*t.spec, *t.imp, rules);
  auto by_spec = [](const auto& x) { return x.spec; };
  for (const auto& p : mc.inputs)
    for (const auto& b : bit_pairs(*t.spec, *t.imp, p, "input")) upsert(t.mapping.inputs, b, by_spec);
  for (const auto& p : mc.outputs)
    for (const auto& b : bit_pairs(*t.spec, *t.imp, p, "output"))
      upsert(t.mapping.outputs, OutputPair{b.spec, b.imp, 0, 0}, by_spec);
  for (const auto& p : mc.registers)
    for (const auto& b : bit_pairs(*t.spec, *t.imp, p, "register"))
      upsert(t.mapping.registers, RegisterPair{b.spec, b.imp, PairTag::Candidate, std::nullopt, false}, by_spec);
  for (const auto& p : mc.assume)
    for (const auto& b : bit_pairs(*t.spec, *t.imp, p, "register"))
      upsert(t.mapping.registers, RegisterPair{b.spec, b.imp, PairTag::Assumed, std::nullopt, false}, by_spec);
  if (mc.by_signature)
    add_signature_pairs(*t.spec, *t.imp, t.mapping,
                        SignatureConfig{static_cast<size_t>(config.engine.signature_runs),
                                        static_cast<size_t>(config.engine.signature_depth), config.engine.seed});
  apply_latencies(mc, t.mapping);
  t.mapping.qualifier = mc.qualifier;
  t.constraints = config.constraints;
  t.cases = config.cases;
  for (const auto& h : config.helpers)
    for (const auto& b : bit_pairs(*t.spec, *t.imp, h, "helper")) t.helpers.push_back(b);
  t.engine = config.engine;
  return t;
}

}  // namespace seqeq
