#include "seqeq/task.hpp"

#include <sstream>

namespace seqeq {

const char* to_string(PairTag tag) {
  switch (tag) {
    case PairTag::Assumed: return "ASSUMED";
    case PairTag::Candidate: return "CANDIDATE";
    case PairTag::Proven: return "PROVEN";
    case PairTag::Dropped: return "DROPPED";
  }
  return "?";
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Equivalent: return "EQUIVALENT";
    case Status::NotEquivalent: return "NOT_EQUIVALENT";
    case Status::Inconclusive: return "INCONCLUSIVE";
    case Status::Vacuous: return "VACUOUS";
  }
  return "?";
}

std::optional<Status> parse_status(const std::string& text) {
  for (Status s : {Status::Equivalent, Status::NotEquivalent, Status::Inconclusive, Status::Vacuous})
    if (text == to_string(s)) return s;
  return std::nullopt;
}

std::vector<std::string> word_bits(const Netlist& netlist, const std::string& identifier) {
  if (netlist.find(identifier)) return {identifier};
  std::vector<std::string> bits;
  for (int i = 0;; ++i) {
    std::string bit = identifier + "[" + std::to_string(i) + "]";
    if (!netlist.find(bit)) break;
    bits.push_back(std::move(bit));
  }
  return bits;
}

namespace {

bool is_input_word(const Netlist& netlist, const std::vector<std::string>& bits) {
  return !bits.empty() && netlist.find_input(bits.front()).has_value();
}

}  // namespace

std::optional<BoundIdentifier> bind_identifier(const Netlist& spec, const Netlist& imp, const std::string& identifier) {
  auto spec_bits = word_bits(spec, identifier);
  if (is_input_word(spec, spec_bits)) return BoundIdentifier{Side::Spec, true, spec_bits};
  auto imp_bits = word_bits(imp, identifier);
  if (is_input_word(imp, imp_bits)) return BoundIdentifier{Side::Imp, true, imp_bits};
  if (!spec_bits.empty()) return BoundIdentifier{Side::Spec, false, spec_bits};
  if (!imp_bits.empty()) return BoundIdentifier{Side::Imp, false, imp_bits};
  return std::nullopt;
}

std::string write_trace(const Trace& trace) {
  std::ostringstream out;
  out << "cycles " << trace.cycles() << "\n";
  for (size_t c = 0; c < trace.cycles(); ++c) {
    out << "@" << c << "\n";
    for (const auto& [name, v] : trace.inputs[c]) out << "in " << name << " " << to_char(v) << "\n";
    if (c == 0)
      for (const auto& [name, v] : trace.registers) out << "reg " << name << " " << (v ? 1 : 0) << "\n";
    if (c < trace.outputs.size())
      for (const auto& o : trace.outputs[c])
        out << "out " << o.spec << "=" << to_char(o.spec_value) << " " << o.imp << "=" << to_char(o.imp_value)
            << (o.mismatch ? " MISMATCH" : "") << "\n";
  }
  return out.str();
}

namespace {

Tri parse_tri(const std::string& text, int line) {
  if (text == "0") return Tri::Zero;
  if (text == "1") return Tri::One;
  if (text == "x" || text == "X") return Tri::X;
  throw Error(ErrorKind::SyntaxError, std::to_string(line) + ":1: expected 0, 1 or x");
}

std::pair<std::string, Tri> parse_assignment(const std::string& text, int line) {
  auto eq = text.rfind('=');
  if (eq == std::string::npos) throw Error(ErrorKind::SyntaxError, std::to_string(line) + ":1: expected name=value");
  return {text.substr(0, eq), parse_tri(text.substr(eq + 1), line)};
}

}  // namespace

Trace read_trace(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  std::optional<size_t> declared;
  std::optional<size_t> current;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::string head;
    if (!(words >> head) || head.starts_with("#")) continue;
    if (head == "cycles") {
      size_t n = 0;
      if (!(words >> n)) throw Error(ErrorKind::SyntaxError, std::to_string(line_no) + ":1: expected cycle count");
      declared = n;
    } else if (head.starts_with("@")) {
      size_t c = std::stoul(head.substr(1));
      if (c != trace.inputs.size())
        throw Error(ErrorKind::SyntaxError, std::to_string(line_no) + ":1: expected @" + std::to_string(trace.inputs.size()));
      trace.inputs.emplace_back();
      trace.outputs.emplace_back();
      current = c;
    } else if (head == "in" || head == "reg" || head == "out") {
      if (!current) throw Error(ErrorKind::SyntaxError, std::to_string(line_no) + ":1: expected @cycle before " + head);
      if (head == "out") {
        std::string a, b, flag;
        words >> a >> b >> flag;
        auto [sn, sv] = parse_assignment(a, line_no);
        auto [in_name, iv] = parse_assignment(b, line_no);
        trace.outputs[*current].push_back(OutLine{sn, sv, in_name, iv, flag == "MISMATCH"});
        continue;
      }
      std::string name, value;
      if (!(words >> name >> value))
        throw Error(ErrorKind::SyntaxError, std::to_string(line_no) + ":1: expected name and value");
      Tri v = parse_tri(value, line_no);
      if (head == "in") {
        trace.inputs[*current][name] = v;
      } else {
        if (v == Tri::X) throw Error(ErrorKind::SyntaxError, std::to_string(line_no) + ":1: expected 0 or 1");
        trace.registers[name] = v == Tri::One;
      }
    } else {
      throw Error(ErrorKind::SyntaxError, std::to_string(line_no) + ":1: expected cycles, @, in, reg or out");
    }
  }
  if (declared && trace.inputs.size() < *declared)
    throw Error(ErrorKind::TraceTooShort,
                "declared " + std::to_string(*declared) + " cycles, found " + std::to_string(trace.inputs.size()));
  return trace;
}

}  // namespace seqeq
