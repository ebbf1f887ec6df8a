#include "seqeq/report.hpp"

#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace seqeq {

using nlohmann::json;

int exit_code(Status status) {
  switch (status) {
    case Status::Equivalent: return 0;
    case Status::NotEquivalent: return 1;
    case Status::Inconclusive:
    case Status::Vacuous: return 2;
  }
  return 2;
}

std::string status_line(const Verdict& v) {
  std::string s = to_string(v.status);
  switch (v.status) {
    case Status::Equivalent:
      s += " (k=" + std::to_string(v.k) + ")";
      break;
    case Status::NotEquivalent:
      if (v.mismatch_cycle) s += " (cycle " + std::to_string(*v.mismatch_cycle);
      if (!v.mismatch_output.empty()) s += ", output " + v.mismatch_output;
      if (v.mismatch_cycle) s += ")";
      break;
    case Status::Inconclusive:
      s += " (bmc_depth=" + std::to_string(v.bmc_depth) + ", k=" + std::to_string(v.k) + ")";
      break;
    case Status::Vacuous: break;
  }
  return s;
}

namespace {

json optional_size(const std::optional<size_t>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string report_json(const Verdict& v, const ReportContext& ctx) {
  json j;
  j["status"] = to_string(v.status);
  j["mode"] = ctx.mode;
  j["method"] = v.method;
  j["k"] = v.k;
  j["bmc_depth"] = v.bmc_depth;
  j["mismatch_cycle"] = optional_size(v.mismatch_cycle);
  j["mismatch_output"] = v.mismatch_output;
  j["hardest_output"] = v.hardest_output;
  j["helpers_used"] = v.helpers_used;
  j["outputs"] = json::array();
  for (const auto& o : v.outputs) j["outputs"].push_back({{"spec", o.spec}, {"imp", o.imp}, {"status", to_string(o.status)}});
  j["cases"] = json::array();
  for (const auto& c : v.cases)
    j["cases"].push_back({{"name", c.name},
                          {"predicate", c.predicate},
                          {"status", to_string(c.status)},
                          {"k", c.k},
                          {"bmc_depth", c.bmc_depth},
                          {"mismatch_cycle", optional_size(c.mismatch_cycle)},
                          {"seconds", c.seconds}});
  j["notes"] = v.notes;
  j["conflicts"] = v.conflicts;
  j["seconds"] = v.seconds;
  j["budgets"] = {{"bmc_depth", ctx.engine.bmc_depth},
                  {"k_max", ctx.engine.k_max},
                  {"conflicts", ctx.engine.conflicts},
                  {"jobs", ctx.engine.jobs},
                  {"seed", ctx.engine.seed}};
  j["trace"] = v.trace ? json(write_trace(*v.trace)) : json("");
  j["trace_path"] = ctx.trace_path;
  return j.dump(2) + "\n";
}

std::string report_text(const Verdict& v, const ReportContext& ctx) {
  std::ostringstream os;
  os << status_line(v) << "\n";
  os << "mode " << ctx.mode << ", method " << (v.method.empty() ? "-" : v.method) << ", " << std::fixed
     << std::setprecision(3) << v.seconds << " s, " << v.conflicts << " conflicts\n";
  if (!v.outputs.empty()) {
    size_t w = 6;
    for (const auto& o : v.outputs) w = std::max(w, o.spec.size() + o.imp.size() + 3);
    os << std::left << std::setw(static_cast<int>(w)) << "output" << "  status\n";
    for (const auto& o : v.outputs)
      os << std::setw(static_cast<int>(w)) << (o.spec + " / " + o.imp) << "  " << to_string(o.status) << "\n";
  }
  for (const auto& c : v.cases)
    os << "case " << c.name << ": " << to_string(c.status) << " (k=" << c.k << ", " << std::setprecision(3)
       << c.seconds << " s)\n";
  if (!v.helpers_used.empty()) {
    os << "helpers used:";
    for (const auto& h : v.helpers_used) os << " " << h;
    os << "\n";
  }
  if (!v.hardest_output.empty()) os << "hardest output: " << v.hardest_output << "\n";
  for (const auto& n : v.notes) os << "note: " << n << "\n";
  if (!ctx.trace_path.empty()) os << "trace: " << ctx.trace_path << "\n";
  return os.str();
}

Status report_status(const std::string& json_text) {
  try {
    auto j = json::parse(json_text);
    auto s = parse_status(j.at("status").get<std::string>());
    if (!s) throw Error(ErrorKind::ConfigError, "unknown status in report");
    return *s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed report: ") + e.what());
  }
}

std::string report_csv_header() { return "name,status,method,k,bmc_depth,conflicts,seconds\n"; }

std::string report_csv_row(const std::string& name, const std::string& json_text) {
  try {
    auto j = json::parse(json_text);
    std::ostringstream os;
    os << name << "," << j.at("status").get<std::string>() << "," << j.at("method").get<std::string>() << ","
       << j.at("k").get<int>() << "," << j.at("bmc_depth").get<int>() << "," << j.at("conflicts").get<int64_t>()
       << "," << j.at("seconds").get<double>() << "\n";
    return os.str();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed report: ") + e.what());
  }
}

}  // namespace seqeq
