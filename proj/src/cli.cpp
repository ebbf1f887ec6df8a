#include "seqeq/cli.hpp"

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "seqeq/bench.hpp"
#include "seqeq/config.hpp"
#include "seqeq/mapper.hpp"
#include "seqeq/report.hpp"
#include "seqeq/sim.hpp"
#include "seqeq/snl.hpp"
#include "seqeq/xcheck.hpp"

namespace seqeq {

namespace {

/// Flags that override [engine] and [report] keys.
struct Overrides {
  std::optional<std::string> mode;
  std::optional<int> jobs;
  std::optional<uint64_t> seed;
  std::optional<int> bmc_depth;
  std::optional<int> k_max;
  std::optional<int64_t> conflicts;
  std::string dump_cnf;
  std::string trace;
  std::string report;
  std::optional<std::string> format;
  bool no_refine = false;
};

void add_engine_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--jobs", o.jobs, "Concurrent solver instances")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Solver seed (overrides SEQEQ_SOLVER_SEED)");
  cmd->add_option("--bmc-depth", o.bmc_depth, "BMC depth bound")->check(CLI::NonNegativeNumber);
  cmd->add_option("--k-max", o.k_max, "Largest induction depth")->check(CLI::PositiveNumber);
  cmd->add_option("--conflicts", o.conflicts, "Conflict budget per solver call")->check(CLI::PositiveNumber);
  cmd->add_option("--dump-cnf", o.dump_cnf, "Write every SAT query as DIMACS into this directory");
  cmd->add_option("--trace", o.trace, "Counterexample trace path");
  cmd->add_option("--report", o.report, "Report path");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json"}));
}

void apply(const Overrides& o, TaskConfig& c) {
  if (o.mode) {
    if (*o.mode == "sec") c.mode = TaskMode::Sec;
    else if (*o.mode == "cec") c.mode = TaskMode::Cec;
    else c.mode = TaskMode::XCheck;
  }
  if (o.jobs) c.engine.jobs = *o.jobs;
  if (o.seed) c.engine.seed = *o.seed;
  if (o.bmc_depth) c.engine.bmc_depth = *o.bmc_depth;
  if (o.k_max) c.engine.k_max = *o.k_max;
  if (o.conflicts) c.engine.conflicts = *o.conflicts;
  if (!o.dump_cnf.empty()) c.engine.dump_cnf_dir = o.dump_cnf;
  if (o.no_refine) c.engine.refine = false;
  if (!o.trace.empty()) c.report.trace = o.trace;
  if (!o.report.empty()) c.report.path = o.report;
  if (o.format) c.report.format = *o.format;
}

std::map<std::string, int64_t> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, int64_t> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorKind::Usage, "--param expects NAME=VALUE, got '" + item + "'");
    try {
      out[item.substr(0, eq)] = std::stoll(item.substr(eq + 1), nullptr, 0);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Usage, "--param value is not an integer: '" + item + "'");
    }
  }
  return out;
}

/// Emits the verdict: status line and table on stdout, trace and report files.
int emit(const Verdict& v, const TaskConfig& c, std::ostream& out) {
  ReportContext ctx{to_string(c.mode), c.engine, {}};
  if (v.status == Status::NotEquivalent && v.trace) {
    std::filesystem::path p = c.report.trace.empty() ? c.base_dir / "counterexample.trace" : c.report.trace;
    write_file(p, write_trace(*v.trace));
    ctx.trace_path = p.string();
  }
  if (c.report.format == "json" && c.report.path.empty())
    out << report_json(v, ctx);
  else
    out << report_text(v, ctx);
  if (!c.report.path.empty())
    write_file(c.report.path, c.report.format == "json" ? report_json(v, ctx) : report_text(v, ctx));
  return exit_code(v.status);
}

int cmd_parse(const std::string& file, const std::string& top, const std::vector<std::string>& params, bool print,
              std::ostream& out) {
  auto modules = snl::parse(read_file(file));
  if (print) {
    out << snl::print(modules);
    return 0;
  }
  if (modules.empty()) throw Error(ErrorKind::ConfigError, file + " has no modules");
  const std::string t = top.empty() ? modules.back().name : top;
  Netlist n = snl::elaborate(modules, t, parse_params(params));
  validate(n);
  size_t x_inputs = 0;
  for (const auto& in : n.inputs()) x_inputs += in.role == InputRole::XSource;
  out << "module " << t << ": " << n.inputs().size() - x_inputs << " inputs, " << n.outputs().size() << " outputs, "
      << n.registers().size() << " registers, " << structural_hash(n).num_ands() << " and gates";
  if (x_inputs) out << ", " << x_inputs << " X sources";
  out << "\n";
  for (const auto& s : snl::list_x_sources(modules, t, parse_params(params), true))
    out << "x-source " << snl::to_string(s.kind) << " " << s.net << " at " << s.loc.line << ":" << s.loc.col << "\n";
  return 0;
}

int cmd_xcheck(const std::string& file, const std::string& config, const std::string& top,
               const std::vector<std::string>& params, const std::optional<std::string>& mode,
               const std::optional<std::string>& policy, const Overrides& o, std::ostream& out) {
  TaskConfig c;
  c.mode = TaskMode::XCheck;
  if (!config.empty()) c = load_config(config);
  if (!file.empty()) c.spec.file = file;
  if (!top.empty()) c.spec.top = top;
  for (const auto& [k, v] : parse_params(params)) c.spec.params[k] = v;
  if (mode) c.xmode = *parse_xcheck_mode(*mode);
  if (policy) c.xpolicy = *parse_xcheck_policy(*policy);
  apply(o, c);
  if (c.spec.file.empty() && c.spec.source.empty())
    throw Error(ErrorKind::Usage, "xcheck needs a design file or --config");
  auto modules = snl::parse(c.spec.source.empty() ? read_file(c.spec.file) : c.spec.source);
  if (modules.empty()) throw Error(ErrorKind::ConfigError, "design has no modules");
  const std::string t = c.spec.top.empty() ? modules.back().name : c.spec.top;
  XCheckReport r = check_x(modules, t, XCheckOptions{c.xmode, c.xpolicy, c.constraints, c.spec.params, c.engine});
  out << (r.clean ? "CLEAN" : r.verdict.status == Status::NotEquivalent ? "X_REACHES_OUTPUT" : to_string(r.verdict.status))
      << " (mode " << to_string(r.mode) << ", policies " << r.policy_pair << ")\n";
  for (const auto& s : r.sources) out << "x-source " << snl::to_string(s.kind) << " " << s.net << "\n";
  for (const auto& s : r.cone) out << "in cone of " << r.verdict.mismatch_output << ": " << s.net << "\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  c.mode = TaskMode::XCheck;
  std::ostringstream detail;
  const int code = emit(r.verdict, c, detail);
  out << detail.str();
  return code;
}

int cmd_map(const std::string& config, bool refine, std::ostream& out) {
  TaskConfig c = load_config(config);
  EquivalenceTask t = build_task(c);
  if (refine) t.mapping = refine_mapping(t);
  const Mapping& m = t.mapping;
  for (const auto& p : m.inputs) out << "input    " << p.spec << " = " << p.imp << "\n";
  for (const auto& p : m.outputs)
    out << "output   " << p.spec << " = " << p.imp << " latency [" << p.spec_latency << ", " << p.imp_latency << "]\n";
  for (const auto& p : m.registers) {
    out << "register " << p.spec << " = " << p.imp << " " << to_string(p.tag);
    if (p.falsified_at) out << " (differs at cycle " << *p.falsified_at << ")";
    if (p.induction_only) out << " (not inductive)";
    out << "\n";
  }
  for (const auto& n : m.unmatched_spec) out << "unmatched spec " << n << "\n";
  for (const auto& n : m.unmatched_imp) out << "unmatched imp  " << n << "\n";
  if (!m.qualifier.empty()) out << "qualifier " << m.qualifier << "\n";
  return 0;
}

int cmd_replay(const std::string& config, const std::string& trace_file, std::ostream& out) {
  TaskConfig c = load_config(config);
  EquivalenceTask t = build_task(c);
  const Trace trace = read_trace(read_file(trace_file));
  ReplayResult r = replay(*t.spec, *t.imp, t.mapping, trace);
  out << write_trace(r.annotated);
  if (r.mismatch_cycle) {
    out << "MISMATCH (cycle " << *r.mismatch_cycle << ", output " << r.mismatch_output << ")\n";
    return 1;
  }
  out << "NO MISMATCH over " << trace.cycles() << " cycles\n";
  return 0;
}

int cmd_bench(const std::string& kind, uint64_t seed, const std::string& dir, int width, int depth, bool faulty,
              std::ostream& out) {
  auto k = bench::parse_kind(kind);
  if (!k) throw Error(ErrorKind::Usage, "unknown scenario kind '" + kind + "'");
  bench::Scenario s = faulty ? bench::generate_faulty(*k, seed, {width, depth}) : bench::generate(*k, seed, {width, depth});
  bench::write_scenario(s, dir);
  out << bench::to_string(s.kind) << " seed " << seed << ": expected " << to_string(s.expected) << " (oracle "
      << s.oracle << ")";
  if (!s.requirement.empty()) out << ", requires " << s.requirement;
  out << "\nwrote " << (std::filesystem::path(dir) / "task.cfg").string() << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"seqeq: sequential and combinational equivalence checking for SNL designs", "seqeq"};
  app.require_subcommand(1);

  Overrides check_o;
  std::string check_config;
  auto* check = app.add_subcommand("check", "Run the task a config file describes");
  check->add_option("--config,-c", check_config, "Task config")->required();
  check->add_option("--mode", check_o.mode, "Override [task] mode")->check(CLI::IsMember({"sec", "cec", "xcheck"}));
  check->add_flag("--no-refine", check_o.no_refine, "Skip mapping refinement");
  add_engine_flags(check, check_o);

  std::string parse_file, parse_top;
  std::vector<std::string> parse_params_list;
  bool parse_print = false;
  auto* parse = app.add_subcommand("parse", "Parse and elaborate a design, print a summary");
  parse->add_option("file", parse_file, "SNL source")->required();
  parse->add_option("--top", parse_top, "Top module (default: last module)");
  parse->add_option("--param", parse_params_list, "Parameter override NAME=VALUE");
  parse->add_flag("--print", parse_print, "Print the canonical source instead");

  Overrides x_o;
  std::string x_file, x_config, x_top;
  std::vector<std::string> x_params;
  std::optional<std::string> x_mode, x_policy;
  auto* xcheck = app.add_subcommand("xcheck", "Check whether X sources can reach an output");
  xcheck->add_option("file", x_file, "SNL source");
  xcheck->add_option("--config,-c", x_config, "Task config ([spec] and [xcheck] sections)");
  xcheck->add_option("--top", x_top, "Top module");
  xcheck->add_option("--param", x_params, "Parameter override NAME=VALUE");
  xcheck->add_option("--mode", x_mode, "uninit, xsrc or both")->check(CLI::IsMember({"uninit", "xsrc", "both"}));
  xcheck->add_option("--policy", x_policy, "01 or symbolic")->check(CLI::IsMember({"01", "symbolic"}));
  add_engine_flags(xcheck, x_o);

  std::string b_kind, b_out;
  uint64_t b_seed = 0;
  int b_width = 8, b_depth = 4;
  bool b_faulty = false;
  auto* bench_cmd = app.add_subcommand("bench", "Generate a labeled scenario");
  bench_cmd->add_option("--kind", b_kind, "Scenario kind, e.g. retime")->required();
  bench_cmd->add_option("--seed", b_seed, "Generator seed");
  bench_cmd->add_option("--out", b_out, "Output directory")->required();
  bench_cmd->add_option("--width", b_width, "Datapath width");
  bench_cmd->add_option("--depth", b_depth, "Pipeline depth");
  bench_cmd->add_flag("--faulty", b_faulty, "Inject a behavior-changing defect into the IMP");

  std::string m_config;
  bool m_refine = false;
  auto* map = app.add_subcommand("map", "Print the SPEC/IMP correspondence");
  map->add_option("--config,-c", m_config, "Task config")->required();
  map->add_flag("--refine", m_refine, "Prove or drop register pairs first");

  std::string r_config, r_trace;
  auto* replay_cmd = app.add_subcommand("replay", "Re-simulate both designs on a trace");
  replay_cmd->add_option("--config,-c", r_config, "Task config")->required();
  replay_cmd->add_option("--trace", r_trace, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*check) {
      TaskConfig c = load_config(check_config);
      apply(check_o, c);
      return emit(bench::run_task(c), c, out);
    }
    if (*parse) return cmd_parse(parse_file, parse_top, parse_params_list, parse_print, out);
    if (*xcheck) return cmd_xcheck(x_file, x_config, x_top, x_params, x_mode, x_policy, x_o, out);
    if (*bench_cmd) return cmd_bench(b_kind, b_seed, b_out, b_width, b_depth, b_faulty, out);
    if (*map) return cmd_map(m_config, m_refine, out);
    if (*replay_cmd) return cmd_replay(r_config, r_trace, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitError;
  }
  err << "error: no subcommand\n";
  return kExitError;
}

}  // namespace seqeq
