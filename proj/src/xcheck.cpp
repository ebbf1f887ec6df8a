#include "seqeq/xcheck.hpp"

#include <memory>

#include "seqeq/mapper.hpp"
#include "seqeq/sec.hpp"

namespace seqeq {

const char* to_string(XCheckMode mode) {
  switch (mode) {
    case XCheckMode::UninitFlops: return "UNINIT_FLOPS";
    case XCheckMode::XSources: return "X_SOURCES";
    case XCheckMode::Both: return "BOTH";
  }
  return "?";
}

const char* to_string(XCheckPolicy policy) { return policy == XCheckPolicy::ZeroOne ? "01" : "symbolic"; }

std::optional<XCheckMode> parse_xcheck_mode(const std::string& text) {
  if (text == "uninit") return XCheckMode::UninitFlops;
  if (text == "xsrc") return XCheckMode::XSources;
  if (text == "both") return XCheckMode::Both;
  return std::nullopt;
}

std::optional<XCheckPolicy> parse_xcheck_policy(const std::string& text) {
  if (text == "01") return XCheckPolicy::ZeroOne;
  if (text == "symbolic") return XCheckPolicy::Symbolic;
  return std::nullopt;
}

namespace {

bool selected(XCheckMode mode, snl::XSourceKind kind) {
  if (mode == XCheckMode::Both) return true;
  return (kind == snl::XSourceKind::UninitRegister) == (mode == XCheckMode::UninitFlops);
}

std::string policy_name(snl::XMode m) {
  switch (m) {
    case snl::XMode::Zero: return "X_TO_ZERO";
    case snl::XMode::One: return "X_TO_ONE";
    case snl::XMode::Symbolic: return "X_SYMBOLIC";
  }
  return "?";
}

/// Whether an X source survives in the symbolic cone netlist.
bool in_cone(const Netlist& cone, const snl::XSource& src) {
  switch (src.kind) {
    case snl::XSourceKind::UninitRegister: return cone.find_register(src.net).has_value();
    case snl::XSourceKind::XLiteral: return cone.find_input(src.net).has_value();
    case snl::XSourceKind::UndrivenNet: return cone.find_input("$undriven." + src.net).has_value();
  }
  return false;
}

}  // namespace

std::pair<snl::XPolicy, snl::XPolicy> xcheck_policies(const XCheckOptions& options) {
  const bool uninit_on = options.mode != XCheckMode::XSources;
  const bool xval_on = options.mode != XCheckMode::UninitFlops;
  const snl::XMode a_mode = options.policy == XCheckPolicy::ZeroOne ? snl::XMode::Zero : snl::XMode::Symbolic;
  const snl::XMode b_mode = options.policy == XCheckPolicy::ZeroOne ? snl::XMode::One : snl::XMode::Symbolic;
  return {snl::XPolicy{uninit_on ? a_mode : snl::XMode::Zero, xval_on ? a_mode : snl::XMode::Zero, true},
          snl::XPolicy{uninit_on ? b_mode : snl::XMode::Zero, xval_on ? b_mode : snl::XMode::Zero, true}};
}

EquivalenceTask xcheck_task(const std::vector<snl::SourceModule>& modules, const std::string& top,
                            const XCheckOptions& options) {
  const auto [pa, pb] = xcheck_policies(options);
  EquivalenceTask task;
  task.spec = std::make_shared<const Netlist>(snl::elaborate(modules, top, options.params, pa));
  task.imp = std::make_shared<const Netlist>(snl::elaborate(modules, top, options.params, pb));
  task.mapping = map_by_name(*task.spec, *task.imp);
  task.constraints = options.constraints;
  task.engine = options.engine;
  task.engine.refine = true;
  return task;
}

XCheckReport check_x(const std::vector<snl::SourceModule>& modules, const std::string& top,
                     const XCheckOptions& options) {
  XCheckReport report;
  report.mode = options.mode;
  report.policy = options.policy;
  for (auto& s : snl::list_x_sources(modules, top, options.params, true))
    if (selected(options.mode, s.kind)) report.sources.push_back(std::move(s));

  const bool zero_one = options.policy == XCheckPolicy::ZeroOne;
  report.policy_pair = policy_name(zero_one ? snl::XMode::Zero : snl::XMode::Symbolic) + "/" +
                       policy_name(zero_one ? snl::XMode::One : snl::XMode::Symbolic);

  if (report.sources.empty()) {
    report.clean = true;
    report.verdict.status = Status::Equivalent;
    report.verdict.method = "no-x-sources";
    report.notes.push_back("design has no X sources of the selected class");
    return report;
  }

  report.verdict = check_sec(xcheck_task(modules, top, options));
  report.clean = report.verdict.status == Status::Equivalent;
  if (report.verdict.status == Status::Vacuous) report.notes.push_back("constraints are unsatisfiable");

  if (report.verdict.status == Status::NotEquivalent && !report.verdict.mismatch_output.empty()) {
    const Netlist symbolic =
        snl::elaborate(modules, top, options.params, snl::XPolicy::all(snl::XMode::Symbolic, true));
    const std::string target = report.verdict.mismatch_output;
    const Netlist cone = cone_of_influence(symbolic, std::span<const std::string>(&target, 1));
    for (const auto& s : report.sources)
      if (in_cone(cone, s)) report.cone.push_back(s);
  }
  return report;
}

}  // namespace seqeq
