#pragma once

#include <map>
#include <string>
#include <vector>

#include "seqeq/snl.hpp"
#include "seqeq/task.hpp"

namespace seqeq {

enum class XCheckMode { UninitFlops, XSources, Both };
enum class XCheckPolicy { ZeroOne, Symbolic };

const char* to_string(XCheckMode mode);
const char* to_string(XCheckPolicy policy);
std::optional<XCheckMode> parse_xcheck_mode(const std::string& text);     // uninit|xsrc|both
std::optional<XCheckPolicy> parse_xcheck_policy(const std::string& text);  // 01|symbolic

struct XCheckReport {
  XCheckMode mode = XCheckMode::UninitFlops;
  XCheckPolicy policy = XCheckPolicy::ZeroOne;
  std::string policy_pair;  // e.g. "X_TO_ZERO/X_TO_ONE"
  Verdict verdict;
  bool clean = false;
  std::vector<snl::XSource> sources;  // selected X sources of the design
  std::vector<snl::XSource> cone;     // selected sources feeding the mismatching output
  std::vector<std::string> notes;
};

struct XCheckOptions {
  XCheckMode mode = XCheckMode::UninitFlops;
  XCheckPolicy policy = XCheckPolicy::ZeroOne;
  std::vector<std::string> constraints;
  std::map<std::string, int64_t> params;
  EngineConfig engine;
};

/// The two elaboration policies a mode and policy select.
std::pair<snl::XPolicy, snl::XPolicy> xcheck_policies(const XCheckOptions& options);

/// The self-equivalence task check_x runs: SPEC and IMP are the same design
/// under the two policies, mapped by name.
EquivalenceTask xcheck_task(const std::vector<snl::SourceModule>& modules, const std::string& top,
                            const XCheckOptions& options);

/// Self-equivalence of one design elaborated under two X policies. Classes
/// not selected by the mode are pinned to 0 on both sides.
XCheckReport check_x(const std::vector<snl::SourceModule>& modules, const std::string& top,
                     const XCheckOptions& options);

}  // namespace seqeq
