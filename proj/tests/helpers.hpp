#pragma once

#include <memory>
#include <string>

#include "seqeq/mapper.hpp"
#include "seqeq/snl.hpp"
#include "seqeq/task.hpp"

namespace seqeq::testing {

inline std::shared_ptr<const Netlist> design(const std::string& text, const std::string& top = "top",
                                             const snl::XPolicy& policy = {}) {
  return std::make_shared<const Netlist>(snl::elaborate(snl::parse(text), top, {}, policy));
}

/// Task with a by-name mapping between two sources.
inline EquivalenceTask named_task(const std::string& spec, const std::string& imp, const std::string& top = "top") {
  EquivalenceTask t;
  t.spec = design(spec, top);
  t.imp = design(imp, top);
  t.mapping = map_by_name(*t.spec, *t.imp);
  return t;
}

}  // namespace seqeq::testing
