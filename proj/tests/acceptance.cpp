// Acceptance suite: runs each end-to-end criterion and prints one
// PASS/FAIL line per criterion. Usage: acceptance [criterion numbers...]

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "seqeq/bench.hpp"
#include "seqeq/cec.hpp"
#include "seqeq/config.hpp"
#include "seqeq/sec.hpp"
#include "seqeq/sim.hpp"
#include "seqeq/xcheck.hpp"

using namespace seqeq;
using namespace seqeq::bench;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << "first failure: " << why << "; ";
    pass = false;
  }
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Scenario plain_scenario(const std::string& spec, const std::string& imp) {
  Scenario s;
  s.spec_source = spec;
  s.imp_source = imp;
  s.config = "[spec]\nfile = spec.snl\ntop = top\n[imp]\nfile = imp.snl\ntop = top\n";
  return s;
}

// The trace must re-simulate to a mismatch at exactly the reported cycle.
bool replays(const EquivalenceTask& t, const Verdict& v) {
  if (!v.trace || !v.mismatch_cycle) return false;
  ReplayResult r = replay(*t.spec, *t.imp, t.mapping, *v.trace);
  return r.mismatch_cycle == v.mismatch_cycle;
}

void oracle_soundness(Outcome& o) {
  OracleLimits limits;
  limits.max_states = size_t{1} << 22;
  limits.max_free_bits = 26;
  int agree = 0, equivalent = 0, not_equivalent = 0, unlabeled = 0;
  auto t0 = Clock::now();
  for (uint64_t seed = 0; seed < 200; ++seed) {
    RandomTask r = random_task(seed, 6, 10);
    EquivalenceTask t = scenario_task(plain_scenario(r.spec_source, r.imp_source));
    auto truth = oracle_check(t, limits);
    if (!truth) {
      ++unlabeled;
      o.fail("oracle limit on seed " + std::to_string(seed));
      continue;
    }
    Status got = check_sec(t).status;
    if (got == *truth) ++agree;
    else o.fail("seed " + std::to_string(seed) + ": engine " + to_string(got) + ", oracle " + to_string(*truth));
    (*truth == Status::Equivalent ? equivalent : not_equivalent)++;
  }
  double secs = since(t0);
  if (secs >= 600) o.fail("runtime " + std::to_string(secs) + " s");
  if (equivalent == 0 || not_equivalent == 0) o.fail("task mix is not mixed");
  o.detail << agree << "/200 agree (" << equivalent << " equivalent, " << not_equivalent << " not, " << unlabeled
           << " unlabeled), " << static_cast<int>(secs) << " s";
}

void retiming(Outcome& o) {
  int proven = 0, cec_rejects = 0;
  double worst = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Scenario s = generate(ScenarioKind::Retime, seed, {8, 4});
    auto t0 = Clock::now();
    Verdict v = run_task(scenario_config(s));
    double secs = since(t0);
    worst = std::max(worst, secs);
    if (v.status == Status::Equivalent && v.method == "k-induction" && secs < 10) ++proven;
    else o.fail("seed " + std::to_string(seed) + ": " + to_string(v.status) + " via " + v.method);
    try {
      check_cec(scenario_task(s));
      o.fail("CEC accepted seed " + std::to_string(seed));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::UnmappedState) ++cec_rejects;
      else o.fail(e.what());
    }
  }
  o.detail << proven << "/20 EQUIVALENT via k-induction (slowest " << worst << " s), CEC UnmappedState " << cec_rejects
           << "/20";
}

void latency(Outcome& o) {
  int ok = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Scenario s = generate(ScenarioKind::PipelineDelta, seed, {8, 4});
    TaskConfig with = scenario_config(s);
    Verdict a = run_task(with);
    TaskConfig without = with;
    without.mapping.latency = LatencyPair{0, 0};
    without.mapping.output_latency.clear();
    Verdict b = run_task(without);
    bool good = a.status == Status::Equivalent && b.status == Status::NotEquivalent && replays(build_task(without), b);
    if (good) ++ok;
    else o.fail("seed " + std::to_string(seed) + ": with " + to_string(a.status) + ", without " + to_string(b.status));
  }
  o.detail << ok << "/20 (EQUIVALENT with latency, replayable NOT_EQUIVALENT without)";
}

void chicken_bit(Outcome& o) {
  int ok = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Scenario s = generate(ScenarioKind::ChickenBit, seed, {8, 4});
    TaskConfig cfg = scenario_config(s);
    Verdict with = run_task(cfg);
    TaskConfig open = cfg;
    open.constraints.clear();
    Verdict without = run_task(open);
    bool chicken_set = false;
    if (without.trace)
      for (const auto& cyc : without.trace->inputs) {
        auto it = cyc.find("imp:chicken");
        chicken_set |= it != cyc.end() && it->second == Tri::One;
      }
    TaskConfig contradictory = cfg;
    contradictory.constraints = {"chicken == 1'b0 && chicken == 1'b1"};
    Verdict vac = run_task(contradictory);
    bool good = with.status == Status::Equivalent && without.status == Status::NotEquivalent && chicken_set &&
                replays(build_task(open), without) && vac.status == Status::Vacuous;
    if (good) ++ok;
    else
      o.fail("seed " + std::to_string(seed) + ": constrained " + to_string(with.status) + ", open " +
             to_string(without.status) + (chicken_set ? "" : " (no chicken=1)") + ", contradictory " +
             to_string(vac.status));
  }
  o.detail << ok << "/10 (EQUIVALENT constrained, chicken=1 counterexample open, VACUOUS contradictory)";
}

void clock_gating(Outcome& o) {
  int ok = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Verdict good = run_task(scenario_config(generate(ScenarioKind::ClockGate, seed, {8, 4})));
    Scenario f = generate_faulty(ScenarioKind::ClockGate, seed, {8, 4});
    Verdict bad = run_task(scenario_config(f));
    if (good.status == Status::Equivalent && bad.status == Status::NotEquivalent && replays(scenario_task(f), bad))
      ++ok;
    else o.fail("seed " + std::to_string(seed) + ": " + to_string(good.status) + "/" + to_string(bad.status));
  }
  o.detail << ok << "/20 (gated EQUIVALENT under qualifier, corrupted gate NOT_EQUIVALENT)";
}

XCheckReport xrun(const std::string& text, XCheckPolicy policy) {
  XCheckOptions opt;
  opt.mode = XCheckMode::UninitFlops;
  opt.policy = policy;
  return check_x(snl::parse(text), "top", opt);
}

void x_checks(Outcome& o) {
  int leaks = 0, masked = 0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Scenario clean = generate(ScenarioKind::XUninit, seed, {8, 4});
    Scenario leak = generate_faulty(ScenarioKind::XUninit, seed, {8, 4});
    if (xrun(leak.imp_source, XCheckPolicy::ZeroOne).verdict.status == Status::NotEquivalent) ++leaks;
    else o.fail("leak missed on seed " + std::to_string(seed));
    if (xrun(clean.imp_source, XCheckPolicy::ZeroOne).clean) ++masked;
    else o.fail("masked X reported on seed " + std::to_string(seed));
  }
  const char* xor_pair =
      "module top(input a, output y);\n  reg r1 init uninit;\n  reg r2 init uninit;\n  always r1 <= r1;\n"
      "  always r2 <= r2;\n  assign y = r1 ^ r2;\nendmodule\n";
  bool missed_by_01 = xrun(xor_pair, XCheckPolicy::ZeroOne).clean;
  bool caught_symbolic = !xrun(xor_pair, XCheckPolicy::Symbolic).clean;
  if (!missed_by_01) o.fail("0/1 policy unexpectedly caught the XOR pair");
  if (!caught_symbolic) o.fail("symbolic policy missed the XOR pair");
  o.detail << "leaks " << leaks << "/5, masked clean " << masked << "/5, XOR pair: 0/1 "
           << (missed_by_01 ? "misses" : "catches") << ", symbolic " << (caught_symbolic ? "catches" : "misses");
}

void mutation_detection(Outcome& o) {
  int labeled = 0, detected = 0, replayed = 0, equivalent_mutants = 0;
  for (uint64_t alu = 1; labeled < 100 && alu <= 20; ++alu) {
    Scenario base = generate(ScenarioKind::OpcodeBuckets, alu, {4, 2});
    for (uint64_t seed = 0; labeled < 100 && seed < 40; ++seed) {
      LabeledMutant m = mutate_scenario(base, seed);
      if (!m.mutation.equivalent) continue;
      if (*m.mutation.equivalent) {
        ++equivalent_mutants;
        continue;
      }
      ++labeled;
      Verdict v = run_task(scenario_config(m.scenario));
      std::string where = "alu " + std::to_string(alu) + " mutant " + std::to_string(seed) + " (" +
                          m.mutation.before + " -> " + m.mutation.after + ")";
      if (v.status != Status::NotEquivalent) {
        o.fail(where + " gave " + to_string(v.status));
        continue;
      }
      ++detected;
      if (replays(scenario_task(m.scenario), v)) ++replayed;
      else o.fail(where + " trace does not replay to cycle " + std::to_string(v.mismatch_cycle.value_or(0)));
    }
  }
  if (labeled < 100) o.fail("only " + std::to_string(labeled) + " labeled non-equivalent mutants");
  o.detail << "detected " << detected << "/" << labeled << ", replayed " << replayed << "/" << detected << " ("
           << equivalent_mutants << " equivalent mutants excluded)";
}

bool flips(Status a, Status b) {
  return (a == Status::Equivalent && b == Status::NotEquivalent) ||
         (a == Status::NotEquivalent && b == Status::Equivalent);
}

void transparency(Outcome& o) {
  int runs = 0, tasks = 0;
  for (ScenarioKind k : all_kinds()) {
    for (uint64_t seed = 1; seed <= 3; ++seed) {
      for (bool faulty : {false, true}) {
        Scenario s = faulty ? generate_faulty(k, seed, {4, 3}) : generate(k, seed, {4, 3});
        TaskConfig base = scenario_config(s);
        Status ref = run_task(base).status;
        ++tasks;
        std::string tag = std::string(to_string(k)) + (faulty ? " faulty" : "") + " seed " + std::to_string(seed);
        std::vector<std::pair<std::string, TaskConfig>> variants;
        TaskConfig v = base;
        v.engine.refine = !base.engine.refine;
        variants.emplace_back("refine toggled", v);
        if (base.mode == TaskMode::Sec) {
          v = base;
          v.helpers = s.register_truth;
          variants.emplace_back("helpers", v);
          EquivalenceTask t = scenario_task(s);
          if (base.cases.empty() && !t.spec->inputs().empty()) {
            const std::string& bit = t.spec->inputs().front().name;
            v = base;
            v.cases = {{"zero", bit + " == 1'b0"}, {"one", bit + " == 1'b1"}};
            variants.emplace_back("case split on " + bit, v);
          } else if (!base.cases.empty()) {
            v = base;
            v.cases.clear();
            variants.emplace_back("cases removed", v);
          }
          if (k == ScenarioKind::ParamDefault) {
            v = base;
            v.spec.blackbox = v.imp.blackbox = {"k0"};
            variants.emplace_back("black-box k0", v);
          }
        }
        for (const auto& [name, cfg] : variants) {
          ++runs;
          Status got = run_task(cfg).status;
          if (flips(ref, got)) o.fail(tag + " " + name + ": " + to_string(ref) + " -> " + to_string(got));
        }
      }
    }
  }
  Verdict without = run_task(scenario_config(helper_pipeline(false)));
  Verdict with = run_task(scenario_config(helper_pipeline(true)));
  bool pattern = without.status == Status::Inconclusive && with.status == Status::Equivalent;
  if (!pattern) o.fail(std::string("helper pipeline ") + to_string(without.status) + " / " + to_string(with.status));
  o.detail << runs << " technique variants over " << tasks << " tasks without a flip; helper pipeline at k_max=5: "
           << to_string(without.status) << " without helpers, " << to_string(with.status) << " with";
}

void case_completeness(Outcome& o) {
  Scenario alu = generate(ScenarioKind::OpcodeBuckets, 1, {4, 2});
  EquivalenceTask t = scenario_task(alu);
  t.cases = {{"low", "op < 4'd8"}, {"high", "op > 4'd8"}};
  std::string witness;
  try {
    check_sec(t);
    o.fail("incomplete split accepted");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::IncompleteSplit) o.fail(e.what());
    witness = e.detail();
  }
  if (witness.find("op") == std::string::npos) o.fail("witness does not name op: " + witness);
  int same = 0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    for (bool faulty : {false, true}) {
      Scenario s = faulty ? generate_faulty(ScenarioKind::OpcodeBuckets, seed, {4, 2})
                          : generate(ScenarioKind::OpcodeBuckets, seed, {4, 2});
      TaskConfig split = scenario_config(s);
      TaskConfig mono = split;
      mono.cases.clear();
      Verdict a = run_task(split), b = run_task(mono);
      if (split.cases.empty()) o.fail("scenario has no split");
      if (a.status == b.status) ++same;
      else o.fail("seed " + std::to_string(seed) + ": split " + to_string(a.status) + ", monolithic " + to_string(b.status));
    }
  }
  o.detail << "op<8/op>8 -> IncompleteSplit (" << witness << "); complete split = monolithic on " << same << "/10";
}

void scale(Outcome& o) {
  auto t0 = Clock::now();
  Scenario s = generate(ScenarioKind::Retime, 1, {16, 16});
  EquivalenceTask t = scenario_task(s);
  Verdict v = run_task(scenario_config(s));
  double secs = since(t0);
  size_t regs = std::min(t.spec->registers().size(), t.imp->registers().size());
  if (regs < 256) o.fail("only " + std::to_string(regs) + " registers per side");
  if (v.status != Status::Equivalent) o.fail(std::string("verdict ") + to_string(v.status));
  if (secs >= 300) o.fail("took " + std::to_string(secs) + " s");
  o.detail << to_string(v.status) << " via " << v.method << " with " << t.spec->registers().size() << "/"
           << t.imp->registers().size() << " registers in " << secs << " s (oracle: " << s.oracle << ")";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"oracle soundness", oracle_soundness},
      {"retiming", retiming},
      {"latency handling", latency},
      {"chicken bit", chicken_bit},
      {"clock gating", clock_gating},
      {"X checks", x_checks},
      {"mutation detection", mutation_detection},
      {"technique transparency", transparency},
      {"case-split completeness", case_completeness},
      {"scale smoke test", scale},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    Outcome o;
    auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first.c_str(),
                o.detail.str().c_str(), since(t0));
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
