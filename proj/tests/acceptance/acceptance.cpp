// Copyright 2026 The cabt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cabt/cachemodel.hpp"
#include "cabt/codegen.hpp"
#include "cabt/debugger.hpp"
#include "cabt/error.hpp"
#include "cabt/frontend.hpp"
#include "cabt/oracle.hpp"
#include "cabt/report.hpp"
#include "cabt/timing.hpp"
#include "cabt/vtm.hpp"
#include "test_support.hpp"

namespace cabt {
namespace {

namespace ref = testing::ref;

constexpr DetailLevel kLevels[] = {DetailLevel::kStatic, DetailLevel::kBranch,
                                   DetailLevel::kBranchICache};

struct Failure {
  std::string what;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure{what};
}

std::string level_name(DetailLevel l) { return "L" + std::to_string(static_cast<int>(l)); }

std::vector<std::string> all_fixtures() {
  std::vector<std::string> names = testing::benchmark_programs();
  names.push_back(testing::kIoFixture);
  return names;
}

// --- independent cycle ledger ------------------------------------------------

// Totals every run's cycles from the ops it executes, without looking at the
// VM's own counters: SYNC_START and CORR_ADD arguments, branch corrections
// recomputed from register values, and cache penalties from a brute-force
// LRU model.
struct LedgerStats {
  std::uint64_t runs = 0;
  std::uint64_t ops_checked = 0;
  std::vector<std::string> violations;
};

LedgerStats g_ledger;

bool taken(BranchCond cond, std::uint32_t a, std::uint32_t b) {
  switch (cond) {
    case BranchCond::kEq: return a == b;
    case BranchCond::kNe: return a != b;
    case BranchCond::kLt: return static_cast<std::int32_t>(a) < static_cast<std::int32_t>(b);
  }
  return false;
}

RunResult ledgered_run(const TranslatedProgram& prog, DeviceRegistry& devices, const std::string& label) {
  Vm vm(prog, devices);
  std::uint64_t ledger = 0;
  std::optional<testing::BruteLru> lru;
  if (prog.cache) lru.emplace(prog.cache->sets, prog.cache->ways);
  bool balanced = true;
  vm.set_observer([&](const TargetOp& o, const Vm& m) {
    if (const auto* s = std::get_if<op::SyncStart>(&o)) ledger += s->cycles;
    if (const auto* c = std::get_if<op::CorrAdd>(&o)) ledger += c->cycles;
    if (const auto* b = std::get_if<op::BrCheck>(&o)) {
      ledger += taken(b->cond, m.registers()[b->lhs], m.registers()[b->rhs]) ? b->taken_correction
                                                                              : b->not_taken_correction;
    }
    if (const auto* c = std::get_if<op::CacheCheck>(&o)) {
      if (!lru->access(c->tag, c->index)) ledger += prog.cache->miss_penalty;
    }
    // Cycles are either generated, pending in the sync device, or held in
    // the correction counter.
    if (m.hwclock() + m.sync().pending + m.correction() != ledger) balanced = false;
    ++g_ledger.ops_checked;
  });
  for (std::optional<BlockId> b = prog.entry_block; b;) b = vm.execute_block(prog, *b);
  const RunResult r = vm.result();
  ++g_ledger.runs;
  if (!balanced || r.hwclock != ledger) {
    g_ledger.violations.push_back(label + ": hwclock " + std::to_string(r.hwclock) + " ledger " +
                                  std::to_string(ledger));
  }
  return r;
}

RunResult vm_at(const ProgramImage& image, DetailLevel level, const DeviceKinds& kinds,
                const std::string& label, Variant variant = Variant::kBlockOriented) {
  const TranslatedProgram prog = translate_image(image, tk32_description(), level, variant);
  DeviceRegistry devices;
  register_bus_devices(devices, image.bus_map, kinds);
  return ledgered_run(prog, devices, label);
}

OracleResult oracle_at(const ProgramImage& image, const OracleConfig& cfg, const DeviceKinds& kinds,
                       bool trace = false) {
  DeviceRegistry devices;
  register_bus_devices(devices, image.bus_map, kinds);
  return reference_run(image, tk32_description(), cfg, devices, {}, trace);
}

// --- criteria -----------------------------------------------------------------

std::string matched_level() {
  int runs = 0;
  for (const auto& name : testing::benchmark_programs()) {
    const ProgramImage image = testing::load_program(name);
    for (DetailLevel level : kLevels) {
      const RunResult vm = vm_at(image, level, {}, name + "@" + level_name(level));
      const RunResult o = oracle_at(image, config_for_level(level), {}).run;
      require(vm.hwclock == o.hwclock, name + " " + level_name(level) + ": vtm " +
                                           std::to_string(vm.hwclock) + " oracle " +
                                           std::to_string(o.hwclock));
      ++runs;
    }
  }
  return std::to_string(runs) + " program/level pairs equal";
}

std::string functional_equivalence() {
  int runs = 0;
  for (const auto& name : testing::benchmark_programs()) {
    const ProgramImage image = testing::load_program(name);
    const RunResult cont = oracle_at(image, full_continuous_config(), {}).run;
    for (DetailLevel level : kLevels) {
      const RunResult vm = vm_at(image, level, {}, name + "@" + level_name(level));
      const RunResult o = oracle_at(image, config_for_level(level), {}).run;
      const std::string at = name + " " + level_name(level);
      require(vm.registers == o.registers, at + ": registers differ");
      require(vm.memory_digest == o.memory_digest, at + ": memory digest differs");
      require(vm.registers == cont.registers && vm.memory_digest == cont.memory_digest,
              at + ": differs from the continuous-pipeline oracle");
      ++runs;
    }
  }
  return std::to_string(runs) + " program/level pairs equal";
}

std::string cache_equivalence() {
  const CacheSpec configs[] = {{4, 1, 16, 10}, {16, 2, 16, 10}, {4, 4, 32, 10}};
  constexpr int kAccesses = 100000;
  std::mt19937_64 rng(1001);
  std::uint64_t hits = 0;
  for (const CacheSpec& cfg : configs) {
    CacheState st = init_cache_region(cfg);
    testing::BruteLru brute(cfg.sets, cfg.ways);
    std::uniform_int_distribution<std::uint32_t> tag(0, 2 * cfg.ways + 1);
    std::uniform_int_distribution<std::uint32_t> index(0, cfg.sets - 1);
    for (int n = 0; n < kAccesses; ++n) {
      const std::uint32_t t = tag(rng);
      const std::uint32_t i = index(rng);
      const CacheAccessResult r = cache_access(st, t, i, cfg);
      const bool want = brute.access(t, i);
      require(r.hit == want, "access " + std::to_string(n) + " disagrees");
      require(r.extra_cycles == (want ? 0 : cfg.miss_penalty), "wrong penalty");
      require(st.ages_consistent(), "ages are not a permutation");
      hits += want;
    }
    for (std::uint32_t s = 0; s < cfg.sets; ++s) {
      // Final state: resident tags in recency order.
      std::vector<std::pair<std::uint32_t, std::uint32_t>> by_age;
      for (std::uint32_t w = 0; w < cfg.ways; ++w) {
        const std::uint32_t word = st.tag_word(s, w);
        if (word & 1u) by_age.emplace_back(st.age(s, w), word >> 1);
      }
      std::sort(by_age.begin(), by_age.end());
      std::vector<std::uint32_t> got;
      for (const auto& p : by_age) got.push_back(p.second);
      const auto& lines = brute.set(s);
      require(got == std::vector<std::uint32_t>(lines.begin(), lines.end()), "final state differs");
    }
  }
  return "3 configs x " + std::to_string(kAccesses) + " accesses, " + std::to_string(hits) + " hits";
}

std::string scoreboard_equivalence() {
  std::mt19937_64 rng(1002);
  constexpr int kBlocks = 1000;
  for (int n = 0; n < kBlocks; ++n) {
    const ProcessorDescription desc = testing::random_timing_description(rng);
    const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 32)(rng);
    const ProgramImage image = testing::image_from_words(testing::random_straight_block(rng, len));
    const auto blocks = recover_blocks(image, desc);
    require(blocks.size() == 1, "block " + std::to_string(n) + " is not straight-line");
    DeviceRegistry devices;
    const std::uint64_t want =
        reference_run(image, desc, config_for_level(DetailLevel::kStatic), devices).run.hwclock;
    const std::uint64_t got = scoreboard_cycles(blocks[0], desc).static_cycles;
    require(got == want, "block " + std::to_string(n) + ": scoreboard " + std::to_string(got) +
                             " oracle " + std::to_string(want));
  }
  return std::to_string(kBlocks) + " random blocks equal";
}

std::string ledger_conservation() {
  // Every run of the other criteria already went through the ledger; add
  // both variants of every fixture and a batch of random programs.
  for (const auto& name : all_fixtures()) {
    const ProgramImage image = testing::load_program(name);
    for (DetailLevel level : kLevels)
      for (Variant v : {Variant::kBlockOriented, Variant::kInstructionOriented})
        vm_at(image, level, testing::program_devices(name), name, v);
  }
  std::mt19937_64 rng(1005);
  testing::RandomProgramOptions opt;
  opt.forward_only = true;
  for (int n = 0; n < 200; ++n) {
    const ProgramImage image = testing::image_from_words(testing::random_program(rng, opt));
    for (DetailLevel level : kLevels) vm_at(image, level, {}, "random#" + std::to_string(n));
  }
  require(g_ledger.violations.empty(), g_ledger.violations.empty() ? "" : g_ledger.violations.front());
  return std::to_string(g_ledger.runs) + " runs, " + std::to_string(g_ledger.ops_checked) +
         " ops balanced";
}

std::string cfg_partition() {
  std::mt19937_64 rng(1006);
  constexpr int kPrograms = 500;
  std::uint64_t blocks_seen = 0;
  for (int n = 0; n < kPrograms; ++n) {
    const auto words = testing::random_program(rng, {});
    const ProgramImage image = testing::image_from_words(words);
    const std::string at = "program " + std::to_string(n);
    auto cfg = build_cfg(decode_program(image, tk32_description()), image.entry);
    analyze_bases(cfg, image.memory_map, image.bus_map);
    const auto split = split_at_io(cfg);
    const auto leaders = testing::brute_leaders(words, 0, image.entry);
    const std::vector<BasicBlock>* views[] = {&cfg, &split};
    for (const std::vector<BasicBlock>* blocks : views) {
      std::uint32_t next = 0;
      std::set<std::uint32_t> starts;
      std::set<std::uint32_t> return_sites;
      for (const auto& b : *blocks)
        if (b.last().kind == IrKind::kCall) return_sites.insert(b.end);
      for (std::size_t i = 0; i < blocks->size(); ++i) {
        const BasicBlock& b = (*blocks)[i];
        require(b.start == next && !b.instrs.empty(), at + ": blocks do not tile the code");
        require(b.end == b.start + 4 * b.instrs.size(), at + ": block end mismatch");
        for (std::size_t k = 0; k + 1 < b.instrs.size(); ++k)
          require(!b.instrs[k].is_control(), at + ": control transfer inside a block");
        starts.insert(b.start);
        next = b.end;
      }
      require(next == 4 * words.size(), at + ": blocks do not cover the code");
      if (blocks == &cfg) require(starts == leaders, at + ": leader set differs from brute force");
      for (const auto& b : *blocks) {
        std::set<std::uint32_t> want;
        const IrInstruction& last = b.last();
        switch (last.kind) {
          case IrKind::kBranch: want = {last.target, b.end}; break;
          case IrKind::kJump: want = {last.target}; break;
          case IrKind::kCall: want = {last.target, b.end}; break;
          case IrKind::kJumpReg: want = return_sites; break;
          case IrKind::kHalt: break;
          default: want = {b.end}; break;
        }
        std::set<std::uint32_t> got;
        for (const Edge& e : b.successors) {
          require(e.block < blocks->size(), at + ": edge to a missing block");
          got.insert((*blocks)[e.block].start);
        }
        require(got == want, at + ": successors of block at " + std::to_string(b.start));
        for (std::uint32_t s : got) require(starts.count(s) == 1, at + ": edge target is not a leader");
        if (blocks == &split && b.instrs.size() > 1)
          for (const auto& in : b.instrs) require(!in.needs_isolation(), at + ": unisolated I/O");
      }
      blocks_seen += blocks->size();
    }
  }
  return std::to_string(kPrograms) + " programs, " + std::to_string(blocks_seen) + " blocks";
}

struct Session {
  Session(const ProgramImage& image, DetailLevel level, const DeviceKinds& kinds) {
    register_bus_devices(devices, image.bus_map, kinds);
    s.emplace(make_debug_session(image, tk32_description(), level, devices));
  }
  DeviceRegistry devices;
  std::optional<DebugSession> s;
};

// The instruction-oriented translation run alone, advanced to a given
// instruction count: the undisturbed reference for debug trajectories.
struct Undisturbed {
  Undisturbed(const ProgramImage& image, DetailLevel level, const DeviceKinds& kinds)
      : prog(translate_image(image, tk32_description(), level, Variant::kInstructionOriented)) {
    register_bus_devices(devices, image.bus_map, kinds);
    vm.emplace(prog, devices);
    next = prog.entry_block;
  }
  void advance_to(std::uint64_t count) {
    while (next && vm->instructions() < count) next = vm->execute_block(prog, *next);
  }
  TranslatedProgram prog;
  DeviceRegistry devices;
  std::optional<Vm> vm;
  std::optional<BlockId> next;
};

std::vector<std::pair<std::string, ProgramImage>> stall_free_fixtures() {
  std::vector<std::pair<std::string, ProgramImage>> out;
  out.emplace_back("gcd", testing::load_program("gcd"));
  out.emplace_back("countdown", testing::assemble_or_die(R"(
        li   r1, 12
        li   r2, 0
  loop: add  r2, r2, r1
        addi r1, r1, -1
        bne  r1, r0, loop
        blt  r2, r0, neg
        addi r3, r2, 1
  neg:  halt
  )"));
  std::mt19937_64 rng(1007);
  testing::RandomProgramOptions opt;
  opt.forward_only = true;
  opt.memory_ops = false;
  opt.mul_ops = false;
  for (int k = 0; k < 4; ++k)
    out.emplace_back("random#" + std::to_string(k), testing::image_from_words(testing::random_program(rng, opt)));
  return out;
}

std::string debug_consistency() {
  std::uint64_t comparisons = 0;
  for (const auto& [name, image] : stall_free_fixtures()) {
    require(testing::stall_free(image, tk32_description()), name + " is not stall-free");
    const std::size_t n_words = testing::text_words(image).size();
    for (DetailLevel level : kLevels) {
      const RunResult plain = vm_at(image, level, {}, name);
      Session whole(image, level, {});
      require(whole.s->cont().kind == StopReason::Kind::kHalted, name + ": cont did not halt");
      require(whole.s->cycles() == plain.hwclock, name + ": cont differs from vm_run");
      for (std::uint32_t stop = 0; stop < 4 * n_words; stop += 4) {
        Session by_cont(image, level, {});
        by_cont.s->set_breakpoint(stop);
        for (int hit = 0; hit < 3; ++hit) {
          if (by_cont.s->cont().kind != StopReason::Kind::kBreakpoint) break;
          Session by_step(image, level, {});
          while (by_step.s->vm().instructions() < by_cont.s->vm().instructions()) by_step.s->step();
          const std::string at = name + " " + level_name(level) + " stop " + std::to_string(stop);
          require(by_step.s->pc() == stop, at + ": stepping ended elsewhere");
          require(by_step.s->cycles() == by_cont.s->cycles(), at + ": hwclock differs");
          require(by_step.s->regs() == by_cont.s->regs(), at + ": registers differ");
          require(by_step.s->vm().memory().digest() == by_cont.s->vm().memory().digest(),
                  at + ": memory differs");
          by_step.s->vm().check_conservation();
          ++comparisons;
        }
        by_cont.s->vm().check_conservation();
      }
    }
  }
  std::mt19937_64 rng(1008);
  for (const auto& name : all_fixtures()) {
    const ProgramImage image = testing::load_program(name);
    const DeviceKinds kinds = testing::program_devices(name);
    const std::size_t n_words = testing::text_words(image).size();
    for (DetailLevel level : kLevels) {
      const RunResult plain = vm_at(image, level, kinds, name);
      for (int trial = 0; trial < 3; ++trial) {
        Session dbg(image, level, kinds);
        Undisturbed ref(image, level, kinds);
        for (int k = 0; k < 3; ++k)
          dbg.s->set_breakpoint(4 * std::uniform_int_distribution<std::uint32_t>(
                                        0, static_cast<std::uint32_t>(n_words - 1))(rng));
        while (!dbg.s->halted()) {
          if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) dbg.s->step();
          else dbg.s->cont();
          ref.advance_to(dbg.s->vm().instructions());
          const std::string at = name + " " + level_name(level);
          require(dbg.s->regs() == ref.vm->registers(), at + ": registers differ mid-trajectory");
          require(dbg.s->vm().memory().digest() == ref.vm->memory().digest(),
                  at + ": memory differs mid-trajectory");
          dbg.s->vm().check_conservation();
          ++comparisons;
        }
        require(dbg.s->regs() == plain.registers, name + ": final registers differ");
        require(dbg.s->vm().memory().digest() == plain.memory_digest, name + ": final memory differs");
      }
    }
  }
  return std::to_string(comparisons) + " stops compared";
}

std::string bus_timing() {
  const ProgramImage image = testing::load_program(testing::kIoFixture);
  const DeviceKinds kinds = testing::program_devices(testing::kIoFixture);
  const RunResult vm = vm_at(image, DetailLevel::kBranchICache, kinds, testing::kIoFixture);
  const RunResult o = oracle_at(image, config_for_level(DetailLevel::kBranchICache), kinds).run;
  require(!o.bus_trace.empty(), "fixture made no bus accesses");
  require(vm.bus_trace.size() == o.bus_trace.size(), "trace lengths differ");
  for (std::size_t i = 0; i < o.bus_trace.size(); ++i) {
    require(vm.bus_trace[i] == o.bus_trace[i],
            "transaction " + std::to_string(i) + ": vtm at " + std::to_string(vm.bus_trace[i].hwclock) +
                ", oracle at " + std::to_string(o.bus_trace[i].hwclock));
  }
  return std::to_string(o.bus_trace.size()) + " transactions at equal cycles";
}

std::string report_shape() {
  std::ostringstream detail;
  for (const auto& name : testing::benchmark_programs()) {
    const ProgramImage image = testing::load_program(name);
    const ReportRow row = compare_program(name, image, tk32_description());
    require(row.l3_flush_dev == 0.0, name + ": L3 deviates from the block-flush oracle");
    // Preconditions for the ordering: executed conditional branches and
    // at least one cache miss.
    const OracleResult o = oracle_at(image, config_for_level(DetailLevel::kBranchICache), {}, true);
    bool branches = false;
    for (const TraceEntry& t : o.trace) {
      const std::uint32_t op = t.word >> 26;
      branches = branches || op == ref::BEQ || op == ref::BNE || op == ref::BLT;
    }
    const bool misses = o.run.breakdown.cache_correction > 0 ||
                        vm_at(image, DetailLevel::kBranchICache, {}, name).breakdown.cache_correction > 0;
    if (branches && misses) {
      require(row.ops_per_instr(0) < row.ops_per_instr(1) && row.ops_per_instr(1) < row.ops_per_instr(2),
              name + ": host ops per instruction do not increase L1 < L2 < L3");
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s%s %.2f/%.2f/%.2f", detail.tellp() ? ", " : "", name.c_str(),
                  row.ops_per_instr(0), row.ops_per_instr(1), row.ops_per_instr(2));
    detail << buf;
  }
  return "ops/instr " + detail.str();
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no time limit
  std::function<std::string()> run;
};

}  // namespace
}  // namespace cabt

int main() {
  using namespace cabt;
  const Criterion criteria[] = {
      {1, "matched-level exactness", 10.0, matched_level},
      {2, "functional equivalence", 0, functional_equivalence},
      {3, "cache oracle equivalence", 5.0, cache_equivalence},
      {4, "scoreboard equivalence", 5.0, scoreboard_equivalence},
      {6, "cfg partition", 0, cfg_partition},
      {7, "debug consistency", 0, debug_consistency},
      {8, "bus timing", 0, bus_timing},
      {9, "deviation report shape", 0, report_shape},
      // Last, so that it covers the runs of every other criterion.
      {5, "ledger conservation", 0, ledger_conservation},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const Error& e) {
      ok = false;
      detail = e.what();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && c.limit_s > 0 && secs >= c.limit_s) {
      ok = false;
      detail += " but exceeded the time limit";
    }
    char timing[64];
    if (c.limit_s > 0) std::snprintf(timing, sizeof timing, "%.2fs, limit %.0fs", secs, c.limit_s);
    else std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::printf("%s criterion %d %s: %s (%s)\n", ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str(), timing);
    std::fflush(stdout);
    failed += !ok;
  }
  return failed == 0 ? 0 : 1;
}
