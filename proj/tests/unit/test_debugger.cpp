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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cabt/debugger.hpp"
#include "cabt/error.hpp"
#include "cabt/vtm.hpp"
#include "test_support.hpp"

namespace cabt {
namespace {

struct Fixture {
  explicit Fixture(const ProgramImage& img, DetailLevel level = DetailLevel::kBranchICache,
                   const DeviceKinds& kinds = {})
      : image(img) {
    register_bus_devices(devices, image.bus_map, kinds);
    session.emplace(make_debug_session(image, tk32_description(), level, devices));
  }
  ProgramImage image;
  DeviceRegistry devices;
  std::optional<DebugSession> session;
};

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

TEST(Breakpoint, LeaderStoredAsIs) {
  Fixture f(testing::load_program("gcd"));
  EXPECT_EQ(f.session->set_breakpoint(0x38), 0x38u);
  EXPECT_EQ(f.session->breakpoints(), (std::set<std::uint32_t>{0x38}));
}

TEST(Breakpoint, MidBlockNormalizedToLeader) {
  Fixture f(testing::load_program("gcd"));
  EXPECT_EQ(f.session->set_breakpoint(0x24 + 8), 0x24u);
  EXPECT_EQ(f.session->cont(), (StopReason{StopReason::Kind::kBreakpoint, 0x2c}));
  EXPECT_EQ(f.session->pc(), 0x2cu);
  EXPECT_EQ(f.session->mode(), DebugMode::kSteppingInstr);
}

TEST(Breakpoint, OutsideImage) {
  Fixture f(testing::load_program("gcd"));
  EXPECT_EQ(error_of([&] { f.session->set_breakpoint(0x10000); }), ErrorCode::kAddressOutOfRange);
  EXPECT_EQ(error_of([&] { f.session->set_breakpoint(0x1000); }), ErrorCode::kAddressOutOfRange);
  EXPECT_EQ(error_of([&] { f.session->set_breakpoint(0x2); }), ErrorCode::kAddressOutOfRange);
}

TEST(Cont, RunsToHaltLikeVmRun) {
  const ProgramImage image = testing::load_program("gcd");
  ASSERT_TRUE(testing::stall_free(image, tk32_description()));
  Fixture f(image);
  EXPECT_EQ(f.session->cont().kind, StopReason::Kind::kHalted);
  const RunResult r = testing::run_vm(image, DetailLevel::kBranchICache);
  EXPECT_EQ(f.session->cycles(), r.hwclock);
  EXPECT_EQ(f.session->regs(), r.registers);
  EXPECT_EQ(f.session->vm().memory().digest(), r.memory_digest);
  EXPECT_EQ(error_of([&] { f.session->cont(); }), ErrorCode::kAlreadyHalted);
}

TEST(Cont, BreakpointAtEntryStopsFirst) {
  Fixture f(testing::load_program("gcd"));
  f.session->set_breakpoint(0x0);
  EXPECT_EQ(f.session->cont(), (StopReason{StopReason::Kind::kBreakpoint, 0x0}));
  EXPECT_EQ(f.session->cycles(), 0u);
  EXPECT_EQ(f.session->vm().instructions(), 0u);
}

TEST(Cont, BreakpointInDeadCodeRunsToHalt) {
  Fixture f(testing::assemble_or_die(R"(
        j end
        add r1, r1, r1
  end:  halt
  )"));
  f.session->set_breakpoint(0x4);
  EXPECT_EQ(f.session->cont().kind, StopReason::Kind::kHalted);
}

TEST(Cont, ReportsOpLimit) {
  const ProgramImage image = testing::assemble_or_die("loop: j loop\n");
  DeviceRegistry devices;
  DebugSession s = make_debug_session(image, tk32_description(), DetailLevel::kStatic, devices, RunLimits{100});
  EXPECT_EQ(s.cont().kind, StopReason::Kind::kOpLimit);
}

TEST(Step, NopCostsOneCycle) {
  Fixture f(testing::assemble_or_die("  nop\n  nop\n  halt\n"), DetailLevel::kStatic);
  EXPECT_EQ(f.session->step(), 0x4u);
  EXPECT_EQ(f.session->cycles(), 1u);
}

TEST(Step, TakenForwardBranchAtL2) {
  Fixture f(testing::assemble_or_die(R"(
        beq r0, r0, skip
        nop
  skip: halt
  )"), DetailLevel::kBranch);
  EXPECT_EQ(f.session->step(), 0x8u);
  EXPECT_EQ(f.session->cycles(), 5u);
}

TEST(Step, AtHaltIsAnError) {
  Fixture f(testing::assemble_or_die("  halt\n"), DetailLevel::kStatic);
  f.session->step();
  EXPECT_TRUE(f.session->halted());
  EXPECT_EQ(error_of([&] { f.session->step(); }), ErrorCode::kAlreadyHalted);
}

TEST(Inspect, RegsAfterLoadImmediate) {
  Fixture f(testing::assemble_or_die("  li r1, 7\n  halt\n"), DetailLevel::kStatic);
  f.session->step();
  EXPECT_EQ(f.session->regs()[1], 7u);
}

TEST(Inspect, CyclesAfterBlock) {
  // Four adds and an unconditional jump: five cycles of static prediction.
  Fixture f(testing::assemble_or_die(R"(
        add r1, r1, r1
        add r2, r2, r2
        add r3, r3, r3
        add r4, r4, r4
        j next
  next: halt
  )"), DetailLevel::kStatic);
  f.session->set_breakpoint(0x14);
  EXPECT_EQ(f.session->cont().kind, StopReason::Kind::kBreakpoint);
  EXPECT_EQ(f.session->cycles(), 5u);
}

TEST(Inspect, MemThroughRemappedRegion) {
  Fixture f(testing::assemble_or_die(R"(
        .memory 0x0 0x1000 0x0 RAM
        .memory 0x1000 0x2000 0x9000 RAM
        .text 0x0
        .data 0x1000
        .text
        halt
        .data
        .word 0xdeadbeef
  )"), DetailLevel::kStatic);
  EXPECT_EQ(f.session->mem(0x1000, 4), (std::vector<std::uint8_t>{0xef, 0xbe, 0xad, 0xde}));
  EXPECT_EQ(f.session->vm().memory().read32(0x9000), 0xdeadbeefu);
  EXPECT_EQ(error_of([&] { f.session->mem(0x3000, 1); }), ErrorCode::kAddressOutOfRange);
}

TEST(Serve, Transcript) {
  Fixture f(testing::load_program("gcd"));
  std::istringstream in("b 2c\nc\nregs\ns\ncycles\nmem 1000 4\nbogus\nb zz\nc\ns\nq\nc\n");
  std::ostringstream out;
  serve(*f.session, in, out);
  std::istringstream lines(out.str());
  std::vector<std::string> got;
  for (std::string l; std::getline(lines, l);) got.push_back(l);
  ASSERT_EQ(got.size(), 11u);
  EXPECT_EQ(got[0], "breakpoint 0x24 step-to 0x2c");
  EXPECT_EQ(got[1], "stopped breakpoint 0x2c");
  EXPECT_EQ(got[2].substr(0, 12), "r0=00000000 ");
  EXPECT_EQ(got[3], "stopped 0x30");
  EXPECT_FALSE(got[4].empty());
  EXPECT_EQ(got[4].find_first_not_of("0123456789"), std::string::npos) << got[4];
  EXPECT_EQ(got[5], "0x1000: 2f 04 00 00");
  EXPECT_EQ(got[6].substr(0, 6), "error ");
  EXPECT_EQ(got[7].substr(0, 6), "error ");
  EXPECT_EQ(got[8], "stopped breakpoint 0x2c");
  EXPECT_EQ(got[9], "stopped 0x30");
  EXPECT_EQ(got[10], "bye");
}

// Runs the instruction-oriented translation alone, one instruction per
// block, until it has executed `count` instructions.
struct Reference {
  Reference(const ProgramImage& image, DetailLevel level, const DeviceKinds& kinds)
      : prog(translate_image(image, tk32_description(), level, Variant::kInstructionOriented)) {
    register_bus_devices(devices, image.bus_map, kinds);
    vm.emplace(prog, devices);
    next = prog.entry_block;
  }
  void advance_to(std::uint64_t count) {
    while (next && vm->instructions() < count) next = vm->execute_block(prog, *next);
  }
  std::uint32_t pc() const { return next ? prog.blocks[*next].src_start : 0; }

  TranslatedProgram prog;
  DeviceRegistry devices;
  std::optional<Vm> vm;
  std::optional<BlockId> next;
};

TEST(DebugProperty, RandomTrajectoriesMatchUndisturbedRun) {
  std::mt19937_64 rng(79);
  std::vector<std::string> names = testing::benchmark_programs();
  names.push_back(testing::kIoFixture);
  for (const auto& name : names) {
    const ProgramImage image = testing::load_program(name);
    const DeviceKinds kinds = testing::program_devices(name);
    const auto words = testing::text_words(image);
    for (int trial = 0; trial < 4; ++trial) {
      Fixture f(image, DetailLevel::kBranchICache, kinds);
      Reference ref(image, DetailLevel::kBranchICache, kinds);
      for (int k = 0; k < 3; ++k) {
        const std::uint32_t addr = 4 * std::uniform_int_distribution<std::uint32_t>(
                                           0, static_cast<std::uint32_t>(words.size() - 1))(rng);
        f.session->set_breakpoint(addr);
      }
      while (!f.session->halted()) {
        if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
          f.session->step();
        } else {
          f.session->cont();
        }
        ref.advance_to(f.session->vm().instructions());
        ASSERT_EQ(f.session->regs(), ref.vm->registers()) << name;
        ASSERT_EQ(f.session->vm().memory().digest(), ref.vm->memory().digest()) << name;
        if (!f.session->halted()) ASSERT_EQ(f.session->pc(), ref.pc()) << name;
      }
    }
  }
}

TEST(DebugProperty, StepsEqualContinueOnStallFreeProgram) {
  const ProgramImage image = testing::load_program("gcd");
  ASSERT_TRUE(testing::stall_free(image, tk32_description()));
  for (DetailLevel level : {DetailLevel::kStatic, DetailLevel::kBranch, DetailLevel::kBranchICache}) {
    for (std::uint32_t stop = 0; stop < 0x54; stop += 4) {
      Fixture by_cont(image, level);
      by_cont.session->set_breakpoint(stop);
      for (int hit = 0; hit < 3; ++hit) {
        if (by_cont.session->cont().kind != StopReason::Kind::kBreakpoint) break;
        Fixture by_step(image, level);
        while (by_step.session->vm().instructions() < by_cont.session->vm().instructions())
          by_step.session->step();
        ASSERT_EQ(by_step.session->pc(), stop);
        ASSERT_EQ(by_step.session->cycles(), by_cont.session->cycles()) << std::hex << stop;
        ASSERT_EQ(by_step.session->regs(), by_cont.session->regs());
      }
    }
  }
}

}  // namespace
}  // namespace cabt
