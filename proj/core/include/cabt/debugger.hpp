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

//
// Source-level debugging over the dual translation. Continuing runs the
// block-oriented program; single steps and run-to-address inside a block use
// the instruction-oriented one. Both drive the same machine state.

#ifndef CABT_DEBUGGER_HPP_
#define CABT_DEBUGGER_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <vector>

#include "cabt/codegen.hpp"
#include "cabt/devices.hpp"
#include "cabt/vtm.hpp"

namespace cabt {

struct StopReason {
  enum class Kind : std::uint8_t { kBreakpoint, kHalted, kOpLimit };
  Kind kind = Kind::kHalted;
  std::uint32_t addr = 0;  // kBreakpoint
  bool operator==(const StopReason&) const = default;
};

enum class DebugMode : std::uint8_t { kRunningBlock, kSteppingInstr };

class DebugSession {
 public:
  // Both programs must come from one translation at one level.
  DebugSession(TranslatedProgram block_prog, TranslatedProgram instr_prog, DeviceRegistry& devices,
               RunLimits limits = {});

  // Returns the leader of the block containing `src_addr`. Throws
  // AddressOutOfRange outside the translated code.
  std::uint32_t set_breakpoint(std::uint32_t src_addr);
  const std::set<std::uint32_t>& breakpoints() const { return breakpoints_; }

  StopReason cont();
  // Executes one source instruction; returns the address of the next one
  // (the halting instruction's address once halted).
  std::uint32_t step();

  RegisterFile regs() const { return vm_.registers(); }
  // Source-address view of memory; throws AddressOutOfRange for addresses
  // that are not backed by memory.
  std::vector<std::uint8_t> mem(std::uint32_t src_addr, std::uint32_t len) const;
  std::uint64_t cycles() const { return vm_.hwclock(); }

  std::uint32_t pc() const { return pc_; }
  bool halted() const { return vm_.halted(); }
  DebugMode mode() const { return mode_; }
  const Vm& vm() const { return vm_; }

 private:
  std::optional<std::uint32_t> leader_of(std::uint32_t src_addr) const;
  void run_block();
  void run_instruction();

  TranslatedProgram block_prog_;
  TranslatedProgram instr_prog_;
  Vm vm_;
  std::uint32_t pc_;
  bool started_ = false;
  DebugMode mode_ = DebugMode::kRunningBlock;
  std::set<std::uint32_t> breakpoints_;   // normalized leaders
  std::set<std::uint32_t> stops_;         // exact addresses to stop at
  std::set<std::uint32_t> step_leaders_;  // leaders of blocks holding a mid-block stop
};

DebugSession make_debug_session(const ProgramImage& image, const ProcessorDescription& desc,
                                DetailLevel level, DeviceRegistry& devices, RunLimits limits = {});

// Line protocol: b <hex>, c, s, regs, mem <hex> <len>, cycles, q. One
// response line per command; failures answer "error <message>".
void serve(DebugSession& session, std::istream& in, std::ostream& out);

}  // namespace cabt

#endif  // CABT_DEBUGGER_HPP_
