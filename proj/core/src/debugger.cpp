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

#include "cabt/debugger.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "cabt/error.hpp"
#include "json_util.hpp"

namespace cabt {

using json_util::hex;

DebugSession::DebugSession(TranslatedProgram block_prog, TranslatedProgram instr_prog,
                           DeviceRegistry& devices, RunLimits limits)
    : block_prog_(std::move(block_prog)),
      instr_prog_(std::move(instr_prog)),
      vm_(block_prog_, devices, limits),
      pc_(block_prog_.blocks.at(block_prog_.entry_block).src_start) {
  if (block_prog_.variant != Variant::kBlockOriented ||
      instr_prog_.variant != Variant::kInstructionOriented || block_prog_.level != instr_prog_.level)
    throw Error(ErrorCode::kSemantic, "debug session needs both variants at one level");
}

std::optional<std::uint32_t> DebugSession::leader_of(std::uint32_t src_addr) const {
  if (!instr_prog_.addr_map.contains(src_addr)) return std::nullopt;
  auto it = block_prog_.addr_map.upper_bound(src_addr);
  if (it == block_prog_.addr_map.begin()) return std::nullopt;
  --it;
  const TranslatedBlock& b = block_prog_.blocks[it->second];
  if (src_addr >= b.src_end) return std::nullopt;
  return b.src_start;
}

std::uint32_t DebugSession::set_breakpoint(std::uint32_t src_addr) {
  const auto leader = leader_of(src_addr);
  if (!leader)
    throw Error(ErrorCode::kAddressOutOfRange, hex(src_addr) + " is not a translated instruction");
  breakpoints_.insert(*leader);
  stops_.insert(src_addr);
  if (src_addr != *leader) step_leaders_.insert(*leader);
  return *leader;
}

void DebugSession::run_block() {
  mode_ = DebugMode::kRunningBlock;
  const auto next = vm_.execute_block(block_prog_, block_prog_.addr_map.at(pc_));
  if (next) pc_ = block_prog_.blocks[*next].src_start;
}

void DebugSession::run_instruction() {
  mode_ = DebugMode::kSteppingInstr;
  const auto next = vm_.execute_block(instr_prog_, instr_prog_.addr_map.at(pc_));
  if (next) pc_ = instr_prog_.blocks[*next].src_start;
}

StopReason DebugSession::cont() {
  if (vm_.halted()) throw Error(ErrorCode::kAlreadyHalted, "program has halted");
  bool resuming = started_;
  started_ = true;
  try {
    while (!vm_.halted()) {
      if (!resuming && stops_.contains(pc_)) return {StopReason::Kind::kBreakpoint, pc_};
      resuming = false;
      // Inside a block, or in one holding a mid-block stop, go instruction
      // by instruction; whole blocks resume at the next leader.
      if (block_prog_.addr_map.contains(pc_) && !step_leaders_.contains(pc_))
        run_block();
      else
        run_instruction();
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kOpLimitExceeded) throw;
    return {StopReason::Kind::kOpLimit, pc_};
  }
  return {StopReason::Kind::kHalted, pc_};
}

std::uint32_t DebugSession::step() {
  if (vm_.halted()) throw Error(ErrorCode::kAlreadyHalted, "program has halted");
  started_ = true;
  run_instruction();
  return pc_;
}

std::vector<std::uint8_t> DebugSession::mem(std::uint32_t src_addr, std::uint32_t len) const {
  std::vector<std::uint8_t> out;
  out.reserve(len);
  for (std::uint64_t a = src_addr; a < std::uint64_t{src_addr} + len; ++a) {
    const auto addr = static_cast<std::uint32_t>(a);
    const AddressClass cls = classify_address(block_prog_.memory_map, block_prog_.bus_map, addr);
    const auto* m = std::get_if<MemoryTarget>(&cls);
    if (m == nullptr)
      throw Error(ErrorCode::kAddressOutOfRange, hex(addr) + " is not backed by memory");
    out.push_back(vm_.memory().read8(m->dst_addr));
  }
  return out;
}

DebugSession make_debug_session(const ProgramImage& image, const ProcessorDescription& desc,
                                DetailLevel level, DeviceRegistry& devices, RunLimits limits) {
  return DebugSession(translate_image(image, desc, level, Variant::kBlockOriented),
                      translate_image(image, desc, level, Variant::kInstructionOriented), devices,
                      limits);
}

namespace {

std::uint32_t parse_hex_arg(const std::string& s) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &used, 16);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || v > 0xffffffffUL)
    throw Error(ErrorCode::kSyntax, "bad address '" + s + "'");
  return static_cast<std::uint32_t>(v);
}

std::string format_regs(const RegisterFile& regs) {
  std::string out;
  char buf[16];
  for (unsigned r = 0; r < kRegisterCount; ++r) {
    std::snprintf(buf, sizeof buf, "%08x", regs[r]);
    if (r) out += ' ';
    out += "r" + std::to_string(r) + "=" + buf;
  }
  return out;
}

std::string format_stop(const StopReason& s) {
  switch (s.kind) {
    case StopReason::Kind::kBreakpoint: return "stopped breakpoint " + hex(s.addr);
    case StopReason::Kind::kHalted: return "halted";
    case StopReason::Kind::kOpLimit: return "op_limit";
  }
  return "halted";
}

}  // namespace

void serve(DebugSession& session, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string cmd;
    if (!(words >> cmd)) continue;
    try {
      if (cmd == "q") {
        out << "bye" << std::endl;
        return;
      } else if (cmd == "b") {
        std::string arg;
        if (!(words >> arg)) throw Error(ErrorCode::kSyntax, "usage: b <hexaddr>");
        const std::uint32_t addr = parse_hex_arg(arg);
        const std::uint32_t leader = session.set_breakpoint(addr);
        out << "breakpoint " << hex(leader);
        if (leader != addr) out << " step-to " << hex(addr);
        out << std::endl;
      } else if (cmd == "c") {
        out << format_stop(session.cont()) << std::endl;
      } else if (cmd == "s") {
        const std::uint32_t pc = session.step();
        out << (session.halted() ? "halted" : "stopped " + hex(pc)) << std::endl;
      } else if (cmd == "regs") {
        out << format_regs(session.regs()) << std::endl;
      } else if (cmd == "mem") {
        std::string addr_s;
        std::uint32_t len = 0;
        if (!(words >> addr_s >> len)) throw Error(ErrorCode::kSyntax, "usage: mem <hexaddr> <len>");
        const auto bytes = session.mem(parse_hex_arg(addr_s), len);
        std::string text = hex(parse_hex_arg(addr_s)) + ":";
        char buf[4];
        for (auto b : bytes) {
          std::snprintf(buf, sizeof buf, " %02x", b);
          text += buf;
        }
        out << text << std::endl;
      } else if (cmd == "cycles") {
        out << session.cycles() << std::endl;
      } else {
        out << "error unknown command '" << cmd << "'" << std::endl;
      }
    } catch (const Error& e) {
      out << "error " << e.what() << std::endl;
    }
  }
}

}  // namespace cabt
