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

#include "cabt/vtm.hpp"

#include <ostream>

#include "cabt/error.hpp"
#include "json_util.hpp"

namespace cabt {

using json_util::hex;

Vm::Vm(const TranslatedProgram& layout, DeviceRegistry& devices, RunLimits limits)
    : memory_map_(layout.memory_map),
      bus_map_(layout.bus_map),
      devices_(devices),
      limits_(limits),
      memory_(layout.memory_map, layout.sections) {
  if (layout.cache) cache_.emplace(*layout.cache);
}

void Vm::require_idle_sync(std::string_view what) const {
  if (sync_.pending != 0)
    throw Error(ErrorCode::kSyncProtocolViolation,
                std::string(what) + " while " + std::to_string(sync_.pending) +
                    " cycles are still being generated");
}

std::uint32_t Vm::bus_read(const std::string& device, std::uint32_t offset) {
  require_idle_sync("bus read");
  const std::uint32_t value = devices_.get(device).read(sync_.hwclock, offset);
  bus_trace_.push_back(BusEvent{sync_.hwclock, device, offset, BusDir::kRead, value});
  return value;
}

void Vm::bus_write(const std::string& device, std::uint32_t offset, std::uint32_t value) {
  require_idle_sync("bus write");
  devices_.get(device).write(sync_.hwclock, offset, value);
  bus_trace_.push_back(BusEvent{sync_.hwclock, device, offset, BusDir::kWrite, value});
}

// Per-op semantics. Transfer ops record the next block in `next`.
struct Vm::Exec {
  Vm& vm;
  const TranslatedProgram& prog;
  std::optional<BlockId> next;
  bool done = false;

  std::uint32_t reg(Reg r) const { return vm.regs_[r]; }
  std::uint32_t effective(Reg base, std::int32_t disp) const {
    return reg(base) + static_cast<std::uint32_t>(disp);
  }
  void verify(std::uint32_t actual, std::uint32_t expected) const {
    if (actual != expected)
      throw Error(ErrorCode::kInternal, "resolved address " + hex(expected) +
                                            " computed as " + hex(actual) + " at run time");
  }

  void operator()(const op::SyncStart& o) {
    vm.require_idle_sync("SYNC_START");
    vm.sync_.pending = o.cycles;
  }
  void operator()(const op::SyncWait&) {
    vm.sync_.hwclock += vm.sync_.pending;
    vm.breakdown_.static_cycles += vm.sync_.pending;
    vm.sync_.pending = 0;
  }
  void operator()(const op::CorrAdd& o) { vm.corr_branch_ += o.cycles; }
  void operator()(const op::CorrFlush&) {
    vm.sync_.hwclock += vm.corr_branch_ + vm.corr_cache_;
    vm.breakdown_.branch_correction += vm.corr_branch_;
    vm.breakdown_.cache_correction += vm.corr_cache_;
    vm.corr_branch_ = 0;
    vm.corr_cache_ = 0;
    vm.check_conservation();
  }
  void operator()(const op::CacheCheck& o) {
    if (!vm.cache_) throw Error(ErrorCode::kInternal, "CACHE_CHECK without a cache region");
    const CacheAccessResult r = cache_access(*vm.cache_, o.tag, o.index, vm.cache_->spec());
    vm.corr_cache_ += r.extra_cycles;
  }
  void operator()(const op::BrCheck& o) {
    const bool taken = branch_taken(o.cond, reg(o.lhs), reg(o.rhs));
    vm.corr_branch_ += taken ? o.taken_correction : o.not_taken_correction;
  }
  void operator()(const op::Nop&) {}
  void operator()(const op::Alu& o) { vm.set(o.dst, alu_eval(o.op, reg(o.lhs), reg(o.rhs))); }
  void operator()(const op::AluImm& o) {
    vm.set(o.dst, alu_eval(o.op, reg(o.src), static_cast<std::uint32_t>(o.imm)));
  }
  void operator()(const op::Movi& o) { vm.set(o.dst, o.value); }
  void operator()(const op::Load& o) {
    verify(effective(o.base, o.offset), o.src_addr);
    vm.set(o.dst, vm.memory_.read32(o.dst_addr));
  }
  void operator()(const op::Store& o) {
    verify(effective(o.base, o.offset), o.src_addr);
    vm.memory_.write32(o.dst_addr, reg(o.value));
  }
  void operator()(const op::BusRead& o) {
    verify(effective(o.base, o.disp), o.src_addr);
    vm.set(o.dst, vm.bus_read(o.device, o.offset));
  }
  void operator()(const op::BusWrite& o) {
    verify(effective(o.base, o.disp), o.src_addr);
    vm.bus_write(o.device, o.offset, reg(o.value));
  }
  void operator()(const op::AddrDispatch& o) {
    const std::uint32_t addr = effective(o.base, o.offset);
    const AddressClass cls = classify_address(vm.memory_map_, vm.bus_map_, addr);
    if (const auto* m = std::get_if<MemoryTarget>(&cls)) {
      if (o.store)
        vm.memory_.write32(m->dst_addr, reg(o.data));
      else
        vm.set(o.data, vm.memory_.read32(m->dst_addr));
    } else if (const auto* io = std::get_if<IoTarget>(&cls)) {
      if (o.store)
        vm.bus_write(io->device, io->offset, reg(o.data));
      else
        vm.set(o.data, vm.bus_read(io->device, io->offset));
    } else {
      throw Error(ErrorCode::kMemoryFault, "access to unmapped address " + hex(addr));
    }
  }
  void operator()(const op::Br& o) {
    next = branch_taken(o.cond, reg(o.lhs), reg(o.rhs)) ? o.taken : o.fallthrough;
    done = true;
  }
  void operator()(const op::Jmp& o) {
    next = o.target;
    done = true;
  }
  void operator()(const op::JmpInd& o) {
    const std::uint32_t addr = reg(o.src);
    auto it = prog.addr_map.find(addr);
    if (it == prog.addr_map.end())
      throw Error(ErrorCode::kBadIndirectTarget,
                  "indirect jump to " + hex(addr) + ", which is not a translated block");
    next = it->second;
    done = true;
  }
  void operator()(const op::DebugTrap&) {}
  void operator()(const op::Halt&) {
    vm.halted_ = true;
    done = true;
  }
};

std::optional<BlockId> Vm::execute_block(const TranslatedProgram& prog, BlockId id) {
  if (halted_) throw Error(ErrorCode::kAlreadyHalted, "machine has halted");
  if (id >= prog.blocks.size())
    throw Error(ErrorCode::kInternal, "block " + std::to_string(id) + " does not exist");
  const TranslatedBlock& block = prog.blocks[id];
  instructions_ += block.src_count;
  Exec exec{*this, prog, std::nullopt};
  for (const TargetOp& o : block.ops) {
    if (host_ops_ >= limits_.max_ops)
      throw Error(ErrorCode::kOpLimitExceeded,
                  "op limit of " + std::to_string(limits_.max_ops) + " reached");
    ++host_ops_;
    std::visit(exec, o);
    if (observer_) observer_(o, *this);
    if (exec.done) break;
  }
  if (!exec.done)
    throw Error(ErrorCode::kInternal, "block " + std::to_string(id) + " has no final transfer");
  return exec.next;
}

void Vm::check_conservation() const {
  if (sync_.hwclock != breakdown_.total())
    throw Error(ErrorCode::kInternal, "cycle ledger out of balance: hwclock " +
                                          std::to_string(sync_.hwclock) + " vs " +
                                          std::to_string(breakdown_.total()));
}

RunResult Vm::result() const {
  check_conservation();
  RunResult r;
  r.hwclock = sync_.hwclock;
  r.host_ops = host_ops_;
  r.instructions = instructions_;
  r.bus_trace = bus_trace_;
  r.registers = regs_;
  r.memory_digest = memory_.digest();
  r.breakdown = breakdown_;
  return r;
}

RunResult vm_run(const TranslatedProgram& prog, DeviceRegistry& devices, RunLimits limits) {
  for (const auto& block : prog.blocks) {
    for (const auto& o : block.ops) {
      if (const auto* rd = std::get_if<op::BusRead>(&o)) devices.get(rd->device);
      if (const auto* wr = std::get_if<op::BusWrite>(&o)) devices.get(wr->device);
    }
  }
  Vm vm(prog, devices, limits);
  std::optional<BlockId> next = prog.entry_block;
  while (next) next = vm.execute_block(prog, *next);
  return vm.result();
}

void write_bus_trace(std::ostream& out, const std::vector<BusEvent>& trace) {
  out << "hwclock,device,offset,rw,value\n";
  for (const auto& e : trace)
    out << e.hwclock << "," << e.device << "," << hex(e.offset) << ","
        << (e.dir == BusDir::kRead ? "r" : "w") << "," << hex(e.value) << "\n";
}

}  // namespace cabt
