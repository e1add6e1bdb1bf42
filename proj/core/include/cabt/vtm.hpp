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
// Virtual target machine: sequential executor of translated programs. The
// synchronization device is modeled as deferred accounting; cycles requested
// by SYNC_START reach the hardware clock at the matching SYNC_WAIT.

#ifndef CABT_VTM_HPP_
#define CABT_VTM_HPP_

#include <cstdint>
#include <functional>
#include <optional>

#include "cabt/cachemodel.hpp"
#include "cabt/codegen.hpp"
#include "cabt/devices.hpp"
#include "cabt/image.hpp"
#include "cabt/run.hpp"

namespace cabt {

struct SyncDevice {
  std::uint64_t pending = 0;
  std::uint64_t hwclock = 0;
};

class Vm {
 public:
  using Observer = std::function<void(const TargetOp&, const Vm&)>;

  // Memory, maps and cache geometry come from `layout`. Programs passed to
  // execute_block must share them, as the two variants of one translation do.
  Vm(const TranslatedProgram& layout, DeviceRegistry& devices, RunLimits limits = {});

  // Runs one block of `prog` through its final transfer. Returns the next
  // block of `prog`, or nullopt once the program halted.
  std::optional<BlockId> execute_block(const TranslatedProgram& prog, BlockId id);

  bool halted() const { return halted_; }
  std::uint64_t hwclock() const { return sync_.hwclock; }
  const SyncDevice& sync() const { return sync_; }
  std::uint64_t correction() const { return corr_branch_ + corr_cache_; }
  const RegisterFile& registers() const { return regs_; }
  const EmulatedMemory& memory() const { return memory_; }
  const CycleBreakdown& breakdown() const { return breakdown_; }
  const CacheState* cache() const { return cache_ ? &*cache_ : nullptr; }
  std::uint64_t host_ops() const { return host_ops_; }
  std::uint64_t instructions() const { return instructions_; }
  const std::vector<BusEvent>& bus_trace() const { return bus_trace_; }

  // Called after every executed op.
  void set_observer(Observer observer) { observer_ = std::move(observer); }

  // Throws Internal if the cycle ledger does not balance.
  void check_conservation() const;
  RunResult result() const;

 private:
  struct Exec;

  void set(Reg r, std::uint32_t v) {
    if (r != 0) regs_[r] = v;
  }
  std::uint32_t bus_read(const std::string& device, std::uint32_t offset);
  void bus_write(const std::string& device, std::uint32_t offset, std::uint32_t value);
  void require_idle_sync(std::string_view what) const;

  const MemoryMap memory_map_;
  const BusMap bus_map_;
  DeviceRegistry& devices_;
  RunLimits limits_;
  RegisterFile regs_{};
  EmulatedMemory memory_;
  SyncDevice sync_;
  std::uint64_t corr_branch_ = 0;
  std::uint64_t corr_cache_ = 0;
  std::optional<CacheState> cache_;
  CycleBreakdown breakdown_;
  std::uint64_t host_ops_ = 0;
  std::uint64_t instructions_ = 0;
  std::vector<BusEvent> bus_trace_;
  bool halted_ = false;
  Observer observer_;
};

// Runs `prog` from its entry block until HALT_T. Every device named by a bus
// op must be registered (UnknownDevice otherwise).
RunResult vm_run(const TranslatedProgram& prog, DeviceRegistry& devices, RunLimits limits = {});

}  // namespace cabt

#endif  // CABT_VTM_HPP_
