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
// Results shared by the virtual target machine and the reference simulator.

#ifndef CABT_RUN_HPP_
#define CABT_RUN_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cabt/procdesc.hpp"

namespace cabt {

inline constexpr std::uint64_t kDefaultMaxOps = 100'000'000;

struct RunLimits {
  std::uint64_t max_ops = kDefaultMaxOps;
};

enum class BusDir : std::uint8_t { kRead, kWrite };

struct BusEvent {
  std::uint64_t hwclock = 0;
  std::string device;
  std::uint32_t offset = 0;
  BusDir dir = BusDir::kRead;
  std::uint32_t value = 0;
  bool operator==(const BusEvent&) const = default;
};

struct CycleBreakdown {
  std::uint64_t static_cycles = 0;
  std::uint64_t branch_correction = 0;
  std::uint64_t cache_correction = 0;

  std::uint64_t total() const { return static_cycles + branch_correction + cache_correction; }
  bool operator==(const CycleBreakdown&) const = default;
};

using RegisterFile = std::array<std::uint32_t, kRegisterCount>;

struct RunResult {
  std::uint64_t hwclock = 0;
  std::uint64_t host_ops = 0;      // executed target ops; source instructions for the oracle
  std::uint64_t instructions = 0;  // executed source instructions
  std::vector<BusEvent> bus_trace;
  RegisterFile registers{};
  std::uint64_t memory_digest = 0;
  CycleBreakdown breakdown;
};

// CSV with header hwclock,device,offset,rw,value.
void write_bus_trace(std::ostream& out, const std::vector<BusEvent>& trace);

}  // namespace cabt

#endif  // CABT_RUN_HPP_
