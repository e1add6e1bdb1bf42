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
// Static per-block cycle prediction: an in-order issue scoreboard with an
// empty pipeline at block entry, plus the BTFNT branch cost split into a
// statically billed minimum and a runtime correction.

#ifndef CABT_TIMING_HPP_
#define CABT_TIMING_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cabt/ir.hpp"
#include "cabt/procdesc.hpp"

namespace cabt {

// In-order issue model. An instruction issues at the earliest free issue
// slot at which all of its source registers are ready; a producer issued at
// t with result latency L makes its destination ready at t + L. An
// instruction with issue_cycles > 1 blocks the issue stage for that long.
class Scoreboard {
 public:
  explicit Scoreboard(std::uint32_t issue_width = 1) : width_(issue_width) {}

  std::uint64_t issue(const TimingClass& tc, std::span<const Reg> srcs, std::optional<Reg> dst);

  // Pushes the next issue slot back by `cycles` (stalls outside the model,
  // e.g. cache refills).
  void delay(std::uint64_t cycles) { floor_ = earliest() + cycles; }
  // The next instruction issues no earlier than `cycle`.
  void hold_until(std::uint64_t cycle) { floor_ = std::max(floor_, cycle); }

  // Cycle at which the last issued instruction leaves the issue stage.
  std::uint64_t finish() const { return any_ ? last_issue_ + last_occupancy_ : floor_; }
  std::uint64_t earliest() const;

  void reset() { *this = Scoreboard(width_); }

 private:
  std::uint32_t width_;
  std::array<std::uint64_t, kRegisterCount> ready_{};
  bool any_ = false;
  std::uint64_t last_issue_ = 0;
  std::uint32_t last_occupancy_ = 0;
  std::uint32_t used_in_cycle_ = 0;
  std::uint64_t floor_ = 0;
};

enum class Direction : std::uint8_t { kForward, kBackward };
enum class Outcome : std::uint8_t { kTaken, kNotTaken };

// A branch to itself or to a lower address is backward.
inline Direction branch_direction(std::uint32_t branch_addr, std::uint32_t target) {
  return target <= branch_addr ? Direction::kBackward : Direction::kForward;
}

// cost = issue_cycles + taken_extra (if taken) + mispredict_penalty (if the
// static BTFNT prediction was wrong).
std::uint64_t branch_cost(const ProcessorDescription& desc, const TimingClass& cls,
                          Direction dir, Outcome outcome);
std::uint64_t branch_min(const ProcessorDescription& desc, const TimingClass& cls, Direction dir);
// cost(outcome) - branch_min, never negative.
std::uint64_t branch_correction(const ProcessorDescription& desc, const TimingClass& cls,
                                Direction dir, Outcome outcome);

// Convenience overloads using the timing class named "branch".
std::uint64_t branch_cost(const ProcessorDescription& desc, Direction dir, Outcome outcome);
std::uint64_t branch_correction(const ProcessorDescription& desc, Direction dir, Outcome outcome);

struct BlockTiming {
  std::size_t block = 0;
  std::uint64_t static_cycles = 0;
  std::uint64_t branch_min = 0;  // 0 when the block does not end in a conditional branch
  bool operator==(const BlockTiming&) const = default;
};

BlockTiming scoreboard_cycles(const BasicBlock& block, const ProcessorDescription& desc);

// Times every block and stores static_cycles back into it.
std::vector<BlockTiming> time_blocks(std::vector<BasicBlock>& blocks,
                                     const ProcessorDescription& desc);

// CSV: block,static_cycles,branch_min
void dump_timing(std::ostream& out, const std::vector<BlockTiming>& timings);

}  // namespace cabt

#endif  // CABT_TIMING_HPP_
