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

#include "cabt/timing.hpp"

#include <algorithm>
#include <ostream>

#include "cabt/error.hpp"

namespace cabt {

std::uint64_t Scoreboard::earliest() const {
  if (!any_) return floor_;
  std::uint64_t slot;
  if (last_occupancy_ > 1) {
    slot = last_issue_ + last_occupancy_;
  } else {
    slot = used_in_cycle_ < width_ ? last_issue_ : last_issue_ + 1;
  }
  return std::max(slot, floor_);
}

std::uint64_t Scoreboard::issue(const TimingClass& tc, std::span<const Reg> srcs,
                                std::optional<Reg> dst) {
  std::uint64_t t = earliest();
  for (Reg r : srcs)
    if (r != 0) t = std::max(t, ready_[r]);
  if (any_ && t == last_issue_) {
    ++used_in_cycle_;
  } else {
    used_in_cycle_ = 1;
  }
  any_ = true;
  last_issue_ = t;
  last_occupancy_ = tc.issue_cycles;
  if (dst && *dst != 0) ready_[*dst] = t + tc.result_latency;
  return t;
}

std::uint64_t branch_cost(const ProcessorDescription& desc, const TimingClass& cls,
                          Direction dir, Outcome outcome) {
  const bool predicted_taken = dir == Direction::kBackward;
  const bool taken = outcome == Outcome::kTaken;
  std::uint64_t cost = cls.issue_cycles;
  if (taken) cost += desc.branch.taken_extra;
  if (predicted_taken != taken) cost += desc.branch.mispredict_penalty;
  return cost;
}

std::uint64_t branch_min(const ProcessorDescription& desc, const TimingClass& cls, Direction dir) {
  return std::min(branch_cost(desc, cls, dir, Outcome::kTaken),
                  branch_cost(desc, cls, dir, Outcome::kNotTaken));
}

std::uint64_t branch_correction(const ProcessorDescription& desc, const TimingClass& cls,
                                Direction dir, Outcome outcome) {
  return branch_cost(desc, cls, dir, outcome) - branch_min(desc, cls, dir);
}

namespace {

const TimingClass& branch_class(const ProcessorDescription& desc) {
  const TimingClass* tc = desc.pipeline.find("branch");
  if (tc == nullptr) throw Error(ErrorCode::kSemantic, "description has no 'branch' timing class");
  return *tc;
}

}  // namespace

std::uint64_t branch_cost(const ProcessorDescription& desc, Direction dir, Outcome outcome) {
  return branch_cost(desc, branch_class(desc), dir, outcome);
}

std::uint64_t branch_correction(const ProcessorDescription& desc, Direction dir, Outcome outcome) {
  return branch_correction(desc, branch_class(desc), dir, outcome);
}

BlockTiming scoreboard_cycles(const BasicBlock& block, const ProcessorDescription& desc) {
  Scoreboard sb(desc.pipeline.issue_width);
  std::uint64_t last_issue = 0;
  for (const auto& in : block.instrs)
    last_issue = sb.issue(desc.pipeline.timing_classes[in.timing_index], in.srcs.view(), in.dst);

  BlockTiming timing;
  timing.block = block.id;
  const IrInstruction& last = block.last();
  if (last.kind == IrKind::kBranch) {
    const TimingClass& cls = desc.pipeline.timing_classes[last.timing_index];
    timing.branch_min = branch_min(desc, cls, branch_direction(last.src_addr, last.target));
    timing.static_cycles = last_issue + timing.branch_min;
  } else {
    timing.static_cycles = sb.finish();
  }
  return timing;
}

std::vector<BlockTiming> time_blocks(std::vector<BasicBlock>& blocks,
                                     const ProcessorDescription& desc) {
  std::vector<BlockTiming> out;
  out.reserve(blocks.size());
  for (auto& b : blocks) {
    out.push_back(scoreboard_cycles(b, desc));
    b.static_cycles = out.back().static_cycles;
  }
  return out;
}

void dump_timing(std::ostream& out, const std::vector<BlockTiming>& timings) {
  out << "block,static_cycles,branch_min\n";
  for (const auto& t : timings)
    out << t.block << "," << t.static_cycles << "," << t.branch_min << "\n";
}

}  // namespace cabt
