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
// Intermediate representation: one IrInstruction per source instruction,
// grouped into basic blocks.

#ifndef CABT_IR_HPP_
#define CABT_IR_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cabt/procdesc.hpp"

namespace cabt {

enum class AluOp : std::uint8_t { kAdd, kSub, kMul, kAnd, kOr, kXor, kShl, kShr };
enum class BranchCond : std::uint8_t { kEq, kNe, kLt };

enum class IrKind : std::uint8_t {
  kAlu,
  kMovi,
  kLoad,
  kStore,
  kBranch,
  kJump,
  kCall,
  kJumpReg,
  kHalt,
  kNop,
};

std::string_view to_string(AluOp op);
std::string_view to_string(BranchCond cond);
std::string_view to_string(IrKind kind);

std::uint32_t alu_eval(AluOp op, std::uint32_t lhs, std::uint32_t rhs);
bool branch_taken(BranchCond cond, std::uint32_t lhs, std::uint32_t rhs);

// Up to two source registers, stored inline.
class RegList {
 public:
  RegList() = default;
  RegList(std::initializer_list<Reg> regs) {
    for (Reg r : regs) push_back(r);
  }

  void push_back(Reg r) { regs_[count_++] = r; }
  std::size_t size() const { return count_; }
  Reg operator[](std::size_t i) const { return regs_[i]; }
  std::span<const Reg> view() const { return {regs_.data(), count_}; }

  bool operator==(const RegList& o) const {
    return count_ == o.count_ && std::equal(regs_.begin(), regs_.begin() + count_, o.regs_.begin());
  }

 private:
  std::array<Reg, 2> regs_{};
  std::size_t count_ = 0;
};

// Static classification of a load/store effective address.
struct MemAccess {
  enum class Kind : std::uint8_t { kUnknown, kMemory, kIo };

  Kind kind = Kind::kUnknown;
  std::uint32_t src_addr = 0;  // statically known effective address
  std::uint32_t dst_addr = 0;  // kMemory: remapped target address
  std::string device;          // kIo
  std::uint32_t offset = 0;    // kIo: offset within the device window

  bool operator==(const MemAccess&) const = default;
};

struct IrInstruction {
  std::uint32_t src_addr = 0;
  IrKind kind = IrKind::kNop;
  AluOp alu = AluOp::kAdd;          // kAlu
  BranchCond cond = BranchCond::kEq;  // kBranch
  std::optional<Reg> dst;
  // kAlu: lhs[, rhs]; kLoad: base; kStore: base, value; kBranch: lhs, rhs;
  // kJumpReg: target register.
  RegList srcs;
  std::optional<std::int32_t> imm;  // immediate operand / displacement / MOVI value
  std::uint32_t target = 0;         // kBranch, kJump, kCall
  std::size_t timing_index = 0;     // into PipelineSpec::timing_classes
  std::optional<MemAccess> io_target;  // kLoad/kStore after analyze_bases

  bool is_control() const {
    return kind == IrKind::kBranch || kind == IrKind::kJump || kind == IrKind::kCall ||
           kind == IrKind::kJumpReg || kind == IrKind::kHalt;
  }
  bool is_memory() const { return kind == IrKind::kLoad || kind == IrKind::kStore; }
  // Loads/stores that must sit alone in a block: I/O or unresolved bases.
  bool needs_isolation() const {
    return is_memory() && io_target && io_target->kind != MemAccess::Kind::kMemory;
  }

  bool operator==(const IrInstruction&) const = default;
};

enum class EdgeKind : std::uint8_t { kFallthrough, kTaken, kCall, kReturnUnknown };

std::string_view to_string(EdgeKind kind);

struct Edge {
  std::size_t block = 0;
  EdgeKind kind = EdgeKind::kFallthrough;
  bool operator==(const Edge&) const = default;
};

// The part of a basic block lying in one instruction-cache line.
struct CacheAnalysisBlock {
  std::size_t block = 0;
  std::uint32_t tag = 0;
  std::uint32_t index = 0;
  std::size_t first = 0;  // instruction positions within the parent, inclusive
  std::size_t last = 0;
  bool operator==(const CacheAnalysisBlock&) const = default;
};

struct BasicBlock {
  std::size_t id = 0;
  std::uint32_t start = 0;
  std::uint32_t end = 0;  // exclusive
  std::vector<IrInstruction> instrs;
  std::vector<Edge> successors;
  std::uint64_t static_cycles = 0;        // filled by timing
  std::vector<CacheAnalysisBlock> cabs;   // filled by cachemodel

  const IrInstruction& last() const { return instrs.back(); }
  bool operator==(const BasicBlock&) const = default;
};

}  // namespace cabt

#endif  // CABT_IR_HPP_
