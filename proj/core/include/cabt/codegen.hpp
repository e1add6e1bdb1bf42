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
// Emission of the annotated program for the virtual target machine. Every
// translated block opens with a write to the synchronization device carrying
// its predicted cycle count and closes with a wait on it; higher detail levels
// add branch-outcome and instruction-cache correction code followed by a
// correction block that generates the extra cycles.

#ifndef CABT_CODEGEN_HPP_
#define CABT_CODEGEN_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cabt/image.hpp"
#include "cabt/ir.hpp"
#include "cabt/procdesc.hpp"
#include "cabt/timing.hpp"

namespace cabt {

enum class DetailLevel : std::uint8_t {
  kStatic = 1,         // static prediction only
  kBranch = 2,         // + branch outcome correction
  kBranchICache = 3,   // + instruction cache simulation
};

std::optional<DetailLevel> parse_level(int level);

enum class Variant : std::uint8_t { kBlockOriented, kInstructionOriented };

std::string_view to_string(Variant v);

using BlockId = std::uint32_t;

namespace op {

struct SyncStart {
  std::uint64_t cycles = 0;
  bool operator==(const SyncStart&) const = default;
};
struct SyncWait {
  bool operator==(const SyncWait&) const = default;
};
struct CorrAdd {
  std::uint64_t cycles = 0;
  bool operator==(const CorrAdd&) const = default;
};
struct CorrFlush {
  bool operator==(const CorrFlush&) const = default;
};
struct CacheCheck {
  std::uint32_t tag = 0;
  std::uint32_t index = 0;
  bool operator==(const CacheCheck&) const = default;
};
// Evaluates the branch condition and adds the outcome's correction.
struct BrCheck {
  BranchCond cond = BranchCond::kEq;
  Reg lhs = 0;
  Reg rhs = 0;
  std::uint32_t taken_correction = 0;
  std::uint32_t not_taken_correction = 0;
  bool operator==(const BrCheck&) const = default;
};
struct Nop {
  bool operator==(const Nop&) const = default;
};
struct Alu {
  AluOp op = AluOp::kAdd;
  Reg dst = 0;
  Reg lhs = 0;
  Reg rhs = 0;
  bool operator==(const Alu&) const = default;
};
struct AluImm {
  AluOp op = AluOp::kAdd;
  Reg dst = 0;
  Reg src = 0;
  std::int32_t imm = 0;
  bool operator==(const AluImm&) const = default;
};
struct Movi {
  Reg dst = 0;
  std::uint32_t value = 0;
  bool operator==(const Movi&) const = default;
};
// Statically resolved memory access: `src_addr` is the effective source
// address the analysis proved, `dst_addr` its remapped target address.
struct Load {
  Reg dst = 0;
  Reg base = 0;
  std::int32_t offset = 0;
  std::uint32_t src_addr = 0;
  std::uint32_t dst_addr = 0;
  bool operator==(const Load&) const = default;
};
struct Store {
  Reg value = 0;
  Reg base = 0;
  std::int32_t offset = 0;
  std::uint32_t src_addr = 0;
  std::uint32_t dst_addr = 0;
  bool operator==(const Store&) const = default;
};
struct BusRead {
  std::string device;
  std::uint32_t offset = 0;
  Reg dst = 0;
  Reg base = 0;
  std::int32_t disp = 0;
  std::uint32_t src_addr = 0;
  bool operator==(const BusRead&) const = default;
};
struct BusWrite {
  std::string device;
  std::uint32_t offset = 0;
  Reg value = 0;
  Reg base = 0;
  std::int32_t disp = 0;
  std::uint32_t src_addr = 0;
  bool operator==(const BusWrite&) const = default;
};
// Load/store whose address is classified at run time against the maps.
struct AddrDispatch {
  bool store = false;
  Reg data = 0;
  Reg base = 0;
  std::int32_t offset = 0;
  bool operator==(const AddrDispatch&) const = default;
};
struct Br {
  BranchCond cond = BranchCond::kEq;
  Reg lhs = 0;
  Reg rhs = 0;
  BlockId taken = 0;
  BlockId fallthrough = 0;
  bool operator==(const Br&) const = default;
};
struct Jmp {
  BlockId target = 0;
  bool operator==(const Jmp&) const = default;
};
// Register-indirect jump through the program's address map.
struct JmpInd {
  Reg src = 0;
  bool operator==(const JmpInd&) const = default;
};
struct DebugTrap {
  bool operator==(const DebugTrap&) const = default;
};
struct Halt {
  bool operator==(const Halt&) const = default;
};

}  // namespace op

using TargetOp =
    std::variant<op::SyncStart, op::SyncWait, op::CorrAdd, op::CorrFlush, op::CacheCheck,
                 op::BrCheck, op::Nop, op::Alu, op::AluImm, op::Movi, op::Load, op::Store,
                 op::BusRead, op::BusWrite, op::AddrDispatch, op::Br, op::Jmp, op::JmpInd,
                 op::DebugTrap, op::Halt>;

struct TranslatedBlock {
  BlockId id = 0;
  std::uint32_t src_start = 0;
  std::uint32_t src_end = 0;
  std::uint32_t src_count = 0;  // source instructions covered
  std::vector<TargetOp> ops;
  bool operator==(const TranslatedBlock&) const = default;
};

struct TranslatedProgram {
  static constexpr int kFormatVersion = 1;

  DetailLevel level = DetailLevel::kStatic;
  Variant variant = Variant::kBlockOriented;
  BlockId entry_block = 0;
  std::vector<TranslatedBlock> blocks;
  std::map<std::uint32_t, BlockId> addr_map;  // source address -> block
  std::array<Reg, kRegisterCount> reg_map{};  // source register -> target register
  std::optional<CacheSpec> cache;             // cache region descriptor, iff level 3
  MemoryMap memory_map;
  BusMap bus_map;
  std::vector<Section> sections;  // initial memory contents

  bool operator==(const TranslatedProgram&) const = default;
};

// Throws MissingCacheSpec for level 3 without an instruction cache. Successor
// edges name translated block ids directly.
TranslatedBlock annotate_block(const BasicBlock& block, const BlockTiming& timing,
                               DetailLevel level, const ProcessorDescription& desc);

// `blocks` must be timed, and carry CABs when level is 3.
TranslatedProgram emit_program(const std::vector<BasicBlock>& blocks,
                               const std::vector<BlockTiming>& timings, DetailLevel level,
                               const ProcessorDescription& desc, Variant variant,
                               const ProgramImage& image);

// Full pipeline: recover blocks, time them, partition CABs, emit.
TranslatedProgram translate_image(const ProgramImage& image, const ProcessorDescription& desc,
                                  DetailLevel level, Variant variant = Variant::kBlockOriented);

// Versioned JSON document; deterministic byte output.
std::string serialize_program(const TranslatedProgram& prog);
TranslatedProgram parse_program(std::string_view json_text);

std::string_view op_name(const TargetOp& op);

}  // namespace cabt

#endif  // CABT_CODEGEN_HPP_
