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

#include "cabt/codegen.hpp"

#include "cabt/cachemodel.hpp"
#include "cabt/error.hpp"
#include "cabt/frontend.hpp"
#include "json_util.hpp"

namespace cabt {

std::optional<DetailLevel> parse_level(int level) {
  if (level < 1 || level > 3) return std::nullopt;
  return static_cast<DetailLevel>(level);
}

std::string_view to_string(Variant v) {
  return v == Variant::kBlockOriented ? "block_oriented" : "instruction_oriented";
}

std::string_view op_name(const TargetOp& op) {
  static constexpr std::string_view kNames[] = {
      "SYNC_START", "SYNC_WAIT", "CORR_ADD", "CORR_FLUSH", "CACHE_CHECK",
      "BR_CHECK",   "NOP",       "ALU",      "ALU_IMM",    "MOVI",
      "LOAD",       "STORE",     "BUS_RD",   "BUS_WR",     "ADDR_DISPATCH",
      "BR",         "JMP",       "JMP_IND",  "DEBUG_TRAP", "HALT_T"};
  static_assert(std::size(kNames) == std::variant_size_v<TargetOp>);
  return kNames[op.index()];
}

namespace {

std::size_t successor(const BasicBlock& block, EdgeKind kind) {
  for (const Edge& e : block.successors)
    if (e.kind == kind) return e.block;
  throw Error(ErrorCode::kInternal, "block " + std::to_string(block.id) + " lacks a " +
                                        std::string(to_string(kind)) + " edge");
}

BlockId as_id(std::size_t block) { return static_cast<BlockId>(block); }

// Body op for loads and stores, or nullopt when the access must run after
// the block's cycle generation has finished.
std::optional<TargetOp> memory_op(const IrInstruction& in) {
  const bool store = in.kind == IrKind::kStore;
  const Reg base = in.srcs[0];
  const Reg data = store ? in.srcs[1] : *in.dst;
  const std::int32_t disp = in.imm.value_or(0);
  if (in.io_target && in.io_target->kind == MemAccess::Kind::kMemory) {
    const MemAccess& m = *in.io_target;
    if (store) return op::Store{data, base, disp, m.src_addr, m.dst_addr};
    return op::Load{data, base, disp, m.src_addr, m.dst_addr};
  }
  if (!in.needs_isolation()) return op::AddrDispatch{store, data, base, disp};
  return std::nullopt;
}

TargetOp deferred_memory_op(const IrInstruction& in) {
  const bool store = in.kind == IrKind::kStore;
  const Reg base = in.srcs[0];
  const Reg data = store ? in.srcs[1] : *in.dst;
  const std::int32_t disp = in.imm.value_or(0);
  if (in.io_target && in.io_target->kind == MemAccess::Kind::kIo) {
    const MemAccess& m = *in.io_target;
    if (store) return op::BusWrite{m.device, m.offset, data, base, disp, m.src_addr};
    return op::BusRead{m.device, m.offset, data, base, disp, m.src_addr};
  }
  return op::AddrDispatch{store, data, base, disp};
}

void emit_body(const IrInstruction& in, std::vector<TargetOp>& ops) {
  switch (in.kind) {
    case IrKind::kNop:
      ops.push_back(op::Nop{});
      break;
    case IrKind::kAlu:
      if (in.imm)
        ops.push_back(op::AluImm{in.alu, *in.dst, in.srcs[0], *in.imm});
      else
        ops.push_back(op::Alu{in.alu, *in.dst, in.srcs[0], in.srcs[1]});
      break;
    case IrKind::kMovi:
      ops.push_back(op::Movi{*in.dst, static_cast<std::uint32_t>(*in.imm)});
      break;
    case IrKind::kLoad:
    case IrKind::kStore:
      if (auto m = memory_op(in)) ops.push_back(std::move(*m));
      break;
    case IrKind::kCall:
      ops.push_back(op::Movi{kLinkRegister, in.src_addr + 4});
      break;
    default:
      break;
  }
}

TranslatedBlock annotate(const BasicBlock& block, const BlockTiming& timing, DetailLevel level,
                         const ProcessorDescription& desc, bool debug_trap) {
  if (block.instrs.empty()) throw Error(ErrorCode::kInternal, "empty basic block");
  std::vector<CacheAnalysisBlock> cabs;
  if (level == DetailLevel::kBranchICache) {
    if (!desc.icache)
      throw Error(ErrorCode::kMissingCacheSpec,
                  "detail level 3 needs an instruction cache in the description");
    cabs = block.cabs.empty() ? partition_cabs(block, *desc.icache) : block.cabs;
  }

  TranslatedBlock out;
  out.id = as_id(block.id);
  out.src_start = block.start;
  out.src_end = block.end;
  out.src_count = static_cast<std::uint32_t>(block.instrs.size());
  auto& ops = out.ops;
  ops.push_back(op::SyncStart{timing.static_cycles});

  std::optional<TargetOp> deferred;
  std::size_t next_cab = 0;
  for (std::size_t i = 0; i < block.instrs.size(); ++i) {
    if (next_cab < cabs.size() && cabs[next_cab].first == i) {
      ops.push_back(op::CacheCheck{cabs[next_cab].tag, cabs[next_cab].index});
      ++next_cab;
    }
    const IrInstruction& in = block.instrs[i];
    if (in.is_memory() && !memory_op(in)) {
      if (block.instrs.size() != 1)
        throw Error(ErrorCode::kInternal, "unresolved memory access at " + json_util::hex(in.src_addr) +
                                              " shares its block");
      deferred = deferred_memory_op(in);
    }
    emit_body(in, ops);
  }

  const IrInstruction& last = block.last();
  const bool corrections = level != DetailLevel::kStatic;
  if (corrections && last.kind == IrKind::kBranch) {
    const TimingClass& cls = desc.pipeline.timing_classes[last.timing_index];
    const Direction dir = branch_direction(last.src_addr, last.target);
    ops.push_back(op::BrCheck{
        last.cond, last.srcs[0], last.srcs[1],
        static_cast<std::uint32_t>(branch_correction(desc, cls, dir, Outcome::kTaken)),
        static_cast<std::uint32_t>(branch_correction(desc, cls, dir, Outcome::kNotTaken))});
  }
  ops.push_back(op::SyncWait{});
  if (corrections) ops.push_back(op::CorrFlush{});
  if (deferred) ops.push_back(std::move(*deferred));
  if (debug_trap) ops.push_back(op::DebugTrap{});

  switch (last.kind) {
    case IrKind::kBranch:
      ops.push_back(op::Br{last.cond, last.srcs[0], last.srcs[1],
                           as_id(successor(block, EdgeKind::kTaken)),
                           as_id(successor(block, EdgeKind::kFallthrough))});
      break;
    case IrKind::kJump:
      ops.push_back(op::Jmp{as_id(successor(block, EdgeKind::kTaken))});
      break;
    case IrKind::kCall:
      ops.push_back(op::Jmp{as_id(successor(block, EdgeKind::kCall))});
      break;
    case IrKind::kJumpReg:
      ops.push_back(op::JmpInd{last.srcs[0]});
      break;
    case IrKind::kHalt:
      ops.push_back(op::Halt{});
      break;
    default:
      ops.push_back(op::Jmp{as_id(successor(block, EdgeKind::kFallthrough))});
      break;
  }
  return out;
}

// Splits every block into one-instruction blocks numbered by instruction
// position; edges out of a block's last instruction are renumbered.
std::vector<BasicBlock> split_instructions(const std::vector<BasicBlock>& blocks) {
  std::vector<std::size_t> first(blocks.size());
  std::size_t n = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    first[b] = n;
    n += blocks[b].instrs.size();
  }
  std::vector<BasicBlock> out;
  out.reserve(n);
  for (const auto& blk : blocks) {
    for (std::size_t i = 0; i < blk.instrs.size(); ++i) {
      BasicBlock one;
      one.id = out.size();
      one.start = blk.instrs[i].src_addr;
      one.end = one.start + 4;
      one.instrs.push_back(blk.instrs[i]);
      if (i + 1 < blk.instrs.size()) {
        one.successors.push_back({one.id + 1, EdgeKind::kFallthrough});
      } else {
        for (const Edge& e : blk.successors) one.successors.push_back({first[e.block], e.kind});
      }
      out.push_back(std::move(one));
    }
  }
  return out;
}

}  // namespace

TranslatedBlock annotate_block(const BasicBlock& block, const BlockTiming& timing,
                               DetailLevel level, const ProcessorDescription& desc) {
  return annotate(block, timing, level, desc, false);
}

TranslatedProgram emit_program(const std::vector<BasicBlock>& blocks,
                               const std::vector<BlockTiming>& timings, DetailLevel level,
                               const ProcessorDescription& desc, Variant variant,
                               const ProgramImage& image) {
  if (timings.size() != blocks.size())
    throw Error(ErrorCode::kInternal, "timing table does not match the block list");
  if (level == DetailLevel::kBranchICache && !desc.icache)
    throw Error(ErrorCode::kMissingCacheSpec,
                "detail level 3 needs an instruction cache in the description");

  TranslatedProgram prog;
  prog.level = level;
  prog.variant = variant;
  for (unsigned r = 0; r < kRegisterCount; ++r) prog.reg_map[r] = static_cast<Reg>(r);
  if (level == DetailLevel::kBranchICache) prog.cache = desc.icache;
  prog.memory_map = image.memory_map;
  prog.bus_map = image.bus_map;
  prog.sections = image.sections;

  if (variant == Variant::kBlockOriented) {
    for (std::size_t b = 0; b < blocks.size(); ++b)
      prog.blocks.push_back(annotate(blocks[b], timings[b], level, desc, false));
  } else {
    for (const auto& one : split_instructions(blocks))
      prog.blocks.push_back(annotate(one, scoreboard_cycles(one, desc), level, desc, true));
  }
  bool entry_found = false;
  for (const auto& tb : prog.blocks) {
    prog.addr_map.emplace(tb.src_start, tb.id);
    if (tb.src_start == image.entry) {
      prog.entry_block = tb.id;
      entry_found = true;
    }
  }
  if (!entry_found)
    throw Error(ErrorCode::kInternal, "entry " + json_util::hex(image.entry) + " is not a leader");
  return prog;
}

TranslatedProgram translate_image(const ProgramImage& image, const ProcessorDescription& desc,
                                  DetailLevel level, Variant variant) {
  if (level == DetailLevel::kBranchICache && !desc.icache)
    throw Error(ErrorCode::kMissingCacheSpec,
                "detail level 3 needs an instruction cache in the description");
  auto blocks = recover_blocks(image, desc);
  const auto timings = time_blocks(blocks, desc);
  if (level == DetailLevel::kBranchICache) assign_cabs(blocks, *desc.icache);
  return emit_program(blocks, timings, level, desc, variant, image);
}

}  // namespace cabt
