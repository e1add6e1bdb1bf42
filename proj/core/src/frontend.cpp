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

#include "cabt/frontend.hpp"

#include <algorithm>
#include <array>
#include <ostream>
#include <set>
#include <unordered_map>

#include "cabt/error.hpp"
#include "json_util.hpp"

namespace cabt {

using json_util::hex;

std::string_view to_string(AluOp op) {
  static constexpr std::string_view kNames[] = {"add", "sub", "mul", "and",
                                                "or",  "xor", "shl", "shr"};
  return kNames[static_cast<std::size_t>(op)];
}

std::string_view to_string(BranchCond cond) {
  static constexpr std::string_view kNames[] = {"eq", "ne", "lt"};
  return kNames[static_cast<std::size_t>(cond)];
}

std::string_view to_string(IrKind kind) {
  static constexpr std::string_view kNames[] = {"ALU",    "MOVI", "LOAD", "STORE",    "BRANCH",
                                                "JUMP",   "CALL", "JUMP_REG", "HALT", "NOP"};
  return kNames[static_cast<std::size_t>(kind)];
}

std::string_view to_string(EdgeKind kind) {
  static constexpr std::string_view kNames[] = {"fallthrough", "taken", "call", "return-unknown"};
  return kNames[static_cast<std::size_t>(kind)];
}

std::uint32_t alu_eval(AluOp op, std::uint32_t lhs, std::uint32_t rhs) {
  switch (op) {
    case AluOp::kAdd: return lhs + rhs;
    case AluOp::kSub: return lhs - rhs;
    case AluOp::kMul: return lhs * rhs;
    case AluOp::kAnd: return lhs & rhs;
    case AluOp::kOr: return lhs | rhs;
    case AluOp::kXor: return lhs ^ rhs;
    case AluOp::kShl: return lhs << (rhs & 31);
    case AluOp::kShr: return lhs >> (rhs & 31);
  }
  return 0;
}

bool branch_taken(BranchCond cond, std::uint32_t lhs, std::uint32_t rhs) {
  switch (cond) {
    case BranchCond::kEq: return lhs == rhs;
    case BranchCond::kNe: return lhs != rhs;
    case BranchCond::kLt: return static_cast<std::int32_t>(lhs) < static_cast<std::int32_t>(rhs);
  }
  return false;
}

IrInstruction to_ir(const Decoded& decoded, std::uint32_t addr) {
  const InstructionDef& def = *decoded.def;
  const DecodedFields& f = decoded.fields;
  IrInstruction ir;
  ir.src_addr = addr;
  ir.timing_index = def.timing_index;
  const std::uint32_t rel_target = addr + 4 + static_cast<std::uint32_t>(f.imm) * 4;

  const auto alu = [&](AluOp op) {
    ir.kind = IrKind::kAlu;
    ir.alu = op;
    ir.dst = f.rd;
    ir.srcs = {f.rs1, f.rs2};
  };
  const auto branch = [&](BranchCond cond) {
    ir.kind = IrKind::kBranch;
    ir.cond = cond;
    ir.srcs = {f.rd, f.rs1};
    ir.target = rel_target;
  };

  switch (def.op) {
    case MicroOp::kNop: ir.kind = IrKind::kNop; break;
    case MicroOp::kAdd: alu(AluOp::kAdd); break;
    case MicroOp::kSub: alu(AluOp::kSub); break;
    case MicroOp::kMul: alu(AluOp::kMul); break;
    case MicroOp::kAnd: alu(AluOp::kAnd); break;
    case MicroOp::kOr: alu(AluOp::kOr); break;
    case MicroOp::kXor: alu(AluOp::kXor); break;
    case MicroOp::kShl: alu(AluOp::kShl); break;
    case MicroOp::kShr: alu(AluOp::kShr); break;
    case MicroOp::kAddImm:
      ir.kind = IrKind::kAlu;
      ir.alu = AluOp::kAdd;
      ir.dst = f.rd;
      ir.srcs = {f.rs1};
      ir.imm = f.imm;
      break;
    case MicroOp::kLoadUpper:
      ir.kind = IrKind::kMovi;
      ir.dst = f.rd;
      ir.imm = static_cast<std::int32_t>(static_cast<std::uint32_t>(f.imm) << 16);
      break;
    case MicroOp::kLoad:
      ir.kind = IrKind::kLoad;
      ir.dst = f.rd;
      ir.srcs = {f.rs1};
      ir.imm = f.imm;
      break;
    case MicroOp::kStore:
      ir.kind = IrKind::kStore;
      ir.srcs = {f.rs1, f.rd};
      ir.imm = f.imm;
      break;
    case MicroOp::kBranchEq: branch(BranchCond::kEq); break;
    case MicroOp::kBranchNe: branch(BranchCond::kNe); break;
    case MicroOp::kBranchLt: branch(BranchCond::kLt); break;
    case MicroOp::kJump:
      ir.kind = IrKind::kJump;
      ir.target = rel_target;
      break;
    case MicroOp::kCall:
      ir.kind = IrKind::kCall;
      ir.dst = kLinkRegister;
      ir.target = rel_target;
      break;
    case MicroOp::kJumpReg:
      ir.kind = IrKind::kJumpReg;
      ir.srcs = {f.rs1};
      break;
    case MicroOp::kHalt: ir.kind = IrKind::kHalt; break;
  }
  return ir;
}

std::vector<IrInstruction> decode_program(const ProgramImage& image,
                                          const ProcessorDescription& desc) {
  std::vector<IrInstruction> out;
  for (const Section& sec : image.sections) {
    if (!sec.executable) continue;
    for (std::size_t off = 0; off + 4 <= sec.bytes.size(); off += 4) {
      const std::uint32_t addr = sec.base + static_cast<std::uint32_t>(off);
      const std::uint8_t* p = sec.bytes.data() + off;
      const std::uint32_t word = std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 |
                                 std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
      try {
        out.push_back(to_ir(lookup_decode(desc, word), addr));
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " at " + hex(addr));
      }
    }
  }
  return out;
}

namespace {

class AddressIndex {
 public:
  explicit AddressIndex(const std::vector<IrInstruction>& ir) {
    index_.reserve(ir.size());
    for (std::size_t i = 0; i < ir.size(); ++i) index_.emplace(ir[i].src_addr, i);
  }
  std::optional<std::size_t> find(std::uint32_t addr) const {
    auto it = index_.find(addr);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::uint32_t, std::size_t> index_;
};

bool contiguous(const std::vector<IrInstruction>& ir, std::size_t i) {
  return i + 1 < ir.size() && ir[i + 1].src_addr == ir[i].src_addr + 4;
}

bool falls_through(const IrInstruction& in) {
  return !in.is_control() || in.kind == IrKind::kBranch;
}

// Cuts `ir` at every flagged leader and threads the successor edges.
std::vector<BasicBlock> partition(std::vector<IrInstruction> ir, std::vector<bool> leader) {
  const std::size_t n = ir.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || !contiguous(ir, i - 1)) leader[i] = true;
    if (ir[i].is_control() && i + 1 < n) leader[i + 1] = true;
  }

  std::vector<BasicBlock> blocks;
  std::vector<std::size_t> block_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (leader[i]) {
      BasicBlock b;
      b.id = blocks.size();
      b.start = ir[i].src_addr;
      blocks.push_back(std::move(b));
    }
    block_of[i] = blocks.size() - 1;
  }
  std::vector<std::size_t> first_index(blocks.size());
  for (std::size_t i = n; i-- > 0;) first_index[block_of[i]] = i;

  const AddressIndex index(ir);
  const auto target_block = [&](const IrInstruction& in, std::uint32_t addr) {
    auto idx = index.find(addr);
    if (!idx || !leader[*idx])
      throw Error(ErrorCode::kTargetOutOfRange,
                  "control transfer at " + hex(in.src_addr) + " targets " + hex(addr) +
                      " outside the decoded code");
    return block_of[*idx];
  };

  // JAL return sites: the candidate targets of every register-indirect jump.
  std::vector<std::size_t> return_sites;
  for (std::size_t i = 0; i < n; ++i)
    if (ir[i].kind == IrKind::kCall && contiguous(ir, i)) return_sites.push_back(block_of[i + 1]);

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t lo = first_index[b];
    const std::size_t hi = (b + 1 < blocks.size()) ? first_index[b + 1] : n;
    BasicBlock& blk = blocks[b];
    const IrInstruction& last = ir[hi - 1];
    blk.end = last.src_addr + 4;

    if (falls_through(last) && !contiguous(ir, hi - 1))
      throw Error(ErrorCode::kTargetOutOfRange,
                  "execution falls through past the end of code at " + hex(last.src_addr));
    switch (last.kind) {
      case IrKind::kBranch:
        blk.successors.push_back({target_block(last, last.target), EdgeKind::kTaken});
        blk.successors.push_back({b + 1, EdgeKind::kFallthrough});
        break;
      case IrKind::kJump:
        blk.successors.push_back({target_block(last, last.target), EdgeKind::kTaken});
        break;
      case IrKind::kCall:
        blk.successors.push_back({target_block(last, last.target), EdgeKind::kCall});
        if (contiguous(ir, hi - 1)) blk.successors.push_back({b + 1, EdgeKind::kFallthrough});
        break;
      case IrKind::kJumpReg:
        for (std::size_t site : return_sites)
          blk.successors.push_back({site, EdgeKind::kReturnUnknown});
        break;
      case IrKind::kHalt:
        break;
      default:
        blk.successors.push_back({b + 1, EdgeKind::kFallthrough});
        break;
    }
    blk.instrs.assign(std::make_move_iterator(ir.begin() + static_cast<std::ptrdiff_t>(lo)),
                      std::make_move_iterator(ir.begin() + static_cast<std::ptrdiff_t>(hi)));
  }
  return blocks;
}

}  // namespace

std::vector<BasicBlock> build_cfg(std::vector<IrInstruction> ir, std::uint32_t entry) {
  if (ir.empty()) throw Error(ErrorCode::kTargetOutOfRange, "program has no code");
  const AddressIndex index(ir);
  std::vector<bool> leader(ir.size(), false);

  const auto mark = [&](std::uint32_t addr, std::uint32_t from) {
    auto idx = index.find(addr);
    if (!idx)
      throw Error(ErrorCode::kTargetOutOfRange,
                  "control transfer at " + hex(from) + " targets " + hex(addr) +
                      " outside the decoded code");
    leader[*idx] = true;
  };

  auto entry_idx = index.find(entry);
  if (!entry_idx)
    throw Error(ErrorCode::kTargetOutOfRange, "entry " + hex(entry) + " is not decoded code");
  leader[*entry_idx] = true;

  for (const auto& in : ir) {
    if (in.kind == IrKind::kBranch || in.kind == IrKind::kJump || in.kind == IrKind::kCall)
      mark(in.target, in.src_addr);
  }
  return partition(std::move(ir), std::move(leader));
}

void analyze_bases(std::vector<BasicBlock>& blocks, const MemoryMap& mem, const BusMap& bus) {
  for (auto& blk : blocks) {
    std::array<std::optional<std::uint32_t>, kRegisterCount> known{};
    known[0] = 0;
    for (auto& in : blk.instrs) {
      std::optional<std::uint32_t> result;
      switch (in.kind) {
        case IrKind::kMovi:
          result = static_cast<std::uint32_t>(*in.imm);
          break;
        case IrKind::kAlu: {
          const auto lhs = known[in.srcs[0]];
          const auto rhs = in.imm ? std::optional<std::uint32_t>(static_cast<std::uint32_t>(*in.imm))
                                  : known[in.srcs[1]];
          if (lhs && rhs) result = alu_eval(in.alu, *lhs, *rhs);
          break;
        }
        case IrKind::kCall:
          result = in.src_addr + 4;
          break;
        case IrKind::kLoad:
        case IrKind::kStore: {
          MemAccess access;
          if (const auto base = known[in.srcs[0]]) {
            access.src_addr = *base + static_cast<std::uint32_t>(*in.imm);
            const AddressClass cls = classify_address(mem, bus, access.src_addr);
            if (const auto* m = std::get_if<MemoryTarget>(&cls)) {
              access.kind = MemAccess::Kind::kMemory;
              access.dst_addr = m->dst_addr;
            } else if (const auto* io = std::get_if<IoTarget>(&cls)) {
              access.kind = MemAccess::Kind::kIo;
              access.device = io->device;
              access.offset = io->offset;
            }
          }
          in.io_target = std::move(access);
          break;
        }
        default:
          break;
      }
      if (in.dst) known[*in.dst] = result;
      known[0] = 0;
    }
  }
}

std::vector<BasicBlock> split_at_io(std::vector<BasicBlock> blocks) {
  std::vector<IrInstruction> ir;
  std::vector<bool> leader;
  for (auto& blk : blocks) {
    for (std::size_t i = 0; i < blk.instrs.size(); ++i) {
      leader.push_back(i == 0);
      ir.push_back(std::move(blk.instrs[i]));
    }
  }
  for (std::size_t i = 0; i < ir.size(); ++i) {
    if (!ir[i].needs_isolation()) continue;
    leader[i] = true;
    if (i + 1 < ir.size()) leader[i + 1] = true;
  }
  return partition(std::move(ir), std::move(leader));
}

std::vector<BasicBlock> recover_blocks(const ProgramImage& image,
                                       const ProcessorDescription& desc) {
  auto blocks = build_cfg(decode_program(image, desc), image.entry);
  analyze_bases(blocks, image.memory_map, image.bus_map);
  return split_at_io(std::move(blocks));
}

void dump_cfg(std::ostream& out, const std::vector<BasicBlock>& blocks) {
  for (const auto& b : blocks) {
    out << b.id << " [" << hex(b.start) << "," << hex(b.end) << ")";
    for (const auto& e : b.successors) out << " " << e.block << ":" << to_string(e.kind);
    out << "\n";
  }
}

}  // namespace cabt
