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

#include "cabt/oracle.hpp"

#include <unordered_map>
#include <unordered_set>

#include "cabt/cachemodel.hpp"
#include "cabt/error.hpp"
#include "cabt/frontend.hpp"
#include "cabt/timing.hpp"
#include "json_util.hpp"

namespace cabt {

using json_util::hex;

OracleConfig config_for_level(DetailLevel level) {
  OracleConfig cfg;
  cfg.model_branch = level != DetailLevel::kStatic;
  cfg.model_icache = level == DetailLevel::kBranchICache;
  return cfg;
}

OracleConfig full_continuous_config() {
  OracleConfig cfg;
  cfg.block_flush = false;
  cfg.continuous = true;
  cfg.model_branch = true;
  cfg.model_icache = true;
  return cfg;
}

namespace {

class Interpreter {
 public:
  Interpreter(const ProgramImage& image, const ProcessorDescription& desc, const OracleConfig& cfg,
              DeviceRegistry& devices, RunLimits limits, bool record_trace)
      : image_(image),
        desc_(desc),
        continuous_(cfg.continuous),
        model_branch_(cfg.model_branch),
        model_icache_(cfg.model_icache),
        devices_(devices),
        limits_(limits),
        record_trace_(record_trace),
        memory_(image.memory_map, image.sections),
        sb_(desc.pipeline.issue_width) {
    for (const Section& s : image.sections) {
      if (!s.executable) continue;
      for (std::size_t off = 0; off + 4 <= s.bytes.size(); off += 4) {
        const std::uint8_t* p = s.bytes.data() + off;
        code_[s.base + static_cast<std::uint32_t>(off)] =
            std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 |
            std::uint32_t{p[3]} << 24;
      }
    }
    if (model_icache_) {
      if (!desc.icache)
        throw Error(ErrorCode::kMissingCacheSpec, "cache model needs an instruction cache");
      cache_.emplace(*desc.icache);
    }
    if (!continuous_)
      for (const BasicBlock& b : recover_blocks(image, desc)) leaders_.insert(b.start);
  }

  OracleResult run();

 private:
  struct Step {
    std::optional<std::uint32_t> next_pc;  // nullopt after HALT
    bool control = false;
    bool conditional = false;
    bool taken = false;
    std::uint32_t target = 0;
  };

  void set(Reg r, std::uint32_t v) {
    if (r != 0) regs_[r] = v;
  }
  std::uint32_t load(std::uint32_t addr, std::uint64_t stamp);
  void store(std::uint32_t addr, std::uint32_t value, std::uint64_t stamp);
  void begin_block();
  void end_block(const Step& last, std::uint64_t last_issue, const TimingClass& cls,
                 std::uint32_t pc);

  const ProgramImage& image_;
  const ProcessorDescription& desc_;
  const bool continuous_;
  const bool model_branch_;
  const bool model_icache_;
  DeviceRegistry& devices_;
  RunLimits limits_;
  bool record_trace_;

  std::unordered_map<std::uint32_t, std::uint32_t> code_;
  std::unordered_set<std::uint32_t> leaders_;
  RegisterFile regs_{};
  EmulatedMemory memory_;
  Scoreboard sb_;
  std::optional<CacheState> cache_;
  std::optional<CacheKey> line_;

  std::uint64_t block_base_ = 0;   // committed cycles at block entry (flush mode)
  std::uint64_t block_cache_ = 0;  // cache extra charged in the current block
  CycleBreakdown breakdown_;
  std::uint64_t cycles_ = 0;
  std::vector<BusEvent> bus_;
  std::vector<TraceEntry> trace_;
};

std::uint32_t Interpreter::load(std::uint32_t addr, std::uint64_t stamp) {
  const AddressClass cls = classify_address(image_.memory_map, image_.bus_map, addr);
  if (const auto* m = std::get_if<MemoryTarget>(&cls)) return memory_.read32(m->dst_addr);
  if (const auto* io = std::get_if<IoTarget>(&cls)) {
    const std::uint32_t v = devices_.get(io->device).read(stamp, io->offset);
    bus_.push_back(BusEvent{stamp, io->device, io->offset, BusDir::kRead, v});
    return v;
  }
  throw Error(ErrorCode::kMemoryFault, "access to unmapped address " + hex(addr));
}

void Interpreter::store(std::uint32_t addr, std::uint32_t value, std::uint64_t stamp) {
  const AddressClass cls = classify_address(image_.memory_map, image_.bus_map, addr);
  if (const auto* m = std::get_if<MemoryTarget>(&cls)) {
    memory_.write32(m->dst_addr, value);
  } else if (const auto* io = std::get_if<IoTarget>(&cls)) {
    devices_.get(io->device).write(stamp, io->offset, value);
    bus_.push_back(BusEvent{stamp, io->device, io->offset, BusDir::kWrite, value});
  } else {
    throw Error(ErrorCode::kMemoryFault, "access to unmapped address " + hex(addr));
  }
}

void Interpreter::begin_block() {
  block_base_ = cycles_;
  block_cache_ = 0;
  sb_.reset();
  line_.reset();
}

void Interpreter::end_block(const Step& last, std::uint64_t last_issue, const TimingClass& cls,
                            std::uint32_t pc) {
  std::uint64_t static_cycles = sb_.finish();
  std::uint64_t branch_extra = 0;
  if (last.conditional) {
    const Direction dir = branch_direction(pc, last.target);
    const std::uint64_t min = branch_min(desc_, cls, dir);
    static_cycles = last_issue + min;
    if (model_branch_)
      branch_extra =
          branch_cost(desc_, cls, dir, last.taken ? Outcome::kTaken : Outcome::kNotTaken) - min;
  }
  breakdown_.static_cycles += static_cycles;
  breakdown_.branch_correction += branch_extra;
  breakdown_.cache_correction += block_cache_;
  cycles_ = block_base_ + static_cycles + branch_extra + block_cache_;
}

OracleResult Interpreter::run() {
  std::uint32_t pc = image_.entry;
  std::uint64_t executed = 0;
  bool block_open = false;

  for (;;) {
    if (executed >= limits_.max_ops)
      throw Error(ErrorCode::kOpLimitExceeded,
                  "instruction limit of " + std::to_string(limits_.max_ops) + " reached");
    auto code = code_.find(pc);
    if (code == code_.end()) throw Error(ErrorCode::kFetchFault, "no code at " + hex(pc));
    if (!continuous_ && !block_open) {
      begin_block();
      block_open = true;
    }

    if (cache_) {
      const CacheKey key = cab_key(pc, cache_->spec());
      if (!line_ || !(*line_ == key)) {
        line_ = key;
        const auto r = cache_access(*cache_, key.tag, key.index, cache_->spec());
        block_cache_ += r.extra_cycles;
        if (continuous_) sb_.delay(r.extra_cycles);
      }
    }

    Decoded d;
    try {
      d = lookup_decode(desc_, code->second);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " at " + hex(pc));
    }
    const InstructionDef& def = *d.def;
    const DecodedFields& f = d.fields;
    const TimingClass& cls = desc_.timing_of(def);

    // Source/destination registers as the scoreboard sees them.
    std::array<Reg, 2> src_buf{};
    std::size_t nsrc = 0;
    std::optional<Reg> dst;
    switch (def.op) {
      case MicroOp::kAdd: case MicroOp::kSub: case MicroOp::kMul: case MicroOp::kAnd:
      case MicroOp::kOr: case MicroOp::kXor: case MicroOp::kShl: case MicroOp::kShr:
        src_buf = {f.rs1, f.rs2};
        nsrc = 2;
        dst = f.rd;
        break;
      case MicroOp::kAddImm: case MicroOp::kLoad:
        src_buf[0] = f.rs1;
        nsrc = 1;
        dst = f.rd;
        break;
      case MicroOp::kLoadUpper:
        dst = f.rd;
        break;
      case MicroOp::kStore:
        src_buf = {f.rs1, f.rd};
        nsrc = 2;
        break;
      case MicroOp::kBranchEq: case MicroOp::kBranchNe: case MicroOp::kBranchLt:
        src_buf = {f.rd, f.rs1};
        nsrc = 2;
        break;
      case MicroOp::kCall:
        dst = kLinkRegister;
        break;
      case MicroOp::kJumpReg:
        src_buf[0] = f.rs1;
        nsrc = 1;
        break;
      case MicroOp::kNop: case MicroOp::kJump: case MicroOp::kHalt:
        break;
    }
    const std::uint64_t t = sb_.issue(cls, std::span<const Reg>(src_buf.data(), nsrc), dst);
    if (record_trace_) trace_.push_back(TraceEntry{pc, code->second, continuous_ ? t : block_base_ + t});
    ++executed;

    // Bus accesses happen once the instruction has left the issue stage.
    const std::uint64_t stamp =
        continuous_ ? sb_.finish() : block_base_ + sb_.finish() + block_cache_;

    const std::uint32_t a = regs_[f.rs1];
    const std::uint32_t b = regs_[f.rs2];
    const std::uint32_t imm = static_cast<std::uint32_t>(f.imm);
    const std::uint32_t rel = pc + 4 + imm * 4;
    Step step;
    step.next_pc = pc + 4;
    switch (def.op) {
      case MicroOp::kNop: break;
      case MicroOp::kAdd: set(f.rd, a + b); break;
      case MicroOp::kSub: set(f.rd, a - b); break;
      case MicroOp::kMul: set(f.rd, a * b); break;
      case MicroOp::kAnd: set(f.rd, a & b); break;
      case MicroOp::kOr: set(f.rd, a | b); break;
      case MicroOp::kXor: set(f.rd, a ^ b); break;
      case MicroOp::kShl: set(f.rd, a << (b % 32)); break;
      case MicroOp::kShr: set(f.rd, a >> (b % 32)); break;
      case MicroOp::kAddImm: set(f.rd, a + imm); break;
      case MicroOp::kLoadUpper: set(f.rd, imm << 16); break;
      case MicroOp::kLoad: set(f.rd, load(a + imm, stamp)); break;
      case MicroOp::kStore: store(a + imm, regs_[f.rd], stamp); break;
      case MicroOp::kBranchEq:
      case MicroOp::kBranchNe:
      case MicroOp::kBranchLt: {
        const std::uint32_t lhs = regs_[f.rd];
        bool taken;
        if (def.op == MicroOp::kBranchEq) taken = lhs == a;
        else if (def.op == MicroOp::kBranchNe) taken = lhs != a;
        else taken = static_cast<std::int32_t>(lhs) < static_cast<std::int32_t>(a);
        step.control = step.conditional = true;
        step.taken = taken;
        step.target = rel;
        if (taken) step.next_pc = rel;
        break;
      }
      case MicroOp::kJump:
        step.control = true;
        step.next_pc = rel;
        break;
      case MicroOp::kCall:
        set(kLinkRegister, pc + 4);
        step.control = true;
        step.next_pc = rel;
        break;
      case MicroOp::kJumpReg:
        step.control = true;
        step.next_pc = a;
        break;
      case MicroOp::kHalt:
        step.control = true;
        step.next_pc.reset();
        break;
    }

    if (continuous_) {
      if (step.conditional) {
        const Direction dir = branch_direction(pc, step.target);
        const Outcome outcome = step.taken ? Outcome::kTaken : Outcome::kNotTaken;
        const std::uint64_t cost =
            model_branch_ ? branch_cost(desc_, cls, dir, outcome) : branch_min(desc_, cls, dir);
        sb_.hold_until(t + cost);
      }
      if (step.control) line_.reset();
      if (!step.next_pc) {
        cycles_ = sb_.finish();
        break;
      }
    } else {
      const bool ends = step.control || !step.next_pc || leaders_.contains(*step.next_pc);
      if (ends) {
        end_block(step, t, cls, pc);
        block_open = false;
      }
      if (!step.next_pc) break;
    }
    pc = *step.next_pc;
  }

  // Penalties overlap with stalls in the rolling pipeline, so a continuous
  // run cannot be split into components.
  if (continuous_) breakdown_ = CycleBreakdown{cycles_, 0, 0};
  OracleResult out;
  out.run.hwclock = cycles_;
  out.run.host_ops = executed;
  out.run.instructions = executed;
  out.run.bus_trace = std::move(bus_);
  out.run.registers = regs_;
  out.run.memory_digest = memory_.digest();
  out.run.breakdown = breakdown_;
  out.trace = std::move(trace_);
  return out;
}

}  // namespace

OracleResult reference_run(const ProgramImage& image, const ProcessorDescription& desc,
                           const OracleConfig& cfg, DeviceRegistry& devices, RunLimits limits,
                           bool record_trace) {
  return Interpreter(image, desc, cfg, devices, limits, record_trace).run();
}

}  // namespace cabt
