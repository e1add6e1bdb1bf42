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
// Processor description: decode table, pipeline timing classes, branch and
// instruction-cache parameters of the source processor. Every other stage is
// parameterized by one of these; it is immutable once validated.

#ifndef CABT_PROCDESC_HPP_
#define CABT_PROCDESC_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cabt {

using Reg = std::uint8_t;

inline constexpr unsigned kRegisterCount = 16;
inline constexpr Reg kLinkRegister = 15;
inline constexpr unsigned kOpcodeCount = 64;

enum class Format : std::uint8_t { kR, kI, kJ };

// The fixed micro-op set. Each instruction maps to exactly one of these.
enum class MicroOp : std::uint8_t {
  kNop,
  kAdd,
  kSub,
  kMul,
  kAnd,
  kOr,
  kXor,
  kShl,
  kShr,
  kAddImm,
  kLoadUpper,
  kLoad,
  kStore,
  kBranchEq,
  kBranchNe,
  kBranchLt,
  kJump,
  kCall,
  kJumpReg,
  kHalt,
};

// The mutually exclusive is_branch / is_load / ... flags of an instruction.
enum class InstrRole : std::uint8_t { kPlain, kBranch, kLoad, kStore, kCall, kHalt };

std::string_view to_string(Format f);
std::string_view to_string(MicroOp op);
std::string_view to_string(InstrRole role);
std::optional<Format> parse_format(std::string_view s);
std::optional<MicroOp> parse_micro_op(std::string_view s);
std::optional<InstrRole> parse_role(std::string_view s);

// Format and role a micro-op must be declared with.
Format required_format(MicroOp op);
InstrRole required_role(MicroOp op);

struct TimingClass {
  std::string name;
  std::uint32_t issue_cycles = 1;
  std::uint32_t result_latency = 1;

  bool operator==(const TimingClass&) const = default;
};

struct PipelineSpec {
  std::uint32_t issue_width = 1;
  std::vector<TimingClass> timing_classes;  // sorted by name

  const TimingClass* find(std::string_view name) const;

  bool operator==(const PipelineSpec&) const = default;
};

enum class BranchPolicy : std::uint8_t { kBtfnt };

struct BranchSpec {
  BranchPolicy policy = BranchPolicy::kBtfnt;
  std::uint32_t mispredict_penalty = 0;
  std::uint32_t taken_extra = 0;

  bool operator==(const BranchSpec&) const = default;
};

struct CacheSpec {
  std::uint32_t sets = 1;
  std::uint32_t ways = 1;
  std::uint32_t block_bytes = 4;
  std::uint32_t miss_penalty = 0;

  unsigned offset_bits() const;
  unsigned index_bits() const;

  bool operator==(const CacheSpec&) const = default;
};

struct InstructionDef {
  std::string mnemonic;
  std::uint8_t opcode = 0;
  Format format = Format::kR;
  MicroOp op = MicroOp::kNop;
  std::string timing_class;
  std::size_t timing_index = 0;  // into PipelineSpec::timing_classes
  InstrRole role = InstrRole::kPlain;

  bool operator==(const InstructionDef&) const = default;
};

struct ProcessorDescription {
  std::string name;
  std::uint32_t word_size = 32;
  std::uint32_t register_count = kRegisterCount;
  std::vector<InstructionDef> instructions;
  PipelineSpec pipeline;
  BranchSpec branch;
  std::optional<CacheSpec> icache;

  // opcode -> index into instructions, -1 when undefined. Built by validate().
  std::array<std::int16_t, kOpcodeCount> opcode_table{};

  const InstructionDef* by_opcode(unsigned opcode) const;
  const InstructionDef* by_mnemonic(std::string_view mnemonic) const;
  const TimingClass& timing_of(const InstructionDef& def) const {
    return pipeline.timing_classes[def.timing_index];
  }

  bool operator==(const ProcessorDescription&) const = default;
};

// Checks every invariant and builds the derived lookup tables
// (opcode_table, timing_index). Throws SchemaError / SemanticError.
void validate(ProcessorDescription& desc);

ProcessorDescription load_description(std::string_view json_text);
ProcessorDescription load_description_file(const std::filesystem::path& path);
std::string store_description(const ProcessorDescription& desc);

// The shipped TK32 processor with its default timing parameters.
ProcessorDescription tk32_description();

// Operand fields pulled out of an instruction word. Fields a format does not
// carry are zero.
struct DecodedFields {
  Reg rd = 0;
  Reg rs1 = 0;
  Reg rs2 = 0;
  std::int32_t imm = 0;

  bool operator==(const DecodedFields&) const = default;
};

struct Decoded {
  const InstructionDef* def = nullptr;
  DecodedFields fields;
};

// Throws IllegalInstruction for an unknown opcode or a register field >= 16.
Decoded lookup_decode(const ProcessorDescription& desc, std::uint32_t word);

// Throws SyntaxError when an operand does not fit its field.
std::uint32_t encode(const InstructionDef& def, const DecodedFields& fields);

}  // namespace cabt

#endif  // CABT_PROCDESC_HPP_
