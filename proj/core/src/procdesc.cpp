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

#include "cabt/procdesc.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "cabt/error.hpp"
#include "json_util.hpp"

namespace cabt {

namespace {

using json_util::json;

struct MicroOpInfo {
  MicroOp op;
  std::string_view name;
  Format format;
  InstrRole role;
};

constexpr MicroOpInfo kMicroOps[] = {
    {MicroOp::kNop, "nop", Format::kR, InstrRole::kPlain},
    {MicroOp::kAdd, "add", Format::kR, InstrRole::kPlain},
    {MicroOp::kSub, "sub", Format::kR, InstrRole::kPlain},
    {MicroOp::kMul, "mul", Format::kR, InstrRole::kPlain},
    {MicroOp::kAnd, "and", Format::kR, InstrRole::kPlain},
    {MicroOp::kOr, "or", Format::kR, InstrRole::kPlain},
    {MicroOp::kXor, "xor", Format::kR, InstrRole::kPlain},
    {MicroOp::kShl, "shl", Format::kR, InstrRole::kPlain},
    {MicroOp::kShr, "shr", Format::kR, InstrRole::kPlain},
    {MicroOp::kAddImm, "addi", Format::kI, InstrRole::kPlain},
    {MicroOp::kLoadUpper, "lui", Format::kI, InstrRole::kPlain},
    {MicroOp::kLoad, "load", Format::kI, InstrRole::kLoad},
    {MicroOp::kStore, "store", Format::kI, InstrRole::kStore},
    {MicroOp::kBranchEq, "beq", Format::kI, InstrRole::kBranch},
    {MicroOp::kBranchNe, "bne", Format::kI, InstrRole::kBranch},
    {MicroOp::kBranchLt, "blt", Format::kI, InstrRole::kBranch},
    {MicroOp::kJump, "jump", Format::kJ, InstrRole::kBranch},
    {MicroOp::kCall, "call", Format::kJ, InstrRole::kCall},
    {MicroOp::kJumpReg, "jump_reg", Format::kR, InstrRole::kBranch},
    {MicroOp::kHalt, "halt", Format::kR, InstrRole::kHalt},
};

const MicroOpInfo& info(MicroOp op) { return kMicroOps[static_cast<std::size_t>(op)]; }

[[noreturn]] void semantic_error(const std::string& message) {
  throw Error(ErrorCode::kSemantic, message);
}

std::int32_t sign_extend(std::uint32_t value, unsigned bits) {
  const std::uint32_t m = 1u << (bits - 1);
  value &= (bits == 32) ? ~0u : ((1u << bits) - 1);
  return static_cast<std::int32_t>((value ^ m) - m);
}

}  // namespace

std::string_view to_string(Format f) {
  switch (f) {
    case Format::kR: return "R";
    case Format::kI: return "I";
    case Format::kJ: return "J";
  }
  return "?";
}

std::string_view to_string(MicroOp op) { return info(op).name; }

std::string_view to_string(InstrRole role) {
  switch (role) {
    case InstrRole::kPlain: return "plain";
    case InstrRole::kBranch: return "branch";
    case InstrRole::kLoad: return "load";
    case InstrRole::kStore: return "store";
    case InstrRole::kCall: return "call";
    case InstrRole::kHalt: return "halt";
  }
  return "?";
}

std::optional<Format> parse_format(std::string_view s) {
  if (s == "R") return Format::kR;
  if (s == "I") return Format::kI;
  if (s == "J") return Format::kJ;
  return std::nullopt;
}

std::optional<MicroOp> parse_micro_op(std::string_view s) {
  for (const auto& i : kMicroOps)
    if (i.name == s) return i.op;
  return std::nullopt;
}

std::optional<InstrRole> parse_role(std::string_view s) {
  for (auto r : {InstrRole::kBranch, InstrRole::kLoad, InstrRole::kStore, InstrRole::kCall,
                 InstrRole::kHalt})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

Format required_format(MicroOp op) { return info(op).format; }
InstrRole required_role(MicroOp op) { return info(op).role; }

const TimingClass* PipelineSpec::find(std::string_view name) const {
  for (const auto& tc : timing_classes)
    if (tc.name == name) return &tc;
  return nullptr;
}

unsigned CacheSpec::offset_bits() const { return static_cast<unsigned>(std::countr_zero(block_bytes)); }
unsigned CacheSpec::index_bits() const { return static_cast<unsigned>(std::countr_zero(sets)); }

const InstructionDef* ProcessorDescription::by_opcode(unsigned opcode) const {
  if (opcode >= kOpcodeCount) return nullptr;
  const std::int16_t idx = opcode_table[opcode];
  return idx < 0 ? nullptr : &instructions[static_cast<std::size_t>(idx)];
}

const InstructionDef* ProcessorDescription::by_mnemonic(std::string_view mnemonic) const {
  for (const auto& def : instructions)
    if (def.mnemonic == mnemonic) return &def;
  return nullptr;
}

void validate(ProcessorDescription& desc) {
  if (desc.word_size != 32) semantic_error("word_size must be 32");
  if (desc.register_count != kRegisterCount) semantic_error("registers must be 16");

  auto& pipe = desc.pipeline;
  if (pipe.issue_width < 1) semantic_error("pipeline.issue_width must be >= 1");
  std::sort(pipe.timing_classes.begin(), pipe.timing_classes.end(),
            [](const TimingClass& a, const TimingClass& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < pipe.timing_classes.size(); ++i) {
    const auto& tc = pipe.timing_classes[i];
    if (i > 0 && pipe.timing_classes[i - 1].name == tc.name)
      semantic_error("pipeline.timing_classes: duplicate class '" + tc.name + "'");
    if (tc.issue_cycles < 1)
      semantic_error("pipeline.timing_classes." + tc.name + ": issue_cycles must be >= 1");
    if (tc.result_latency < 1)
      semantic_error("pipeline.timing_classes." + tc.name + ": result_latency must be >= 1");
  }

  desc.opcode_table.fill(-1);
  std::set<std::string> mnemonics;
  for (std::size_t i = 0; i < desc.instructions.size(); ++i) {
    auto& def = desc.instructions[i];
    const std::string where = "instructions[" + std::to_string(i) + "] (" + def.mnemonic + ")";
    if (def.mnemonic.empty()) semantic_error(where + ": empty mnemonic");
    if (!mnemonics.insert(def.mnemonic).second)
      semantic_error(where + ": duplicate mnemonic '" + def.mnemonic + "'");
    if (def.opcode >= kOpcodeCount) semantic_error(where + ": opcode must fit in 6 bits");
    if (desc.opcode_table[def.opcode] >= 0)
      semantic_error(where + ": duplicate opcode " + std::to_string(def.opcode));
    desc.opcode_table[def.opcode] = static_cast<std::int16_t>(i);
    if (def.format != required_format(def.op))
      semantic_error(where + ": format " + std::string(to_string(def.format)) +
                     " does not fit ir_op " + std::string(to_string(def.op)));
    if (def.role != required_role(def.op))
      semantic_error(where + ": flags do not fit ir_op " + std::string(to_string(def.op)));
    const TimingClass* tc = pipe.find(def.timing_class);
    if (tc == nullptr)
      semantic_error(where + ": undefined timing class '" + def.timing_class + "'");
    def.timing_index = static_cast<std::size_t>(tc - pipe.timing_classes.data());
  }

  if (desc.icache) {
    const CacheSpec& c = *desc.icache;
    if (c.sets == 0 || !std::has_single_bit(c.sets)) semantic_error("icache.sets not a power of two");
    if (c.ways < 1) semantic_error("icache.ways must be >= 1");
    if (c.block_bytes < 4 || !std::has_single_bit(c.block_bytes))
      semantic_error("icache.block_bytes must be a power of two >= 4");
    const std::uint64_t bytes = std::uint64_t{c.sets} * c.ways * c.block_bytes;
    if (bytes > (std::uint64_t{1} << 20)) semantic_error("icache: sets*ways*block_bytes exceeds 2^20");
    if (32 - c.offset_bits() - c.index_bits() > 31)
      semantic_error("icache: tag wider than 31 bits");
  }
}

ProcessorDescription load_description(std::string_view json_text) {
  using namespace json_util;
  const json doc = parse(json_text, "description");
  check_keys(doc, "description", {"name", "registers", "pipeline", "branch", "instructions"},
             {"icache"});

  ProcessorDescription desc;
  desc.name = get_string(doc, "name", "description");
  desc.register_count = get_u32(doc, "registers", "description");

  const json& pipe = doc["pipeline"];
  check_keys(pipe, "pipeline", {"issue_width", "timing_classes"});
  desc.pipeline.issue_width = get_u32(pipe, "issue_width", "pipeline");
  const json& classes = pipe["timing_classes"];
  if (!classes.is_object()) schema_error("pipeline.timing_classes", "expected an object");
  for (const auto& [name, pair] : classes.items()) {
    const std::string ctx = "pipeline.timing_classes." + name;
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer())
      schema_error(ctx, "expected [issue_cycles, result_latency]");
    const auto issue = pair[0].get<std::int64_t>();
    const auto latency = pair[1].get<std::int64_t>();
    if (issue < 0 || latency < 0 || issue > 1'000'000 || latency > 1'000'000)
      semantic_error(ctx + ": cycle counts out of range");
    desc.pipeline.timing_classes.push_back(
        {name, static_cast<std::uint32_t>(issue), static_cast<std::uint32_t>(latency)});
  }

  const json& br = doc["branch"];
  check_keys(br, "branch", {"policy", "mispredict_penalty", "taken_extra"});
  if (get_string(br, "policy", "branch") != "BTFNT")
    semantic_error("branch.policy: only BTFNT is supported");
  desc.branch.mispredict_penalty = get_u32(br, "mispredict_penalty", "branch");
  desc.branch.taken_extra = get_u32(br, "taken_extra", "branch");

  if (doc.contains("icache")) {
    const json& ic = doc["icache"];
    check_keys(ic, "icache", {"sets", "ways", "block_bytes", "miss_penalty"});
    desc.icache = CacheSpec{get_u32(ic, "sets", "icache"), get_u32(ic, "ways", "icache"),
                            get_u32(ic, "block_bytes", "icache"),
                            get_u32(ic, "miss_penalty", "icache")};
  }

  const json& instrs = doc["instructions"];
  if (!instrs.is_array()) schema_error("instructions", "expected a list");
  for (std::size_t i = 0; i < instrs.size(); ++i) {
    const std::string ctx = "instructions[" + std::to_string(i) + "]";
    const json& in = instrs[i];
    check_keys(in, ctx, {"mnemonic", "opcode", "format", "ir_op", "timing_class", "flags"});
    InstructionDef def;
    def.mnemonic = get_string(in, "mnemonic", ctx);
    const std::uint32_t opcode = get_u32(in, "opcode", ctx);
    if (opcode >= kOpcodeCount) semantic_error(ctx + ": opcode must fit in 6 bits");
    def.opcode = static_cast<std::uint8_t>(opcode);
    auto fmt = parse_format(get_string(in, "format", ctx));
    if (!fmt) schema_error(ctx, "format must be one of R, I, J");
    def.format = *fmt;
    auto op = parse_micro_op(get_string(in, "ir_op", ctx));
    if (!op) schema_error(ctx, "unknown ir_op '" + in["ir_op"].get<std::string>() + "'");
    def.op = *op;
    def.timing_class = get_string(in, "timing_class", ctx);
    const json& flags = in["flags"];
    if (!flags.is_array()) schema_error(ctx + ".flags", "expected a list");
    if (flags.size() > 1) semantic_error(ctx + ": flags are mutually exclusive");
    for (const json& f : flags) {
      if (!f.is_string()) schema_error(ctx + ".flags", "expected strings");
      auto role = parse_role(f.get<std::string>());
      if (!role) schema_error(ctx + ".flags", "unknown flag '" + f.get<std::string>() + "'");
      def.role = *role;
    }
    desc.instructions.push_back(std::move(def));
  }

  validate(desc);
  return desc;
}

ProcessorDescription load_description_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open description '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_description(ss.str());
}

std::string store_description(const ProcessorDescription& desc) {
  json doc;
  doc["name"] = desc.name;
  doc["registers"] = desc.register_count;
  json classes = json::object();
  for (const auto& tc : desc.pipeline.timing_classes)
    classes[tc.name] = json::array({tc.issue_cycles, tc.result_latency});
  doc["pipeline"] = {{"issue_width", desc.pipeline.issue_width}, {"timing_classes", classes}};
  doc["branch"] = {{"policy", "BTFNT"},
                   {"mispredict_penalty", desc.branch.mispredict_penalty},
                   {"taken_extra", desc.branch.taken_extra}};
  if (desc.icache) {
    doc["icache"] = {{"sets", desc.icache->sets},
                     {"ways", desc.icache->ways},
                     {"block_bytes", desc.icache->block_bytes},
                     {"miss_penalty", desc.icache->miss_penalty}};
  }
  json instrs = json::array();
  for (const auto& def : desc.instructions) {
    json flags = json::array();
    if (def.role != InstrRole::kPlain) flags.push_back(std::string(to_string(def.role)));
    instrs.push_back({{"mnemonic", def.mnemonic},
                      {"opcode", def.opcode},
                      {"format", std::string(to_string(def.format))},
                      {"ir_op", std::string(to_string(def.op))},
                      {"timing_class", def.timing_class},
                      {"flags", flags}});
  }
  doc["instructions"] = instrs;
  return doc.dump(2) + "\n";
}

ProcessorDescription tk32_description() {
  ProcessorDescription desc;
  desc.name = "TK32";
  desc.pipeline.issue_width = 1;
  desc.pipeline.timing_classes = {
      {"alu", 1, 1}, {"branch", 1, 1}, {"mem", 1, 3}, {"mul", 1, 3}, {"nop", 1, 1}};
  desc.branch = BranchSpec{BranchPolicy::kBtfnt, 3, 1};
  desc.icache = CacheSpec{16, 2, 16, 10};

  struct Row {
    const char* mnemonic;
    MicroOp op;
    const char* timing;
  };
  static constexpr Row kRows[] = {
      {"nop", MicroOp::kNop, "nop"},        {"add", MicroOp::kAdd, "alu"},
      {"sub", MicroOp::kSub, "alu"},        {"mul", MicroOp::kMul, "mul"},
      {"and", MicroOp::kAnd, "alu"},        {"or", MicroOp::kOr, "alu"},
      {"xor", MicroOp::kXor, "alu"},        {"shl", MicroOp::kShl, "alu"},
      {"shr", MicroOp::kShr, "alu"},        {"addi", MicroOp::kAddImm, "alu"},
      {"lui", MicroOp::kLoadUpper, "alu"},  {"ld", MicroOp::kLoad, "mem"},
      {"st", MicroOp::kStore, "mem"},       {"beq", MicroOp::kBranchEq, "branch"},
      {"bne", MicroOp::kBranchNe, "branch"}, {"blt", MicroOp::kBranchLt, "branch"},
      {"j", MicroOp::kJump, "branch"},      {"jal", MicroOp::kCall, "branch"},
      {"jr", MicroOp::kJumpReg, "branch"},  {"halt", MicroOp::kHalt, "nop"},
  };
  std::uint8_t opcode = 0;
  for (const Row& row : kRows) {
    desc.instructions.push_back(InstructionDef{row.mnemonic, opcode++, required_format(row.op),
                                               row.op, row.timing, 0, required_role(row.op)});
  }
  validate(desc);
  return desc;
}

Decoded lookup_decode(const ProcessorDescription& desc, std::uint32_t word) {
  const unsigned opcode = word >> 26;
  const InstructionDef* def = desc.by_opcode(opcode);
  if (def == nullptr)
    throw Error(ErrorCode::kIllegalInstruction, "undefined opcode " + std::to_string(opcode));

  const auto reg_field = [word](unsigned shift, const char* name) -> Reg {
    const unsigned v = (word >> shift) & 0x1f;
    if (v >= kRegisterCount)
      throw Error(ErrorCode::kIllegalInstruction,
                  std::string("register field ") + name + " = " + std::to_string(v));
    return static_cast<Reg>(v);
  };

  Decoded d;
  d.def = def;
  switch (def->format) {
    case Format::kR:
      d.fields.rd = reg_field(21, "rd");
      d.fields.rs1 = reg_field(16, "rs1");
      d.fields.rs2 = reg_field(11, "rs2");
      break;
    case Format::kI:
      d.fields.rd = reg_field(21, "rd");
      d.fields.rs1 = reg_field(16, "rs1");
      d.fields.imm = sign_extend(word, 16);
      break;
    case Format::kJ:
      d.fields.imm = sign_extend(word, 26);
      break;
  }
  return d;
}

std::uint32_t encode(const InstructionDef& def, const DecodedFields& f) {
  const auto check_reg = [&](Reg r, const char* name) {
    if (r >= kRegisterCount)
      throw Error(ErrorCode::kSyntax, def.mnemonic + ": register " + name + " out of range");
    return static_cast<std::uint32_t>(r);
  };
  const std::uint32_t op = std::uint32_t{def.opcode} << 26;
  switch (def.format) {
    case Format::kR:
      return op | check_reg(f.rd, "rd") << 21 | check_reg(f.rs1, "rs1") << 16 |
             check_reg(f.rs2, "rs2") << 11;
    case Format::kI:
      if (f.imm < -32768 || f.imm > 32767)
        throw Error(ErrorCode::kSyntax, def.mnemonic + ": immediate " + std::to_string(f.imm) +
                                            " does not fit 16 bits");
      return op | check_reg(f.rd, "rd") << 21 | check_reg(f.rs1, "rs1") << 16 |
             (static_cast<std::uint32_t>(f.imm) & 0xffff);
    case Format::kJ:
      if (f.imm < -(1 << 25) || f.imm >= (1 << 25))
        throw Error(ErrorCode::kSyntax, def.mnemonic + ": offset " + std::to_string(f.imm) +
                                            " does not fit 26 bits");
      return op | (static_cast<std::uint32_t>(f.imm) & 0x03ffffff);
  }
  return op;
}

}  // namespace cabt
