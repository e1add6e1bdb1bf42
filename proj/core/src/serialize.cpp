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

// JSON form of a translated program. Ops are tagged records keyed by "op";
// the memory image reuses the program image encoding.

#include <algorithm>
#include <sstream>

#include "cabt/codegen.hpp"
#include "cabt/error.hpp"
#include "json_util.hpp"

namespace cabt {

namespace {

using json_util::hex;
using json_util::json;

constexpr std::string_view kFormatName = "cabt-translated";

std::optional<AluOp> parse_alu(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(AluOp::kShr); ++i)
    if (to_string(static_cast<AluOp>(i)) == s) return static_cast<AluOp>(i);
  return std::nullopt;
}

std::optional<BranchCond> parse_cond(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(BranchCond::kLt); ++i)
    if (to_string(static_cast<BranchCond>(i)) == s) return static_cast<BranchCond>(i);
  return std::nullopt;
}

json op_to_json(const TargetOp& top) {
  json j;
  j["op"] = op_name(top);
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, op::SyncStart> || std::is_same_v<T, op::CorrAdd>) {
          j["cycles"] = o.cycles;
        } else if constexpr (std::is_same_v<T, op::CacheCheck>) {
          j["tag"] = o.tag;
          j["index"] = o.index;
        } else if constexpr (std::is_same_v<T, op::BrCheck>) {
          j["cond"] = to_string(o.cond);
          j["lhs"] = o.lhs;
          j["rhs"] = o.rhs;
          j["taken"] = o.taken_correction;
          j["not_taken"] = o.not_taken_correction;
        } else if constexpr (std::is_same_v<T, op::Alu>) {
          j["alu"] = to_string(o.op);
          j["dst"] = o.dst;
          j["lhs"] = o.lhs;
          j["rhs"] = o.rhs;
        } else if constexpr (std::is_same_v<T, op::AluImm>) {
          j["alu"] = to_string(o.op);
          j["dst"] = o.dst;
          j["src"] = o.src;
          j["imm"] = o.imm;
        } else if constexpr (std::is_same_v<T, op::Movi>) {
          j["dst"] = o.dst;
          j["value"] = hex(o.value);
        } else if constexpr (std::is_same_v<T, op::Load> || std::is_same_v<T, op::Store>) {
          if constexpr (std::is_same_v<T, op::Load>)
            j["dst"] = o.dst;
          else
            j["value"] = o.value;
          j["base"] = o.base;
          j["offset"] = o.offset;
          j["src_addr"] = hex(o.src_addr);
          j["dst_addr"] = hex(o.dst_addr);
        } else if constexpr (std::is_same_v<T, op::BusRead> || std::is_same_v<T, op::BusWrite>) {
          j["device"] = o.device;
          j["offset"] = hex(o.offset);
          if constexpr (std::is_same_v<T, op::BusRead>)
            j["dst"] = o.dst;
          else
            j["value"] = o.value;
          j["base"] = o.base;
          j["disp"] = o.disp;
          j["src_addr"] = hex(o.src_addr);
        } else if constexpr (std::is_same_v<T, op::AddrDispatch>) {
          j["store"] = o.store;
          j["data"] = o.data;
          j["base"] = o.base;
          j["offset"] = o.offset;
        } else if constexpr (std::is_same_v<T, op::Br>) {
          j["cond"] = to_string(o.cond);
          j["lhs"] = o.lhs;
          j["rhs"] = o.rhs;
          j["taken"] = o.taken;
          j["fallthrough"] = o.fallthrough;
        } else if constexpr (std::is_same_v<T, op::Jmp>) {
          j["target"] = o.target;
        } else if constexpr (std::is_same_v<T, op::JmpInd>) {
          j["src"] = o.src;
        }
      },
      top);
  return j;
}

class OpReader {
 public:
  OpReader(const json& j, std::string ctx) : j_(j), ctx_(std::move(ctx)) {}

  void keys(std::initializer_list<std::string_view> required) {
    std::vector<std::string_view> all{"op"};
    all.insert(all.end(), required.begin(), required.end());
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (std::find(all.begin(), all.end(), key) == all.end())
        json_util::schema_error(ctx_, "unknown key '" + key + "'");
    }
    for (auto key : required)
      if (!j_.contains(key)) json_util::schema_error(ctx_, "missing key '" + std::string(key) + "'");
  }
  Reg reg(std::string_view key) const {
    const std::uint32_t r = json_util::get_u32(j_, key, ctx_);
    if (r >= kRegisterCount) json_util::schema_error(ctx_, std::string(key) + " is not a register");
    return static_cast<Reg>(r);
  }
  std::uint32_t u32(std::string_view key) const { return json_util::get_u32(j_, key, ctx_); }
  std::uint64_t u64(std::string_view key) const {
    const std::int64_t v = json_util::get_i64(j_, key, ctx_);
    if (v < 0) json_util::schema_error(ctx_, std::string(key) + " must be non-negative");
    return static_cast<std::uint64_t>(v);
  }
  std::int32_t i32(std::string_view key) const {
    const std::int64_t v = json_util::get_i64(j_, key, ctx_);
    if (v < INT32_MIN || v > INT32_MAX) json_util::schema_error(ctx_, std::string(key) + " out of range");
    return static_cast<std::int32_t>(v);
  }
  std::uint32_t hex32(std::string_view key) const { return json_util::get_hex_u32(j_, key, ctx_); }
  std::string str(std::string_view key) const { return json_util::get_string(j_, key, ctx_); }
  bool boolean(std::string_view key) const { return json_util::get_bool(j_, key, ctx_); }
  AluOp alu() const {
    auto op = parse_alu(str("alu"));
    if (!op) json_util::schema_error(ctx_, "unknown alu operation");
    return *op;
  }
  BranchCond cond() const {
    auto c = parse_cond(str("cond"));
    if (!c) json_util::schema_error(ctx_, "unknown branch condition");
    return *c;
  }

 private:
  const json& j_;
  std::string ctx_;
};

TargetOp op_from_json(const json& j, const std::string& ctx) {
  if (!j.is_object()) json_util::schema_error(ctx, "expected an object");
  OpReader r(j, ctx);
  const std::string name = json_util::get_string(j, "op", ctx);
  if (name == "SYNC_START") {
    r.keys({"cycles"});
    return op::SyncStart{r.u64("cycles")};
  }
  if (name == "SYNC_WAIT") {
    r.keys({});
    return op::SyncWait{};
  }
  if (name == "CORR_ADD") {
    r.keys({"cycles"});
    return op::CorrAdd{r.u64("cycles")};
  }
  if (name == "CORR_FLUSH") {
    r.keys({});
    return op::CorrFlush{};
  }
  if (name == "CACHE_CHECK") {
    r.keys({"tag", "index"});
    return op::CacheCheck{r.u32("tag"), r.u32("index")};
  }
  if (name == "BR_CHECK") {
    r.keys({"cond", "lhs", "rhs", "taken", "not_taken"});
    return op::BrCheck{r.cond(), r.reg("lhs"), r.reg("rhs"), r.u32("taken"), r.u32("not_taken")};
  }
  if (name == "NOP") {
    r.keys({});
    return op::Nop{};
  }
  if (name == "ALU") {
    r.keys({"alu", "dst", "lhs", "rhs"});
    return op::Alu{r.alu(), r.reg("dst"), r.reg("lhs"), r.reg("rhs")};
  }
  if (name == "ALU_IMM") {
    r.keys({"alu", "dst", "src", "imm"});
    return op::AluImm{r.alu(), r.reg("dst"), r.reg("src"), r.i32("imm")};
  }
  if (name == "MOVI") {
    r.keys({"dst", "value"});
    return op::Movi{r.reg("dst"), r.hex32("value")};
  }
  if (name == "LOAD") {
    r.keys({"dst", "base", "offset", "src_addr", "dst_addr"});
    return op::Load{r.reg("dst"), r.reg("base"), r.i32("offset"), r.hex32("src_addr"),
                    r.hex32("dst_addr")};
  }
  if (name == "STORE") {
    r.keys({"value", "base", "offset", "src_addr", "dst_addr"});
    return op::Store{r.reg("value"), r.reg("base"), r.i32("offset"), r.hex32("src_addr"),
                     r.hex32("dst_addr")};
  }
  if (name == "BUS_RD") {
    r.keys({"device", "offset", "dst", "base", "disp", "src_addr"});
    return op::BusRead{r.str("device"), r.hex32("offset"), r.reg("dst"),
                       r.reg("base"),   r.i32("disp"),     r.hex32("src_addr")};
  }
  if (name == "BUS_WR") {
    r.keys({"device", "offset", "value", "base", "disp", "src_addr"});
    return op::BusWrite{r.str("device"), r.hex32("offset"), r.reg("value"),
                        r.reg("base"),   r.i32("disp"),     r.hex32("src_addr")};
  }
  if (name == "ADDR_DISPATCH") {
    r.keys({"store", "data", "base", "offset"});
    return op::AddrDispatch{r.boolean("store"), r.reg("data"), r.reg("base"), r.i32("offset")};
  }
  if (name == "BR") {
    r.keys({"cond", "lhs", "rhs", "taken", "fallthrough"});
    return op::Br{r.cond(), r.reg("lhs"), r.reg("rhs"), r.u32("taken"), r.u32("fallthrough")};
  }
  if (name == "JMP") {
    r.keys({"target"});
    return op::Jmp{r.u32("target")};
  }
  if (name == "JMP_IND") {
    r.keys({"src"});
    return op::JmpInd{r.reg("src")};
  }
  if (name == "DEBUG_TRAP") {
    r.keys({});
    return op::DebugTrap{};
  }
  if (name == "HALT_T") {
    r.keys({});
    return op::Halt{};
  }
  json_util::schema_error(ctx, "unknown op '" + name + "'");
}

void check_structure(const TranslatedProgram& prog) {
  const std::size_t n = prog.blocks.size();
  if (n == 0) throw Error(ErrorCode::kSchema, "translated program has no blocks");
  if (prog.entry_block >= n) throw Error(ErrorCode::kSchema, "entry_block out of range");
  const auto check_target = [&](BlockId id, const std::string& ctx) {
    if (id >= n) throw Error(ErrorCode::kSchema, ctx + ": branch target " + std::to_string(id) +
                                                     " does not exist");
  };
  for (std::size_t b = 0; b < n; ++b) {
    const auto& blk = prog.blocks[b];
    const std::string ctx = "blocks[" + std::to_string(b) + "]";
    if (blk.id != b) throw Error(ErrorCode::kSchema, ctx + ": ids must be consecutive");
    if (blk.ops.empty() || !std::holds_alternative<op::SyncStart>(blk.ops.front()))
      throw Error(ErrorCode::kSchema, ctx + ": must start with SYNC_START");
    for (const auto& o : blk.ops) {
      if (const auto* br = std::get_if<op::Br>(&o)) {
        check_target(br->taken, ctx);
        check_target(br->fallthrough, ctx);
      } else if (const auto* j = std::get_if<op::Jmp>(&o)) {
        check_target(j->target, ctx);
      }
    }
  }
  for (const auto& [addr, id] : prog.addr_map) check_target(id, "addr_map " + hex(addr));
  for (unsigned r = 0; r < kRegisterCount; ++r)
    if (prog.reg_map[r] >= kRegisterCount)
      throw Error(ErrorCode::kSchema, "reg_map entry out of range");
  if ((prog.level == DetailLevel::kBranchICache) != prog.cache.has_value())
    throw Error(ErrorCode::kSchema, "cache descriptor must be present exactly at level 3");
}

}  // namespace

std::string serialize_program(const TranslatedProgram& prog) {
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = TranslatedProgram::kFormatVersion;
  doc["level"] = static_cast<int>(prog.level);
  doc["variant"] = to_string(prog.variant);
  doc["entry_block"] = prog.entry_block;
  doc["reg_map"] = std::vector<int>(prog.reg_map.begin(), prog.reg_map.end());
  if (prog.cache) {
    doc["cache"] = {{"sets", prog.cache->sets},
                    {"ways", prog.cache->ways},
                    {"block_bytes", prog.cache->block_bytes},
                    {"miss_penalty", prog.cache->miss_penalty}};
  }
  json addr_map = json::array();
  for (const auto& [addr, id] : prog.addr_map) addr_map.push_back({hex(addr), id});
  doc["addr_map"] = addr_map;

  ProgramImage memory;
  memory.entry = prog.blocks.empty() ? 0 : prog.blocks[prog.entry_block].src_start;
  memory.sections = prog.sections;
  memory.memory_map = prog.memory_map;
  memory.bus_map = prog.bus_map;
  doc["memory"] = json::parse(store_image(memory));

  json blocks = json::array();
  for (const auto& b : prog.blocks) {
    json ops = json::array();
    for (const auto& o : b.ops) ops.push_back(op_to_json(o));
    blocks.push_back({{"id", b.id},
                      {"src_start", hex(b.src_start)},
                      {"src_end", hex(b.src_end)},
                      {"src_count", b.src_count},
                      {"ops", std::move(ops)}});
  }
  doc["blocks"] = std::move(blocks);
  return doc.dump(1) + "\n";
}

TranslatedProgram parse_program(std::string_view json_text) {
  using namespace json_util;
  const json doc = parse(json_text, "translated program");
  check_keys(doc, "translated program",
             {"format", "version", "level", "variant", "entry_block", "reg_map", "addr_map",
              "memory", "blocks"},
             {"cache"});
  if (get_string(doc, "format", "translated program") != kFormatName)
    schema_error("translated program", "not a translated program document");
  if (get_i64(doc, "version", "translated program") != TranslatedProgram::kFormatVersion)
    schema_error("translated program", "unsupported version");

  TranslatedProgram prog;
  const auto level = parse_level(static_cast<int>(get_i64(doc, "level", "translated program")));
  if (!level) schema_error("translated program", "level must be 1, 2 or 3");
  prog.level = *level;
  const std::string variant = get_string(doc, "variant", "translated program");
  if (variant == "block_oriented") prog.variant = Variant::kBlockOriented;
  else if (variant == "instruction_oriented") prog.variant = Variant::kInstructionOriented;
  else schema_error("translated program", "unknown variant '" + variant + "'");
  prog.entry_block = get_u32(doc, "entry_block", "translated program");

  const json& regs = doc["reg_map"];
  if (!regs.is_array() || regs.size() != kRegisterCount)
    schema_error("reg_map", "expected " + std::to_string(kRegisterCount) + " entries");
  for (unsigned r = 0; r < kRegisterCount; ++r) {
    if (!regs[r].is_number_unsigned()) schema_error("reg_map", "expected register numbers");
    const auto v = regs[r].get<std::uint64_t>();
    prog.reg_map[r] = static_cast<Reg>(v >= kRegisterCount ? kRegisterCount : v);
  }

  if (doc.contains("cache")) {
    const json& c = doc["cache"];
    check_keys(c, "cache", {"sets", "ways", "block_bytes", "miss_penalty"});
    CacheSpec spec{get_u32(c, "sets", "cache"), get_u32(c, "ways", "cache"),
                   get_u32(c, "block_bytes", "cache"), get_u32(c, "miss_penalty", "cache")};
    const auto pow2 = [](std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; };
    if (!pow2(spec.sets) || !pow2(spec.block_bytes) || spec.block_bytes < 4 || spec.ways == 0)
      schema_error("cache", "invalid geometry");
    prog.cache = spec;
  }

  const json& am = doc["addr_map"];
  if (!am.is_array()) schema_error("addr_map", "expected a list");
  for (const auto& entry : am) {
    if (!entry.is_array() || entry.size() != 2 || !entry[1].is_number_unsigned())
      schema_error("addr_map", "entries are [address, block] pairs");
    prog.addr_map[parse_hex_u32(entry[0], "addr_map")] = entry[1].get<BlockId>();
  }

  const ProgramImage memory = load_image(doc["memory"].dump());
  prog.sections = memory.sections;
  prog.memory_map = memory.memory_map;
  prog.bus_map = memory.bus_map;

  const json& blocks = doc["blocks"];
  if (!blocks.is_array()) schema_error("blocks", "expected a list");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string ctx = "blocks[" + std::to_string(b) + "]";
    const json& jb = blocks[b];
    check_keys(jb, ctx, {"id", "src_start", "src_end", "src_count", "ops"});
    TranslatedBlock tb;
    tb.id = get_u32(jb, "id", ctx);
    tb.src_start = get_hex_u32(jb, "src_start", ctx);
    tb.src_end = get_hex_u32(jb, "src_end", ctx);
    tb.src_count = get_u32(jb, "src_count", ctx);
    const json& ops = jb["ops"];
    if (!ops.is_array()) schema_error(ctx + ".ops", "expected a list");
    for (std::size_t i = 0; i < ops.size(); ++i)
      tb.ops.push_back(op_from_json(ops[i], ctx + ".ops[" + std::to_string(i) + "]"));
    prog.blocks.push_back(std::move(tb));
  }
  check_structure(prog);
  return prog;
}

}  // namespace cabt
