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

#include "cabt/assembler.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "cabt/error.hpp"
#include "json_util.hpp"

namespace cabt {

namespace {

struct Statement {
  int line = 0;
  std::string text;  // trimmed source without comment
  std::vector<std::string> labels;
  std::string op;    // mnemonic or directive, lower case
  std::vector<std::string> args;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::kSyntax, "line " + std::to_string(line) + ": " + msg);
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

// Removes a trailing comment, respecting quotes.
std::string strip_comment(std::string_view s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == ';' || c == '#') {
      return std::string(s.substr(0, i));
    }
  }
  return std::string(s);
}

std::vector<std::string> split_args(std::string_view s, int line) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      cur += c;
      if (c == '\\' && i + 1 < s.size()) cur += s[++i];
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quote) fail(line, "unterminated quote");
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  for (const auto& a : out)
    if (a.empty()) fail(line, "empty operand");
  return out;
}

Statement parse_line(std::string_view raw, int line) {
  Statement st;
  st.line = line;
  std::string s = trim(strip_comment(raw));
  st.text = s;
  // Leading labels.
  for (;;) {
    std::size_t i = 0;
    if (s.empty() || !is_ident_start(s[0])) break;
    while (i < s.size() && is_ident(s[i])) ++i;
    if (i < s.size() && s[i] == ':') {
      st.labels.push_back(s.substr(0, i));
      s = trim(std::string_view(s).substr(i + 1));
    } else {
      break;
    }
  }
  if (s.empty()) return st;
  std::size_t i = 0;
  while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  st.op = lower(s.substr(0, i));
  st.args = split_args(std::string_view(s).substr(i), line);
  return st;
}

std::optional<Reg> parse_reg(std::string_view s) {
  const std::string r = lower(trim(s));
  if (r == "lr") return kLinkRegister;
  if (r == "zero") return Reg{0};
  if (r.size() < 2 || r[0] != 'r') return std::nullopt;
  unsigned v = 0;
  auto [p, ec] = std::from_chars(r.data() + 1, r.data() + r.size(), v);
  if (ec != std::errc() || p != r.data() + r.size() || v >= kRegisterCount) return std::nullopt;
  return static_cast<Reg>(v);
}

std::string unescape(std::string_view quoted, int line) {
  if (quoted.size() < 2 || quoted.front() != quoted.back())
    fail(line, "malformed literal " + std::string(quoted));
  std::string out;
  for (std::size_t i = 1; i + 1 < quoted.size(); ++i) {
    char c = quoted[i];
    if (c == '\\') {
      if (i + 2 >= quoted.size()) fail(line, "dangling escape");
      switch (quoted[++i]) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case 'r': c = '\r'; break;
        case '0': c = '\0'; break;
        case '\\': c = '\\'; break;
        case '"': c = '"'; break;
        case '\'': c = '\''; break;
        default: fail(line, "unknown escape");
      }
    }
    out += c;
  }
  return out;
}

using Labels = std::map<std::string, std::uint32_t>;

struct Value {
  std::uint32_t value = 0;
  bool uses_labels = false;
};

// Evaluates `term (+|- term)*`. With `labels` null, unknown labels evaluate
// to 0 and only mark the value as label-dependent.
Value eval(std::string_view expr, const Labels* labels, int line) {
  const std::string e = trim(expr);
  if (e.empty()) fail(line, "missing expression");
  Value out;
  std::size_t i = 0;
  bool negate = false;
  bool expect_term = true;
  while (i < e.size()) {
    const char c = e[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (expect_term) {
      if (c == '-' || c == '+') {
        if (c == '-') negate = !negate;
        ++i;
        continue;
      }
      std::uint32_t term = 0;
      if (c == '\'') {
        const std::size_t close = e.find('\'', i + 2 + (e[i + 1] == '\\' ? 1 : 0));
        if (close == std::string::npos) fail(line, "unterminated character literal");
        const std::string ch = unescape(std::string_view(e).substr(i, close - i + 1), line);
        if (ch.size() != 1) fail(line, "character literal must hold one character");
        term = static_cast<unsigned char>(ch[0]);
        i = close + 1;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        int base = 10;
        std::size_t start = i;
        if (c == '0' && i + 1 < e.size() && (e[i + 1] == 'x' || e[i + 1] == 'X')) {
          base = 16;
          start = i + 2;
        } else if (c == '0' && i + 1 < e.size() && (e[i + 1] == 'b' || e[i + 1] == 'B')) {
          base = 2;
          start = i + 2;
        }
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(e.data() + start, e.data() + e.size(), v, base);
        if (ec != std::errc() || p == e.data() + start || v > 0xffffffffULL)
          fail(line, "bad number in '" + e + "'");
        if (p < e.data() + e.size() && is_ident(*p)) fail(line, "bad number in '" + e + "'");
        term = static_cast<std::uint32_t>(v);
        i = static_cast<std::size_t>(p - e.data());
      } else if (is_ident_start(c)) {
        std::size_t j = i;
        while (j < e.size() && is_ident(e[j])) ++j;
        const std::string name = e.substr(i, j - i);
        if (parse_reg(name)) fail(line, "register '" + name + "' used as a value");
        out.uses_labels = true;
        if (labels) {
          auto it = labels->find(name);
          if (it == labels->end()) fail(line, "undefined label '" + name + "'");
          term = it->second;
        }
        i = j;
      } else {
        fail(line, "unexpected '" + std::string(1, c) + "' in expression");
      }
      out.value += negate ? 0u - term : term;
      negate = false;
      expect_term = false;
    } else {
      if (c != '+' && c != '-') fail(line, "expected + or - in '" + e + "'");
      negate = c == '-';
      ++i;
      expect_term = true;
    }
  }
  if (expect_term) fail(line, "expression ends with an operator");
  return out;
}

std::int32_t sext16(std::uint32_t v) { return static_cast<std::int16_t>(v & 0xffff); }

bool fits_i16(std::uint32_t v) {
  const auto s = static_cast<std::int32_t>(v);
  return s >= -32768 && s <= 32767;
}

struct SectionBuild {
  std::string name;
  std::uint32_t base = 0;
  bool exec = false;
  std::vector<std::uint8_t> bytes;
  std::uint32_t lc() const { return base + static_cast<std::uint32_t>(bytes.size()); }
};

class Assembler {
 public:
  Assembler(std::string_view source, const ProcessorDescription& desc) : desc_(desc) {
    std::istringstream in{std::string(source)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) statements_.push_back(parse_line(raw, ++line));
  }

  AssemblyResult run();

 private:
  void pass(bool final);
  void select_section(const Statement& st, const std::string& name, std::uint32_t base, bool exec,
                      bool has_base);
  SectionBuild& current(const Statement& st) {
    // Code before any section directive goes to .text at 0x0.
    if (cur_ < 0) select_section(st, ".text", 0, true, true);
    return sections_[static_cast<std::size_t>(cur_)];
  }
  void emit_word(const Statement& st, std::uint32_t word, bool final);
  void emit_instr(const Statement& st, std::string_view mnemonic, const DecodedFields& f,
                  bool final);
  void instruction(const Statement& st, bool final);
  std::uint32_t value(const Statement& st, std::string_view expr, bool final) const {
    return eval(expr, final ? &labels_ : nullptr, st.line).value;
  }
  Reg reg(const Statement& st, std::string_view s) const {
    auto r = parse_reg(s);
    if (!r) fail(st.line, "expected a register, got '" + std::string(s) + "'");
    return *r;
  }
  void arity(const Statement& st, std::size_t n) const {
    if (st.args.size() != n)
      fail(st.line, "'" + st.op + "' takes " + std::to_string(n) + " operand(s)");
  }

  const ProcessorDescription& desc_;
  std::vector<Statement> statements_;
  std::vector<SectionBuild> sections_;
  int cur_ = -1;
  Labels labels_;
  std::optional<std::string> entry_expr_;
  MemoryMap memory_;
  BusMap bus_;
  std::string listing_;
};

void Assembler::select_section(const Statement& st, const std::string& name, std::uint32_t base,
                               bool exec, bool has_base) {
  for (std::size_t i = 0; i < sections_.size(); ++i) {
    if (sections_[i].name == name) {
      if (has_base && sections_[i].base != base)
        fail(st.line, "section " + name + " reopened at a different base");
      cur_ = static_cast<int>(i);
      return;
    }
  }
  if (!has_base) fail(st.line, "section " + name + " needs a base address");
  sections_.push_back(SectionBuild{name, base, exec, {}});
  cur_ = static_cast<int>(sections_.size() - 1);
}

void Assembler::emit_word(const Statement& st, std::uint32_t word, bool final) {
  SectionBuild& sec = current(st);
  if (final) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%08x  %08x  ", sec.lc(), word);
    listing_ += buf + st.text + "\n";
  }
  for (int i = 0; i < 4; ++i) sec.bytes.push_back(static_cast<std::uint8_t>(word >> (8 * i)));
}

void Assembler::emit_instr(const Statement& st, std::string_view mnemonic, const DecodedFields& f,
                           bool final) {
  const InstructionDef* def = desc_.by_mnemonic(mnemonic);
  if (def == nullptr) fail(st.line, "unknown instruction '" + std::string(mnemonic) + "'");
  std::uint32_t word = 0;
  if (final) {
    try {
      word = encode(*def, f);
    } catch (const Error& e) {
      fail(st.line, e.what());
    }
  }
  emit_word(st, word, final);
}

void Assembler::instruction(const Statement& st, bool final) {
  SectionBuild& sec = current(st);
  if (sec.lc() % 4 != 0) fail(st.line, "instruction is not word aligned");

  if (st.op == "mov") {
    arity(st, 2);
    emit_instr(st, "add", DecodedFields{reg(st, st.args[0]), reg(st, st.args[1]), 0, 0}, final);
    return;
  }
  if (st.op == "li" || st.op == "la") {
    arity(st, 2);
    const Reg rd = reg(st, st.args[0]);
    const Value v = eval(st.args[1], final ? &labels_ : nullptr, st.line);
    if (st.op == "li" && !v.uses_labels && fits_i16(v.value)) {
      emit_instr(st, "addi", DecodedFields{rd, 0, 0, sext16(v.value)}, final);
      return;
    }
    const std::int32_t lo = sext16(v.value);
    const std::int32_t hi = sext16((v.value - static_cast<std::uint32_t>(lo)) >> 16);
    emit_instr(st, "lui", DecodedFields{rd, 0, 0, hi}, final);
    emit_instr(st, "addi", DecodedFields{rd, rd, 0, lo}, final);
    return;
  }

  const InstructionDef* def = desc_.by_mnemonic(st.op);
  if (def == nullptr) fail(st.line, "unknown instruction '" + st.op + "'");
  const std::uint32_t pc = sec.lc();
  DecodedFields f;
  const auto branch_offset = [&](std::string_view expr) -> std::int32_t {
    if (!final) return 0;
    const std::uint32_t target = value(st, expr, final);
    const std::int64_t delta = static_cast<std::int64_t>(target) - (static_cast<std::int64_t>(pc) + 4);
    if (delta % 4 != 0) fail(st.line, "branch target is not word aligned");
    return static_cast<std::int32_t>(delta / 4);
  };
  const auto immediate = [&](std::string_view expr) -> std::int32_t {
    const std::uint32_t v = value(st, expr, final);
    if (final && !fits_i16(v)) fail(st.line, "immediate out of range");
    return static_cast<std::int32_t>(v);
  };

  switch (def->op) {
    case MicroOp::kNop:
    case MicroOp::kHalt:
      arity(st, 0);
      break;
    case MicroOp::kAdd: case MicroOp::kSub: case MicroOp::kMul: case MicroOp::kAnd:
    case MicroOp::kOr: case MicroOp::kXor: case MicroOp::kShl: case MicroOp::kShr:
      arity(st, 3);
      f = {reg(st, st.args[0]), reg(st, st.args[1]), reg(st, st.args[2]), 0};
      break;
    case MicroOp::kJumpReg:
      arity(st, 1);
      f.rs1 = reg(st, st.args[0]);
      break;
    case MicroOp::kAddImm:
      arity(st, 3);
      f = {reg(st, st.args[0]), reg(st, st.args[1]), 0, immediate(st.args[2])};
      break;
    case MicroOp::kLoadUpper: {
      arity(st, 2);
      f.rd = reg(st, st.args[0]);
      const std::uint32_t v = value(st, st.args[1], final);
      if (final && !fits_i16(v) && v > 0xffff) fail(st.line, "lui immediate out of range");
      f.imm = sext16(v);
      break;
    }
    case MicroOp::kLoad:
    case MicroOp::kStore: {
      arity(st, 2);
      f.rd = reg(st, st.args[0]);
      std::string m = trim(st.args[1]);
      if (m.size() < 3 || m.front() != '[' || m.back() != ']')
        fail(st.line, "expected a memory operand [rN+offset]");
      m = trim(std::string_view(m).substr(1, m.size() - 2));
      std::size_t split = 0;
      while (split < m.size() && is_ident(m[split])) ++split;
      f.rs1 = reg(st, m.substr(0, split));
      const std::string rest = trim(std::string_view(m).substr(split));
      if (!rest.empty()) {
        if (rest[0] != '+' && rest[0] != '-') fail(st.line, "expected +/- after base register");
        f.imm = immediate(rest[0] == '+' ? std::string_view(rest).substr(1) : std::string_view(rest));
      }
      break;
    }
    case MicroOp::kBranchEq:
    case MicroOp::kBranchNe:
    case MicroOp::kBranchLt:
      arity(st, 3);
      f = {reg(st, st.args[0]), reg(st, st.args[1]), 0, branch_offset(st.args[2])};
      break;
    case MicroOp::kJump:
    case MicroOp::kCall:
      arity(st, 1);
      f.imm = branch_offset(st.args[0]);
      break;
  }
  emit_instr(st, def->mnemonic, f, final);
}

void Assembler::pass(bool final) {
  sections_.clear();
  cur_ = -1;
  listing_.clear();
  if (final) {
    memory_ = MemoryMap{};
    bus_ = BusMap{};
    entry_expr_.reset();
  }
  for (const Statement& st : statements_) {
    for (const auto& label : st.labels) {
      const std::uint32_t here = current(st).lc();
      if (!final) {
        if (!labels_.emplace(label, here).second) fail(st.line, "duplicate label '" + label + "'");
      } else if (labels_.at(label) != here) {
        fail(st.line, "label '" + label + "' moved between passes");
      }
    }
    if (st.op.empty()) continue;
    const auto& a = st.args;
    if (st.op == ".text" || st.op == ".data") {
      if (a.size() > 1) fail(st.line, st.op + " takes at most a base address");
      select_section(st, st.op, a.empty() ? 0 : value(st, a[0], true), st.op == ".text", !a.empty());
    } else if (st.op == ".section") {
      if (a.empty()) fail(st.line, ".section needs a name");
      std::istringstream words(a[0]);
      std::string name, base_s, flag;
      words >> name >> base_s >> flag;
      if (flag != "" && flag != "exec") fail(st.line, "unknown section flag '" + flag + "'");
      select_section(st, name, base_s.empty() ? 0 : value(st, base_s, true), flag == "exec",
                     !base_s.empty());
    } else if (st.op == ".entry") {
      arity(st, 1);
      if (final) entry_expr_ = a[0];
    } else if (st.op == ".memory") {
      std::istringstream words(a.size() == 1 ? a[0] : "");
      std::string lo, hi, dst, kind;
      if (!(words >> lo >> hi >> dst >> kind)) fail(st.line, ".memory src_base src_end dst_base RAM|ROM");
      if (final) {
        const std::string k = lower(kind);
        if (k != "ram" && k != "rom") fail(st.line, "region kind must be RAM or ROM");
        memory_.regions.push_back(MemoryRegion{value(st, lo, true), value(st, hi, true),
                                               value(st, dst, true),
                                               k == "ram" ? RegionKind::kRam : RegionKind::kRom});
      }
    } else if (st.op == ".bus") {
      std::istringstream words(a.size() == 1 ? a[0] : "");
      std::string lo, hi, dev;
      if (!(words >> lo >> hi >> dev)) fail(st.line, ".bus base end device");
      if (final) bus_.io_regions.push_back(IoRegion{value(st, lo, true), value(st, hi, true), dev});
    } else if (st.op == ".word") {
      if (a.empty()) fail(st.line, ".word needs values");
      for (const auto& e : a) emit_word(st, value(st, e, final), final);
    } else if (st.op == ".ascii" || st.op == ".asciz") {
      arity(st, 1);
      std::string s = unescape(a[0], st.line);
      if (st.op == ".asciz") s.push_back('\0');
      while (s.size() % 4 != 0) s.push_back('\0');
      for (std::size_t i = 0; i < s.size(); i += 4) {
        std::uint32_t w = 0;
        for (int b = 0; b < 4; ++b) w |= std::uint32_t{static_cast<unsigned char>(s[i + b])} << (8 * b);
        emit_word(st, w, final);
      }
    } else if (st.op == ".space") {
      arity(st, 1);
      const std::uint32_t n = value(st, a[0], true);
      for (std::uint32_t i = 0; i < (n + 3) / 4; ++i) emit_word(st, 0, final);
    } else if (st.op[0] == '.') {
      fail(st.line, "unknown directive '" + st.op + "'");
    } else {
      instruction(st, final);
    }
  }
}

AssemblyResult Assembler::run() {
  pass(false);
  pass(true);

  AssemblyResult out;
  ProgramImage& img = out.image;
  for (auto& s : sections_) img.sections.push_back(Section{s.name, s.base, std::move(s.bytes), s.exec});
  std::stable_sort(img.sections.begin(), img.sections.end(),
                   [](const Section& x, const Section& y) { return x.base < y.base; });
  if (entry_expr_) {
    img.entry = eval(*entry_expr_, &labels_, 0).value;
  } else {
    auto it = std::find_if(img.sections.begin(), img.sections.end(),
                           [](const Section& s) { return s.executable; });
    if (it == img.sections.end()) throw Error(ErrorCode::kSyntax, "program has no code section");
    img.entry = it->base;
  }
  img.symbols.insert(labels_.begin(), labels_.end());
  img.memory_map = memory_.regions.empty() ? default_memory_map() : memory_;
  img.bus_map = bus_;
  validate(img);
  out.listing = std::move(listing_);
  return out;
}

std::string reg_name(Reg r) { return "r" + std::to_string(r); }

}  // namespace

AssemblyResult assemble(std::string_view source, const ProcessorDescription& desc) {
  return Assembler(source, desc).run();
}

std::string disassemble(std::uint32_t word, std::uint32_t pc, const ProcessorDescription& desc) {
  Decoded d;
  try {
    d = lookup_decode(desc, word);
  } catch (const Error&) {
    return ".word " + json_util::hex(word);
  }
  const DecodedFields& f = d.fields;
  const std::string& m = d.def->mnemonic;
  const std::string target = json_util::hex(pc + 4 + static_cast<std::uint32_t>(f.imm) * 4);
  switch (d.def->op) {
    case MicroOp::kNop:
    case MicroOp::kHalt:
      return m;
    case MicroOp::kJumpReg:
      return m + " " + reg_name(f.rs1);
    case MicroOp::kAddImm:
      return m + " " + reg_name(f.rd) + ", " + reg_name(f.rs1) + ", " + std::to_string(f.imm);
    case MicroOp::kLoadUpper:
      return m + " " + reg_name(f.rd) + ", " + json_util::hex(static_cast<std::uint32_t>(f.imm) & 0xffff);
    case MicroOp::kLoad:
    case MicroOp::kStore: {
      std::string disp;
      if (f.imm > 0) disp = "+" + std::to_string(f.imm);
      if (f.imm < 0) disp = std::to_string(f.imm);
      return m + " " + reg_name(f.rd) + ", [" + reg_name(f.rs1) + disp + "]";
    }
    case MicroOp::kBranchEq:
    case MicroOp::kBranchNe:
    case MicroOp::kBranchLt:
      return m + " " + reg_name(f.rd) + ", " + reg_name(f.rs1) + ", " + target;
    case MicroOp::kJump:
    case MicroOp::kCall:
      return m + " " + target;
    default:
      return m + " " + reg_name(f.rd) + ", " + reg_name(f.rs1) + ", " + reg_name(f.rs2);
  }
}

std::string disassemble_image(const ProgramImage& image, const ProcessorDescription& desc) {
  std::string out;
  char buf[32];
  for (const Section& s : image.sections) {
    if (!s.executable) continue;
    for (std::size_t off = 0; off + 4 <= s.bytes.size(); off += 4) {
      const std::uint8_t* p = s.bytes.data() + off;
      const std::uint32_t word = std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 |
                                 std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
      const std::uint32_t pc = s.base + static_cast<std::uint32_t>(off);
      std::snprintf(buf, sizeof buf, "%08x  %08x  ", pc, word);
      out += buf + disassemble(word, pc, desc) + "\n";
    }
  }
  return out;
}

}  // namespace cabt
