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

#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cabt/error.hpp"
#include "cabt/procdesc.hpp"
#include "test_support.hpp"

namespace cabt {
namespace {

namespace ref = testing::ref;

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

ErrorCode load_error(const std::string& text, std::string* message = nullptr) {
  try {
    load_description(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "description loaded";
  return ErrorCode::kInternal;
}

TEST(ProcDesc, BundledFileLoads) {
  const ProcessorDescription desc = load_description_file(std::string(CABT_DATA_DIR) + "/tk32.json");
  EXPECT_EQ(desc.instructions.size(), 20u);
  EXPECT_EQ(desc.pipeline.issue_width, 1u);
  EXPECT_EQ(desc, tk32_description());
}

TEST(ProcDesc, DuplicateOpcodeRejected) {
  const std::string text = replace_once(store_description(tk32_description()), "\"opcode\": 2,",
                                        "\"opcode\": 1,");
  std::string message;
  EXPECT_EQ(load_error(text, &message), ErrorCode::kSemantic);
  EXPECT_NE(message.find("duplicate opcode"), std::string::npos) << message;
}

TEST(ProcDesc, NonPowerOfTwoSetsRejected) {
  const std::string text =
      replace_once(store_description(tk32_description()), "\"sets\": 16", "\"sets\": 3");
  std::string message;
  EXPECT_EQ(load_error(text, &message), ErrorCode::kSemantic);
  EXPECT_NE(message.find("sets not a power of two"), std::string::npos) << message;
}

TEST(ProcDesc, UnknownTimingClassRejected) {
  const std::string text = replace_once(store_description(tk32_description()),
                                        "\"timing_class\": \"mul\"", "\"timing_class\": \"fpu\"");
  EXPECT_EQ(load_error(text), ErrorCode::kSemantic);
}

TEST(ProcDesc, MalformedDocumentIsSchemaError) {
  EXPECT_EQ(load_error("{\"name\": 3"), ErrorCode::kSchema);
  EXPECT_EQ(load_error("[]"), ErrorCode::kSchema);
}

TEST(ProcDesc, MissingFileIsIoError) {
  try {
    load_description_file("/nonexistent/tk32.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(ProcDesc, LoaderIsDeterministic) {
  const std::string text = store_description(tk32_description());
  EXPECT_EQ(load_description(text), load_description(text));
  EXPECT_EQ(store_description(load_description(text)), text);
}

TEST(Decode, ZeroWordIsNop) {
  const ProcessorDescription desc = tk32_description();
  const Decoded d = lookup_decode(desc, 0x00000000);
  ASSERT_NE(d.def, nullptr);
  EXPECT_EQ(d.def->op, MicroOp::kNop);
}

TEST(Decode, AddFromIndependentEncoder) {
  const ProcessorDescription desc = tk32_description();
  const Decoded d = lookup_decode(desc, ref::r(ref::ADD, 1, 2, 3));
  ASSERT_NE(d.def, nullptr);
  EXPECT_EQ(d.def->op, MicroOp::kAdd);
  EXPECT_EQ(d.fields.rd, 1);
  EXPECT_EQ(d.fields.rs1, 2);
  EXPECT_EQ(d.fields.rs2, 3);
  EXPECT_EQ(encode(*desc.by_mnemonic("add"), {1, 2, 3, 0}), ref::r(ref::ADD, 1, 2, 3));
}

TEST(Decode, Opcode63IsIllegal) {
  try {
    lookup_decode(tk32_description(), 0xFC000000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIllegalInstruction);
  }
}

TEST(Decode, EncoderAgreesWithReferenceEncoder) {
  const ProcessorDescription desc = tk32_description();
  EXPECT_EQ(encode(*desc.by_mnemonic("addi"), {4, 5, 0, -3}), ref::i(ref::ADDI, 4, 5, -3));
  EXPECT_EQ(encode(*desc.by_mnemonic("beq"), {1, 2, 0, 5}), ref::i(ref::BEQ, 1, 2, 5));
  EXPECT_EQ(encode(*desc.by_mnemonic("j"), {0, 0, 0, -4}), ref::j(ref::J, -4));
  EXPECT_EQ(encode(*desc.by_mnemonic("halt"), {}), ref::i(ref::HALT, 0, 0, 0));
}

// decode(encode(i)) == i over random legal operand assignments.
TEST(DecodeProperty, RoundTrip) {
  const ProcessorDescription desc = tk32_description();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> reg(0, 15);
  std::uniform_int_distribution<std::int32_t> imm16(-0x8000, 0x7fff);
  std::uniform_int_distribution<std::int32_t> imm26(-(1 << 25), (1 << 25) - 1);
  for (int n = 0; n < 20000; ++n) {
    const InstructionDef& def = desc.instructions[static_cast<std::size_t>(n) % desc.instructions.size()];
    DecodedFields f;
    switch (def.format) {
      case Format::kR:
        f.rd = static_cast<Reg>(reg(rng));
        f.rs1 = static_cast<Reg>(reg(rng));
        f.rs2 = static_cast<Reg>(reg(rng));
        break;
      case Format::kI:
        f.rd = static_cast<Reg>(reg(rng));
        f.rs1 = static_cast<Reg>(reg(rng));
        f.imm = imm16(rng);
        break;
      case Format::kJ:
        f.imm = imm26(rng);
        break;
    }
    const Decoded d = lookup_decode(desc, encode(def, f));
    ASSERT_EQ(d.def, &def);
    ASSERT_EQ(d.fields, f) << def.mnemonic;
  }
}

TEST(DecodeProperty, RegisterTopBitMustBeClear) {
  const ProcessorDescription desc = tk32_description();
  // rd field = 16 has the reserved top bit set.
  EXPECT_THROW(lookup_decode(desc, ref::r(ref::ADD, 16, 0, 0)), Error);
}

}  // namespace
}  // namespace cabt
