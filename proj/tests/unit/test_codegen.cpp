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

#include <random>

#include <gtest/gtest.h>

#include "cabt/codegen.hpp"
#include "cabt/error.hpp"
#include "cabt/frontend.hpp"
#include "cabt/timing.hpp"
#include "test_support.hpp"

namespace cabt {
namespace {

namespace ref = testing::ref;

constexpr DetailLevel kLevels[] = {DetailLevel::kStatic, DetailLevel::kBranch,
                                   DetailLevel::kBranchICache};

BasicBlock decoded_block(const std::vector<std::uint32_t>& words, std::uint32_t start) {
  const auto desc = tk32_description();
  BasicBlock b;
  b.start = start;
  std::uint32_t pc = start;
  for (std::uint32_t w : words) {
    b.instrs.push_back(to_ir(lookup_decode(desc, w), pc));
    pc += 4;
  }
  b.end = pc;
  return b;
}

template <typename T>
std::vector<T> ops_of(const TranslatedBlock& b) {
  std::vector<T> out;
  for (const TargetOp& o : b.ops)
    if (const T* p = std::get_if<T>(&o)) out.push_back(*p);
  return out;
}

template <typename T>
std::size_t count_ops(const TranslatedProgram& prog) {
  std::size_t n = 0;
  for (const auto& b : prog.blocks) n += ops_of<T>(b).size();
  return n;
}

TEST(Annotate, SingleNopAtL1) {
  BasicBlock b = decoded_block({ref::r(ref::NOP, 0, 0, 0)}, 0);
  b.successors = {{1, EdgeKind::kFallthrough}};
  const auto desc = tk32_description();
  const TranslatedBlock t = annotate_block(b, scoreboard_cycles(b, desc), DetailLevel::kStatic, desc);
  EXPECT_EQ(t.ops, (std::vector<TargetOp>{op::SyncStart{1}, op::Nop{}, op::SyncWait{}, op::Jmp{1}}));
}

TEST(Annotate, ForwardBranchCorrections) {
  BasicBlock b = decoded_block({ref::r(ref::ADD, 1, 1, 2), ref::i(ref::BEQ, 1, 2, 3)}, 0);
  b.successors = {{2, EdgeKind::kTaken}, {1, EdgeKind::kFallthrough}};
  const auto desc = tk32_description();
  const TranslatedBlock t = annotate_block(b, scoreboard_cycles(b, desc), DetailLevel::kBranch, desc);
  const auto checks = ops_of<op::BrCheck>(t);
  ASSERT_EQ(checks.size(), 1u);
  EXPECT_EQ(checks[0].taken_correction, 4u);
  EXPECT_EQ(checks[0].not_taken_correction, 0u);
  EXPECT_EQ(ops_of<op::CorrFlush>(t).size(), 1u);
  EXPECT_EQ(ops_of<op::SyncStart>(t)[0].cycles, 2u);
  const auto brs = ops_of<op::Br>(t);
  ASSERT_EQ(brs.size(), 1u);
  EXPECT_EQ(brs[0].taken, 2u);
  EXPECT_EQ(brs[0].fallthrough, 1u);
}

TEST(Annotate, NoCorrectionCodeAtL1) {
  BasicBlock b = decoded_block({ref::r(ref::ADD, 1, 1, 2), ref::i(ref::BEQ, 1, 2, 3)}, 0);
  b.successors = {{2, EdgeKind::kTaken}, {1, EdgeKind::kFallthrough}};
  const auto desc = tk32_description();
  const TranslatedBlock t = annotate_block(b, scoreboard_cycles(b, desc), DetailLevel::kStatic, desc);
  EXPECT_TRUE(ops_of<op::BrCheck>(t).empty());
  EXPECT_TRUE(ops_of<op::CorrFlush>(t).empty());
}

TEST(Annotate, CacheChecksPerLine) {
  BasicBlock b = decoded_block({0, 0, 0, 0}, 0x8);
  b.successors = {{1, EdgeKind::kFallthrough}};
  const auto desc = tk32_description();
  const TranslatedBlock t =
      annotate_block(b, scoreboard_cycles(b, desc), DetailLevel::kBranchICache, desc);
  const auto checks = ops_of<op::CacheCheck>(t);
  ASSERT_EQ(checks.size(), 2u);
  EXPECT_EQ(checks[0], (op::CacheCheck{0, 0}));
  EXPECT_EQ(checks[1], (op::CacheCheck{0, 1}));
  // Each check precedes the first instruction of its line.
  EXPECT_EQ(t.ops[1], TargetOp(op::CacheCheck{0, 0}));
  EXPECT_EQ(t.ops[4], TargetOp(op::CacheCheck{0, 1}));
}

TEST(Annotate, MissingCacheSpecAtL3) {
  auto desc = tk32_description();
  desc.icache.reset();
  BasicBlock b = decoded_block({ref::i(ref::HALT, 0, 0, 0)}, 0);
  EXPECT_THROW(annotate_block(b, scoreboard_cycles(b, desc), DetailLevel::kBranchICache, desc), Error);
  try {
    translate_image(testing::load_program("gcd"), desc, DetailLevel::kBranchICache);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingCacheSpec);
  }
  EXPECT_NO_THROW(translate_image(testing::load_program("gcd"), desc, DetailLevel::kBranch));
}

TEST(Emit, SyncStartSumAtL1) {
  const auto desc = tk32_description();
  for (const auto& name : testing::benchmark_programs()) {
    auto blocks = recover_blocks(testing::load_program(name), desc);
    const auto timings = time_blocks(blocks, desc);
    std::uint64_t want = 0;
    for (const auto& t : timings) want += t.static_cycles;
    const TranslatedProgram prog = translate_image(testing::load_program(name), desc, DetailLevel::kStatic);
    std::uint64_t got = 0;
    for (const auto& b : prog.blocks)
      for (const auto& s : ops_of<op::SyncStart>(b)) got += s.cycles;
    EXPECT_EQ(got, want) << name;
  }
}

TEST(Emit, InstructionVariantOneBlockPerInstruction) {
  std::vector<std::uint32_t> words;
  for (int k = 0; k < 9; ++k) words.push_back(ref::r(ref::ADD, 1, 1, 2));
  words.push_back(ref::i(ref::HALT, 0, 0, 0));
  const TranslatedProgram prog = translate_image(testing::image_from_words(words), tk32_description(),
                                                 DetailLevel::kStatic, Variant::kInstructionOriented);
  ASSERT_EQ(prog.blocks.size(), 10u);
  for (const auto& b : prog.blocks) {
    EXPECT_EQ(b.src_count, 1u);
    EXPECT_EQ(ops_of<op::DebugTrap>(b).size(), 1u);
    EXPECT_EQ(ops_of<op::SyncStart>(b)[0].cycles, 1u);
  }
}

TEST(EmitProperty, SyncStartEqualsStaticCycles) {
  const auto desc = tk32_description();
  std::vector<std::string> names = testing::benchmark_programs();
  names.push_back(testing::kIoFixture);
  for (const auto& name : names) {
    const ProgramImage image = testing::load_program(name);
    auto blocks = recover_blocks(image, desc);
    const auto timings = time_blocks(blocks, desc);
    for (DetailLevel level : kLevels) {
      const TranslatedProgram prog = translate_image(image, desc, level);
      ASSERT_EQ(prog.blocks.size(), blocks.size());
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        const TranslatedBlock& tb = prog.blocks[i];
        ASSERT_FALSE(tb.ops.empty());
        ASSERT_EQ(tb.ops.front(), TargetOp(op::SyncStart{timings[i].static_cycles})) << name;
        EXPECT_EQ(tb.src_start, blocks[i].start);
        EXPECT_EQ(tb.src_count, blocks[i].instrs.size());
        EXPECT_EQ(ops_of<op::SyncWait>(tb).size(), 1u);
      }
      EXPECT_EQ(prog.cache.has_value(), level == DetailLevel::kBranchICache);
      if (level == DetailLevel::kStatic) {
        EXPECT_EQ(count_ops<op::BrCheck>(prog) + count_ops<op::CorrFlush>(prog) +
                      count_ops<op::CacheCheck>(prog),
                  0u);
      }
      if (level != DetailLevel::kBranchICache) EXPECT_EQ(count_ops<op::CacheCheck>(prog), 0u);
      EXPECT_EQ(prog.addr_map.at(image.entry), prog.entry_block);
    }
  }
}

// Bus accesses come after the block's cycles are generated.
TEST(EmitProperty, IoOpsFollowSyncWait) {
  const TranslatedProgram prog =
      translate_image(testing::load_program(testing::kIoFixture), tk32_description(), DetailLevel::kBranchICache);
  std::size_t io = 0;
  for (const auto& b : prog.blocks) {
    bool waited = false;
    for (const TargetOp& o : b.ops) {
      if (std::holds_alternative<op::SyncWait>(o)) waited = true;
      if (std::holds_alternative<op::BusRead>(o) || std::holds_alternative<op::BusWrite>(o) ||
          std::holds_alternative<op::AddrDispatch>(o)) {
        EXPECT_TRUE(waited);
        EXPECT_EQ(b.src_count, 1u);
        ++io;
      }
    }
  }
  EXPECT_GT(io, 0u);
}

TEST(Serialize, RoundTripAllLevelsAndVariants) {
  std::vector<std::string> names = testing::benchmark_programs();
  names.push_back(testing::kIoFixture);
  for (const auto& name : names) {
    for (DetailLevel level : kLevels) {
      for (Variant v : {Variant::kBlockOriented, Variant::kInstructionOriented}) {
        const TranslatedProgram prog = translate_image(testing::load_program(name), tk32_description(), level, v);
        const std::string text = serialize_program(prog);
        const TranslatedProgram back = parse_program(text);
        ASSERT_EQ(back, prog) << name;
        ASSERT_EQ(serialize_program(back), text);
      }
    }
  }
}

TEST(Serialize, Deterministic) {
  const ProgramImage image = testing::load_program("sieve");
  EXPECT_EQ(serialize_program(translate_image(image, tk32_description(), DetailLevel::kBranchICache)),
            serialize_program(translate_image(image, tk32_description(), DetailLevel::kBranchICache)));
}

TEST(Serialize, RejectsMalformed) {
  const std::string good =
      serialize_program(translate_image(testing::load_program("gcd"), tk32_description(), DetailLevel::kBranch));
  const auto code_of = [](const std::string& text) {
    try {
      parse_program(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  std::string bad_op = good;
  bad_op.replace(bad_op.find("\"SYNC_WAIT\""), 11, "\"SYNC_WHEN\"");
  EXPECT_EQ(code_of(bad_op), ErrorCode::kSchema);
  std::string bad_format = good;
  bad_format.replace(bad_format.find("cabt-translated"), 15, "something-else!");
  EXPECT_EQ(code_of(bad_format), ErrorCode::kSchema);
  EXPECT_EQ(code_of("{}"), ErrorCode::kSchema);
  // Level 2 artifacts carry no cache descriptor.
  std::string with_cache = good;
  with_cache.replace(with_cache.find("\"level\": 2"), 10, "\"level\": 3");
  EXPECT_NE(code_of(with_cache), ErrorCode::kInternal);
}

TEST(Serialize, OpNames) {
  EXPECT_EQ(op_name(op::SyncStart{}), "SYNC_START");
  EXPECT_EQ(op_name(op::CorrFlush{}), "CORR_FLUSH");
  EXPECT_EQ(op_name(op::CacheCheck{}), "CACHE_CHECK");
  EXPECT_EQ(op_name(op::AddrDispatch{}), "ADDR_DISPATCH");
  EXPECT_EQ(op_name(op::Halt{}), "HALT_T");
}

TEST(Translate, RandomProgramsTranslateAtEveryLevel) {
  std::mt19937_64 rng(47);
  for (int n = 0; n < 200; ++n) {
    const ProgramImage image = testing::image_from_words(testing::random_program(rng, {}));
    for (DetailLevel level : kLevels) {
      const TranslatedProgram prog = translate_image(image, tk32_description(), level);
      ASSERT_EQ(parse_program(serialize_program(prog)), prog);
    }
  }
}

}  // namespace
}  // namespace cabt
