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

#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cabt/cachemodel.hpp"
#include "cabt/report.hpp"
#include "test_support.hpp"

namespace cabt {
namespace {

namespace ref = testing::ref;

const std::string kHeader =
    "program,instr_count,oracle_cycles,l1_cycles,l1_dev,l2_cycles,l2_dev,l3_cycles,l3_dev,"
    "l1_hostops,l2_hostops,l3_hostops,flush_cycles,l3_flush_dev,l1_ops_per_instr,"
    "l2_ops_per_instr,l3_ops_per_instr";

std::vector<ReportRow> suite_rows() {
  std::vector<ReportRow> rows;
  for (const auto& name : testing::benchmark_programs())
    rows.push_back(compare_program(name, testing::load_program(name), tk32_description()));
  return rows;
}

TEST(Deviation, Basics) {
  EXPECT_DOUBLE_EQ(deviation(110, 100), 0.1);
  EXPECT_DOUBLE_EQ(deviation(90, 100), 0.1);
  EXPECT_DOUBLE_EQ(deviation(0, 0), 0.0);
}

TEST(Report, CsvSchemaAndDeterminism) {
  const auto rows = suite_rows();
  std::ostringstream a;
  std::ostringstream b;
  write_report_csv(a, rows);
  write_report_csv(b, suite_rows());
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in(a.str());
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, kHeader);
  std::size_t n = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), std::count(kHeader.begin(), kHeader.end(), ','));
    EXPECT_EQ(line.substr(0, rows[n].program.size()), rows[n].program);
    ++n;
  }
  EXPECT_EQ(n, rows.size());
}

TEST(Report, SuiteShape) {
  for (const ReportRow& r : suite_rows()) {
    EXPECT_EQ(r.l3_flush_dev, 0.0) << r.program;
    EXPECT_EQ(r.level_cycles[2], r.flush_cycles) << r.program;
    EXPECT_LE(r.host_ops[0], r.host_ops[1]) << r.program;
    EXPECT_LE(r.host_ops[1], r.host_ops[2]) << r.program;
    EXPECT_GT(r.instr_count, 0u);
  }
}

TEST(Report, SieveCacheOverhead) {
  const ReportRow r = compare_program("sieve", testing::load_program("sieve"), tk32_description());
  EXPECT_GT(r.ops_per_instr(2), r.ops_per_instr(0));
}

// Without branches, the only dynamic effect left is the cold miss on each
// line the program touches.
TEST(Report, StraightLineProgramLevels) {
  std::mt19937_64 rng(83);
  const CacheSpec cfg = tk32_description().icache.value();
  for (int n = 0; n < 30; ++n) {
    const auto words = testing::random_straight_block(rng, 24);
    const ReportRow r = compare_program("s", testing::image_from_words(words), tk32_description());
    EXPECT_EQ(r.level_cycles[0], r.level_cycles[1]);
    const std::uint64_t lines = (4 * words.size() + cfg.block_bytes - 1) / cfg.block_bytes;
    EXPECT_EQ(r.level_cycles[2], r.level_cycles[0] + lines * cfg.miss_penalty);
    EXPECT_EQ(r.flush_cycles, r.level_cycles[2]);
  }
}

TEST(Report, UnlistedDevicesDefaultToNull) {
  DeviceRegistry devices;
  BusMap bus{{IoRegion{0xf000, 0xf100, "uart"}, IoRegion{0xf100, 0xf200, "timer"}}};
  register_bus_devices(devices, bus, {{"uart", "counter"}});
  EXPECT_NE(devices.find_as<CounterDevice>("uart"), nullptr);
  EXPECT_NE(devices.find_as<NullDevice>("timer"), nullptr);
}

}  // namespace
}  // namespace cabt
