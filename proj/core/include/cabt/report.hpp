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
// Cycle-accuracy and speed comparison across detail levels.

#ifndef CABT_REPORT_HPP_
#define CABT_REPORT_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cabt/devices.hpp"
#include "cabt/image.hpp"
#include "cabt/procdesc.hpp"
#include "cabt/run.hpp"

namespace cabt {

// Device kinds by name (see make_device); bus devices not listed get "null".
using DeviceKinds = std::map<std::string, std::string>;

void register_bus_devices(DeviceRegistry& registry, const BusMap& bus, const DeviceKinds& kinds);

struct ReportRow {
  std::string program;
  std::uint64_t instr_count = 0;
  std::uint64_t oracle_cycles = 0;  // continuous pipeline, branch and cache models
  std::uint64_t flush_cycles = 0;   // block-flush pipeline, branch and cache models
  std::array<std::uint64_t, 3> level_cycles{};
  std::array<double, 3> level_dev{};
  std::array<std::uint64_t, 3> host_ops{};
  double l3_flush_dev = 0;

  double ops_per_instr(int level_index) const {
    return instr_count == 0 ? 0.0
                            : static_cast<double>(host_ops[level_index]) /
                                  static_cast<double>(instr_count);
  }
};

double deviation(std::uint64_t measured, std::uint64_t reference);

ReportRow compare_program(const std::string& name, const ProgramImage& image,
                          const ProcessorDescription& desc, const DeviceKinds& kinds = {},
                          RunLimits limits = {});

// Header: program,instr_count,oracle_cycles,l1_cycles,l1_dev,l2_cycles,l2_dev,
// l3_cycles,l3_dev,l1_hostops,l2_hostops,l3_hostops, then flush_cycles,
// l3_flush_dev and the three ops-per-instruction ratios.
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace cabt

#endif  // CABT_REPORT_HPP_
