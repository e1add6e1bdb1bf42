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
// Interpretive reference simulator. It fetches and decodes source
// instructions one at a time and accounts cycles with the same scoreboard,
// branch and cache rules the translator uses, either clearing pipeline state
// at every basic block (the translator's assumption) or carrying it across
// blocks.

#ifndef CABT_ORACLE_HPP_
#define CABT_ORACLE_HPP_

#include <cstdint>
#include <vector>

#include "cabt/codegen.hpp"
#include "cabt/devices.hpp"
#include "cabt/image.hpp"
#include "cabt/procdesc.hpp"
#include "cabt/run.hpp"

namespace cabt {

struct OracleConfig {
  bool block_flush = true;
  bool model_branch = false;
  bool model_icache = false;
  bool continuous = false;  // takes precedence over block_flush
};

// The configuration whose cycle count a translation at `level` reproduces.
OracleConfig config_for_level(DetailLevel level);
// Continuous pipeline, branch and cache models on.
OracleConfig full_continuous_config();

struct TraceEntry {
  std::uint32_t pc = 0;
  std::uint32_t word = 0;
  std::uint64_t issue_cycle = 0;
  bool operator==(const TraceEntry&) const = default;
};

struct OracleResult {
  RunResult run;  // host_ops counts source instructions
  std::vector<TraceEntry> trace;
};

OracleResult reference_run(const ProgramImage& image, const ProcessorDescription& desc,
                           const OracleConfig& cfg, DeviceRegistry& devices,
                           RunLimits limits = {}, bool record_trace = false);

}  // namespace cabt

#endif  // CABT_ORACLE_HPP_
