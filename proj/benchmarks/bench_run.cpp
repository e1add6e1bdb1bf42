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

// Wall-clock cost of the translated run against the interpreter. Counters
// report simulated source instructions per second.

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "cabt/codegen.hpp"
#include "cabt/oracle.hpp"
#include "cabt/vtm.hpp"

namespace cabt::bench {
namespace {

void BM_VmRun(benchmark::State& state) {
  const int program = static_cast<int>(state.range(0));
  const TranslatedProgram prog =
      translate_image(load(program), tk32_description(), *parse_level(static_cast<int>(state.range(1))));
  std::uint64_t instructions = 0;
  for (auto _ : state) {
    DeviceRegistry devices;
    const RunResult r = vm_run(prog, devices);
    instructions += r.instructions;
    benchmark::DoNotOptimize(r.hwclock);
  }
  state.counters["instr/s"] = benchmark::Counter(static_cast<double>(instructions), benchmark::Counter::kIsRate);
  state.SetLabel(programs()[static_cast<std::size_t>(program)]);
}
BENCHMARK(BM_VmRun)->ArgsProduct({{0, 1, 2, 3, 4, 5}, {1, 2, 3}});

void BM_OracleRun(benchmark::State& state) {
  const int program = static_cast<int>(state.range(0));
  const ProgramImage image = load(program);
  const ProcessorDescription desc = tk32_description();
  const OracleConfig cfg = state.range(1) ? full_continuous_config()
                                          : config_for_level(DetailLevel::kBranchICache);
  std::uint64_t instructions = 0;
  for (auto _ : state) {
    DeviceRegistry devices;
    const OracleResult r = reference_run(image, desc, cfg, devices);
    instructions += r.run.instructions;
    benchmark::DoNotOptimize(r.run.hwclock);
  }
  state.counters["instr/s"] = benchmark::Counter(static_cast<double>(instructions), benchmark::Counter::kIsRate);
  state.SetLabel(programs()[static_cast<std::size_t>(program)] + (state.range(1) ? " continuous" : " flush"));
}
BENCHMARK(BM_OracleRun)->ArgsProduct({{0, 1, 2, 3, 4, 5}, {0, 1}});

}  // namespace
}  // namespace cabt::bench
