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

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "cabt/codegen.hpp"
#include "cabt/procdesc.hpp"

namespace cabt::bench {
namespace {

void BM_Translate(benchmark::State& state) {
  const ProgramImage image = load(static_cast<int>(state.range(0)));
  const ProcessorDescription desc = tk32_description();
  const auto level = *parse_level(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(translate_image(image, desc, level));
  state.SetLabel(programs()[static_cast<std::size_t>(state.range(0))]);
}
BENCHMARK(BM_Translate)->ArgsProduct({{0, 1, 2, 3, 4, 5}, {1, 3}});

void BM_Serialize(benchmark::State& state) {
  const TranslatedProgram prog = translate_image(load(1), tk32_description(), DetailLevel::kBranchICache);
  for (auto _ : state) benchmark::DoNotOptimize(serialize_program(prog));
}
BENCHMARK(BM_Serialize);

}  // namespace
}  // namespace cabt::bench
