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

#ifndef CABT_BENCHMARKS_BENCH_COMMON_HPP_
#define CABT_BENCHMARKS_BENCH_COMMON_HPP_

#include <string>
#include <vector>

#include "cabt/image.hpp"

namespace cabt::bench {

inline const std::vector<std::string>& programs() {
  static const std::vector<std::string> names = {"gcd", "sieve", "fir", "biquad", "dpcm", "subband_stub"};
  return names;
}

inline ProgramImage load(int index) {
  return load_image_file(std::string(CABT_PROGRAMS_DIR) + "/" + programs()[static_cast<std::size_t>(index)] +
                         ".img");
}

}  // namespace cabt::bench

#endif  // CABT_BENCHMARKS_BENCH_COMMON_HPP_
