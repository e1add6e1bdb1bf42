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
// Instruction-cache simulation for the highest detail level: cache analysis
// blocks, the runtime cache data region, and the hit/miss + LRU correction
// routine run at the start of every cache analysis block.

#ifndef CABT_CACHEMODEL_HPP_
#define CABT_CACHEMODEL_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cabt/ir.hpp"
#include "cabt/procdesc.hpp"

namespace cabt {

struct CacheKey {
  std::uint32_t tag = 0;
  std::uint32_t index = 0;
  bool operator==(const CacheKey&) const = default;
};

// The block offset is dropped; only tag and set index matter.
CacheKey cab_key(std::uint32_t addr, const CacheSpec& cfg);

std::vector<CacheAnalysisBlock> partition_cabs(const BasicBlock& block, const CacheSpec& cfg);

// Partitions every block and stores the result in BasicBlock::cabs.
void assign_cabs(std::vector<BasicBlock>& blocks, const CacheSpec& cfg);

// CSV: block,cab,tag,set
void dump_cabs(std::ostream& out, const std::vector<BasicBlock>& blocks);

struct CacheAccessResult {
  bool hit = false;
  std::uint32_t extra_cycles = 0;
};

class CacheState;

// Hit: the way becomes most recently used. Miss: the least recently used way
// is overwritten, marked valid and made most recently used; the miss penalty
// is returned as extra cycles.
CacheAccessResult cache_access(CacheState& state, std::uint32_t tag, std::uint32_t index,
                               const CacheSpec& cfg);

// The cache data region. Layout, all 32-bit words:
//   [0, sets*ways)            valid|tag words: bit 0 valid, bits 31..1 tag
//   [sets*ways, 2*sets*ways)  LRU ages; per set a permutation of 0..ways-1,
//                             0 = most recently used
class CacheState {
 public:
  explicit CacheState(const CacheSpec& cfg);

  const CacheSpec& spec() const { return cfg_; }
  std::span<const std::uint32_t> region() const { return region_; }
  std::uint32_t tag_word(std::uint32_t set, std::uint32_t way) const {
    return region_[set * cfg_.ways + way];
  }
  std::uint32_t age(std::uint32_t set, std::uint32_t way) const {
    return region_[ages_offset() + set * cfg_.ways + way];
  }

  // True when every set's ages form a permutation of 0..ways-1.
  bool ages_consistent() const;

 private:
  friend CacheAccessResult cache_access(CacheState&, std::uint32_t, std::uint32_t,
                                        const CacheSpec&);

  std::size_t ages_offset() const { return std::size_t{cfg_.sets} * cfg_.ways; }
  std::uint32_t& tag_word_ref(std::uint32_t set, std::uint32_t way) {
    return region_[set * cfg_.ways + way];
  }
  std::uint32_t& age_ref(std::uint32_t set, std::uint32_t way) {
    return region_[ages_offset() + set * cfg_.ways + way];
  }

  CacheSpec cfg_;
  std::vector<std::uint32_t> region_;
};

// All ways invalid, ages 0..ways-1 in way order.
CacheState init_cache_region(const CacheSpec& cfg);

// Region size in 32-bit words: sets * ways * (tag word + age word).
std::size_t cache_region_words(const CacheSpec& cfg);

}  // namespace cabt

#endif  // CABT_CACHEMODEL_HPP_
