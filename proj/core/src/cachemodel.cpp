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

#include "cabt/cachemodel.hpp"

#include <ostream>

#include "cabt/error.hpp"

namespace cabt {

CacheKey cab_key(std::uint32_t addr, const CacheSpec& cfg) {
  const unsigned offset_bits = cfg.offset_bits();
  const unsigned index_bits = cfg.index_bits();
  CacheKey key;
  key.index = (addr >> offset_bits) & (cfg.sets - 1);
  const unsigned shift = offset_bits + index_bits;
  key.tag = shift >= 32 ? 0 : addr >> shift;
  return key;
}

std::vector<CacheAnalysisBlock> partition_cabs(const BasicBlock& block, const CacheSpec& cfg) {
  std::vector<CacheAnalysisBlock> cabs;
  for (std::size_t i = 0; i < block.instrs.size(); ++i) {
    const CacheKey key = cab_key(block.instrs[i].src_addr, cfg);
    if (cabs.empty() || cabs.back().tag != key.tag || cabs.back().index != key.index) {
      cabs.push_back(CacheAnalysisBlock{block.id, key.tag, key.index, i, i});
    } else {
      cabs.back().last = i;
    }
  }
  return cabs;
}

void assign_cabs(std::vector<BasicBlock>& blocks, const CacheSpec& cfg) {
  for (auto& b : blocks) b.cabs = partition_cabs(b, cfg);
}

void dump_cabs(std::ostream& out, const std::vector<BasicBlock>& blocks) {
  out << "block,cab,tag,set\n";
  for (const auto& b : blocks)
    for (std::size_t i = 0; i < b.cabs.size(); ++i)
      out << b.id << "," << i << "," << b.cabs[i].tag << "," << b.cabs[i].index << "\n";
}

CacheState::CacheState(const CacheSpec& cfg)
    : cfg_(cfg), region_(cache_region_words(cfg), 0) {
  for (std::uint32_t s = 0; s < cfg_.sets; ++s)
    for (std::uint32_t w = 0; w < cfg_.ways; ++w) age_ref(s, w) = w;
}

bool CacheState::ages_consistent() const {
  std::vector<bool> seen(cfg_.ways);
  for (std::uint32_t s = 0; s < cfg_.sets; ++s) {
    std::fill(seen.begin(), seen.end(), false);
    for (std::uint32_t w = 0; w < cfg_.ways; ++w) {
      const std::uint32_t a = age(s, w);
      if (a >= cfg_.ways || seen[a]) return false;
      seen[a] = true;
    }
  }
  return true;
}

namespace {

// Way `way` becomes most recently used; every way that was more recent ages
// by one.
void renew_lru(std::uint32_t* ages, std::uint32_t ways, std::uint32_t way) {
  const std::uint32_t prev = ages[way];
  for (std::uint32_t w = 0; w < ways; ++w)
    if (ages[w] < prev) ++ages[w];
  ages[way] = 0;
}

}  // namespace

CacheAccessResult cache_access(CacheState& state, std::uint32_t tag, std::uint32_t index,
                               const CacheSpec& cfg) {
  if (index >= cfg.sets) throw Error(ErrorCode::kInternal, "cache index out of range");
  const std::uint32_t ways = cfg.ways;
  std::uint32_t* tags = &state.tag_word_ref(index, 0);
  std::uint32_t* ages = &state.age_ref(index, 0);
  const std::uint32_t wanted = (tag << 1) | 1u;

  for (std::uint32_t w = 0; w < ways; ++w) {
    if (tags[w] == wanted) {
      renew_lru(ages, ways, w);
      return {true, 0};
    }
  }

  std::uint32_t victim = 0;
  for (std::uint32_t w = 0; w < ways; ++w)
    if (ages[w] == ways - 1) victim = w;
  tags[victim] = wanted;
  renew_lru(ages, ways, victim);
  return {false, cfg.miss_penalty};
}

CacheState init_cache_region(const CacheSpec& cfg) { return CacheState(cfg); }

std::size_t cache_region_words(const CacheSpec& cfg) {
  return std::size_t{cfg.sets} * cfg.ways * 2;
}

}  // namespace cabt
