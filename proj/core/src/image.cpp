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

#include "cabt/image.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cabt/error.hpp"
#include "json_util.hpp"

namespace cabt {

namespace {

using json_util::json;

bool ranges_overlap(std::uint64_t a_lo, std::uint64_t a_hi, std::uint64_t b_lo,
                    std::uint64_t b_hi) {
  return a_lo < b_hi && b_lo < a_hi;
}

bool default_executable(std::string_view name) { return name.starts_with(".text"); }

}  // namespace

MemoryMap default_memory_map() {
  return MemoryMap{{MemoryRegion{0x0, 0x10000, 0x0, RegionKind::kRam}}};
}

void validate(const MemoryMap& mem, const BusMap& bus) {
  const auto& regs = mem.regions;
  for (std::size_t i = 0; i < regs.size(); ++i) {
    const auto& r = regs[i];
    if (r.src_end <= r.src_base)
      throw Error(ErrorCode::kSchema, "memory_map[" + std::to_string(i) + "]: empty range");
    if (std::uint64_t{r.dst_base} + r.size() > (std::uint64_t{1} << 32))
      throw Error(ErrorCode::kSchema, "memory_map[" + std::to_string(i) + "]: dst range wraps");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& q = regs[j];
      if (ranges_overlap(r.src_base, r.src_end, q.src_base, q.src_end))
        throw Error(ErrorCode::kOverlap, "memory_map regions overlap in source space");
      if (ranges_overlap(r.dst_base, std::uint64_t{r.dst_base} + r.size(), q.dst_base,
                         std::uint64_t{q.dst_base} + q.size()))
        throw Error(ErrorCode::kOverlap, "memory_map regions overlap in target space");
    }
  }
  const auto& ios = bus.io_regions;
  for (std::size_t i = 0; i < ios.size(); ++i) {
    const auto& io = ios[i];
    if (io.end <= io.base)
      throw Error(ErrorCode::kSchema, "bus_map[" + std::to_string(i) + "]: empty range");
    if (io.device.empty())
      throw Error(ErrorCode::kSchema, "bus_map[" + std::to_string(i) + "]: empty device name");
    for (std::size_t j = 0; j < i; ++j)
      if (ranges_overlap(io.base, io.end, ios[j].base, ios[j].end))
        throw Error(ErrorCode::kOverlap, "bus_map regions overlap");
    for (const auto& r : regs)
      if (ranges_overlap(io.base, io.end, r.src_base, r.src_end))
        throw Error(ErrorCode::kOverlap,
                    "bus_map region for '" + io.device + "' overlaps the memory map");
  }
}

void validate(const ProgramImage& image) {
  const auto& secs = image.sections;
  for (std::size_t i = 0; i < secs.size(); ++i) {
    const auto& s = secs[i];
    if (s.base % 4 != 0)
      throw Error(ErrorCode::kAlignment, "section " + s.name + " base is not 4-aligned");
    if (s.bytes.size() % 4 != 0)
      throw Error(ErrorCode::kAlignment, "section " + s.name + " size is not a multiple of 4");
    if (std::uint64_t{s.base} + s.bytes.size() > (std::uint64_t{1} << 32))
      throw Error(ErrorCode::kSchema, "section " + s.name + " wraps the address space");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& o = secs[j];
      const std::uint64_t s_end = std::uint64_t{s.base} + s.bytes.size();
      const std::uint64_t o_end = std::uint64_t{o.base} + o.bytes.size();
      const bool overlap = ranges_overlap(s.base, s_end, o.base, o_end) ||
                           (s.bytes.empty() && o.base <= s.base && s.base < o_end) ||
                           (o.bytes.empty() && s.base <= o.base && o.base < s_end) ||
                           (s.base == o.base);
      if (overlap)
        throw Error(ErrorCode::kOverlap, "sections " + o.name + " and " + s.name + " overlap");
    }
  }
  if (image.entry % 4 != 0) throw Error(ErrorCode::kAlignment, "entry is not 4-aligned");
  const bool entry_ok = std::any_of(secs.begin(), secs.end(), [&](const Section& s) {
    return s.executable && s.base <= image.entry && image.entry < s.end();
  });
  if (!entry_ok)
    throw Error(ErrorCode::kSchema, "entry " + json_util::hex(image.entry) +
                                        " is not inside an executable section");
  validate(image.memory_map, image.bus_map);
}

ProgramImage load_image(std::string_view json_text) {
  using namespace json_util;
  const json doc = parse(json_text, "image");
  check_keys(doc, "image", {"entry", "sections"}, {"symbols", "memory_map", "bus_map"});

  ProgramImage image;
  image.entry = get_hex_u32(doc, "entry", "image");

  const json& secs = doc["sections"];
  if (!secs.is_array()) schema_error("image.sections", "expected a list");
  for (std::size_t i = 0; i < secs.size(); ++i) {
    const std::string ctx = "sections[" + std::to_string(i) + "]";
    const json& s = secs[i];
    check_keys(s, ctx, {"name", "base", "data"}, {"exec"});
    Section sec;
    sec.name = get_string(s, "name", ctx);
    sec.base = get_hex_u32(s, "base", ctx);
    sec.bytes = hex_to_bytes(get_string(s, "data", ctx), ctx + ".data");
    sec.executable = s.contains("exec") ? get_bool(s, "exec", ctx) : default_executable(sec.name);
    image.sections.push_back(std::move(sec));
  }
  std::stable_sort(image.sections.begin(), image.sections.end(),
                   [](const Section& a, const Section& b) { return a.base < b.base; });

  if (doc.contains("symbols")) {
    const json& syms = doc["symbols"];
    if (!syms.is_object()) schema_error("image.symbols", "expected an object");
    for (const auto& [name, value] : syms.items())
      image.symbols[name] = parse_hex_u32(value, "symbols." + name);
  }

  if (doc.contains("memory_map")) {
    const json& mm = doc["memory_map"];
    if (!mm.is_array()) schema_error("image.memory_map", "expected a list");
    for (std::size_t i = 0; i < mm.size(); ++i) {
      const std::string ctx = "memory_map[" + std::to_string(i) + "]";
      check_keys(mm[i], ctx, {"src_base", "src_end", "dst_base", "kind"});
      MemoryRegion r;
      r.src_base = get_hex_u32(mm[i], "src_base", ctx);
      r.src_end = get_hex_u32(mm[i], "src_end", ctx);
      r.dst_base = get_hex_u32(mm[i], "dst_base", ctx);
      const std::string kind = get_string(mm[i], "kind", ctx);
      if (kind == "RAM") r.kind = RegionKind::kRam;
      else if (kind == "ROM") r.kind = RegionKind::kRom;
      else schema_error(ctx, "kind must be RAM or ROM");
      image.memory_map.regions.push_back(r);
    }
  } else {
    image.memory_map = default_memory_map();
  }

  if (doc.contains("bus_map")) {
    const json& bm = doc["bus_map"];
    if (!bm.is_array()) schema_error("image.bus_map", "expected a list");
    for (std::size_t i = 0; i < bm.size(); ++i) {
      const std::string ctx = "bus_map[" + std::to_string(i) + "]";
      check_keys(bm[i], ctx, {"base", "end", "device"});
      image.bus_map.io_regions.push_back(IoRegion{get_hex_u32(bm[i], "base", ctx),
                                                  get_hex_u32(bm[i], "end", ctx),
                                                  get_string(bm[i], "device", ctx)});
    }
  }

  validate(image);
  return image;
}

ProgramImage load_image_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open image '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_image(ss.str());
}

std::string store_image(const ProgramImage& image) {
  using json_util::hex;
  json doc;
  doc["entry"] = hex(image.entry);
  json secs = json::array();
  for (const auto& s : image.sections) {
    secs.push_back({{"name", s.name},
                    {"base", hex(s.base)},
                    {"data", json_util::bytes_to_hex(s.bytes.data(), s.bytes.size())},
                    {"exec", s.executable}});
  }
  doc["sections"] = secs;
  if (!image.symbols.empty()) {
    json syms = json::object();
    for (const auto& [name, addr] : image.symbols) syms[name] = hex(addr);
    doc["symbols"] = syms;
  }
  json mm = json::array();
  for (const auto& r : image.memory_map.regions) {
    mm.push_back({{"src_base", hex(r.src_base)},
                  {"src_end", hex(r.src_end)},
                  {"dst_base", hex(r.dst_base)},
                  {"kind", r.kind == RegionKind::kRam ? "RAM" : "ROM"}});
  }
  doc["memory_map"] = mm;
  if (!image.bus_map.io_regions.empty()) {
    json bm = json::array();
    for (const auto& io : image.bus_map.io_regions)
      bm.push_back({{"base", hex(io.base)}, {"end", hex(io.end)}, {"device", io.device}});
    doc["bus_map"] = bm;
  }
  return doc.dump(1) + "\n";
}

AddressClass classify_address(const MemoryMap& mem, const BusMap& bus, std::uint32_t addr) {
  for (const auto& r : mem.regions) {
    if (r.src_base <= addr && addr < r.src_end)
      return MemoryTarget{r.dst_base + (addr - r.src_base), r.kind};
  }
  for (const auto& io : bus.io_regions) {
    if (io.base <= addr && addr < io.end) return IoTarget{io.device, addr - io.base};
  }
  return Unmapped{};
}

EmulatedMemory::EmulatedMemory(const MemoryMap& map, std::span<const Section> sections) {
  regions_.reserve(map.regions.size());
  for (const auto& r : map.regions)
    regions_.push_back(Region{r.dst_base, r.kind, std::vector<std::uint8_t>(r.size(), 0)});

  for (const auto& sec : sections) {
    if (sec.bytes.empty()) continue;
    // Place by source address through the map; the whole section must land in
    // one region.
    const MemoryRegion* home = nullptr;
    for (const auto& r : map.regions)
      if (r.src_base <= sec.base && sec.end() <= r.src_end && sec.end() > sec.base) home = &r;
    if (home == nullptr) {
      if (sec.executable) continue;  // code need not be data-addressable
      throw Error(ErrorCode::kAddressOutOfRange,
                  "section " + sec.name + " is not covered by the memory map");
    }
    auto& region = regions_[static_cast<std::size_t>(home - map.regions.data())];
    std::copy(sec.bytes.begin(), sec.bytes.end(),
              region.bytes.begin() + (sec.base - home->src_base));
  }
}

const EmulatedMemory::Region* EmulatedMemory::find(std::uint32_t dst_addr) const {
  for (const auto& r : regions_)
    if (r.dst_base <= dst_addr && dst_addr - r.dst_base < r.bytes.size()) return &r;
  return nullptr;
}

EmulatedMemory::Region* EmulatedMemory::find(std::uint32_t dst_addr) {
  for (auto& r : regions_)
    if (r.dst_base <= dst_addr && dst_addr - r.dst_base < r.bytes.size()) return &r;
  return nullptr;
}

std::uint32_t EmulatedMemory::read32(std::uint32_t dst_addr) const {
  if (dst_addr % 4 != 0)
    throw Error(ErrorCode::kMemoryFault, "misaligned load at " + json_util::hex(dst_addr));
  const Region* r = find(dst_addr);
  if (r == nullptr)
    throw Error(ErrorCode::kMemoryFault, "load from unmapped " + json_util::hex(dst_addr));
  const std::uint8_t* p = r->bytes.data() + (dst_addr - r->dst_base);
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 |
         std::uint32_t{p[3]} << 24;
}

void EmulatedMemory::write32(std::uint32_t dst_addr, std::uint32_t value) {
  if (dst_addr % 4 != 0)
    throw Error(ErrorCode::kMemoryFault, "misaligned store at " + json_util::hex(dst_addr));
  Region* r = find(dst_addr);
  if (r == nullptr)
    throw Error(ErrorCode::kMemoryFault, "store to unmapped " + json_util::hex(dst_addr));
  if (r->kind == RegionKind::kRom)
    throw Error(ErrorCode::kMemoryFault, "store to ROM at " + json_util::hex(dst_addr));
  std::uint8_t* p = r->bytes.data() + (dst_addr - r->dst_base);
  p[0] = static_cast<std::uint8_t>(value);
  p[1] = static_cast<std::uint8_t>(value >> 8);
  p[2] = static_cast<std::uint8_t>(value >> 16);
  p[3] = static_cast<std::uint8_t>(value >> 24);
}

std::uint8_t EmulatedMemory::read8(std::uint32_t dst_addr) const {
  const Region* r = find(dst_addr);
  if (r == nullptr)
    throw Error(ErrorCode::kAddressOutOfRange, "no memory at " + json_util::hex(dst_addr));
  return r->bytes[dst_addr - r->dst_base];
}

std::uint64_t EmulatedMemory::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto mix = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ull;
  };
  for (const auto& r : regions_) {
    for (int i = 0; i < 4; ++i) mix(static_cast<std::uint8_t>(r.dst_base >> (8 * i)));
    for (std::uint8_t b : r.bytes) mix(b);
  }
  return h;
}

}  // namespace cabt
