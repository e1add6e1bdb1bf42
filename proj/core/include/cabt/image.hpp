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
// Program images of the source processor plus the memory map (source ->
// target address remapping) and bus map (memory-mapped I/O devices).

#ifndef CABT_IMAGE_HPP_
#define CABT_IMAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cabt {

struct Section {
  std::string name;
  std::uint32_t base = 0;
  std::vector<std::uint8_t> bytes;
  bool executable = false;

  std::uint32_t end() const { return base + static_cast<std::uint32_t>(bytes.size()); }
  bool operator==(const Section&) const = default;
};

enum class RegionKind : std::uint8_t { kRam, kRom };

struct MemoryRegion {
  std::uint32_t src_base = 0;
  std::uint32_t src_end = 0;  // exclusive
  std::uint32_t dst_base = 0;
  RegionKind kind = RegionKind::kRam;

  std::uint32_t size() const { return src_end - src_base; }
  bool operator==(const MemoryRegion&) const = default;
};

struct MemoryMap {
  std::vector<MemoryRegion> regions;
  bool operator==(const MemoryMap&) const = default;
};

struct IoRegion {
  std::uint32_t base = 0;
  std::uint32_t end = 0;  // exclusive
  std::string device;
  bool operator==(const IoRegion&) const = default;
};

struct BusMap {
  std::vector<IoRegion> io_regions;
  bool operator==(const BusMap&) const = default;
};

// Memory map used when an image does not carry one: identity RAM over the
// low 64 KiB.
MemoryMap default_memory_map();

struct ProgramImage {
  std::uint32_t entry = 0;
  std::vector<Section> sections;  // sorted by base
  std::map<std::string, std::uint32_t> symbols;
  MemoryMap memory_map;
  BusMap bus_map;

  bool operator==(const ProgramImage&) const = default;
};

// Throws OverlapError / AlignmentError / SchemaError.
void validate(const ProgramImage& image);
void validate(const MemoryMap& mem, const BusMap& bus);

ProgramImage load_image(std::string_view json_text);
ProgramImage load_image_file(const std::filesystem::path& path);
std::string store_image(const ProgramImage& image);

struct MemoryTarget {
  std::uint32_t dst_addr = 0;
  RegionKind kind = RegionKind::kRam;
  bool operator==(const MemoryTarget&) const = default;
};

struct IoTarget {
  std::string device;
  std::uint32_t offset = 0;
  bool operator==(const IoTarget&) const = default;
};

struct Unmapped {
  bool operator==(const Unmapped&) const = default;
};

using AddressClass = std::variant<Unmapped, MemoryTarget, IoTarget>;

AddressClass classify_address(const MemoryMap& mem, const BusMap& bus, std::uint32_t addr);

// Emulated RAM/ROM in the target address space, initialized from image
// sections. Shared by the VTM and the interpretive oracle.
class EmulatedMemory {
 public:
  EmulatedMemory(const MemoryMap& map, std::span<const Section> sections);

  // Word accesses by target address. Throws MemoryFault on misalignment,
  // unmapped addresses or ROM writes.
  std::uint32_t read32(std::uint32_t dst_addr) const;
  void write32(std::uint32_t dst_addr, std::uint32_t value);

  // Debug-side byte read; throws AddressOutOfRange when unmapped.
  std::uint8_t read8(std::uint32_t dst_addr) const;

  // FNV-1a over every region (base address, then contents).
  std::uint64_t digest() const;

 private:
  struct Region {
    std::uint32_t dst_base;
    RegionKind kind;
    std::vector<std::uint8_t> bytes;
  };

  const Region* find(std::uint32_t dst_addr) const;
  Region* find(std::uint32_t dst_addr);

  std::vector<Region> regions_;
};

}  // namespace cabt

#endif  // CABT_IMAGE_HPP_
