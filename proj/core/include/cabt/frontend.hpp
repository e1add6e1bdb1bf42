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
// Decoding, basic-block recovery, static base-address analysis and block
// splitting at I/O accesses.

#ifndef CABT_FRONTEND_HPP_
#define CABT_FRONTEND_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cabt/image.hpp"
#include "cabt/ir.hpp"
#include "cabt/procdesc.hpp"

namespace cabt {

IrInstruction to_ir(const Decoded& decoded, std::uint32_t addr);

// One instruction per word of every executable section, in address order.
// Throws IllegalInstruction naming the address.
std::vector<IrInstruction> decode_program(const ProgramImage& image,
                                          const ProcessorDescription& desc);

// Throws TargetOutOfRange when a branch target or a fallthrough leaves the
// decoded code.
std::vector<BasicBlock> build_cfg(std::vector<IrInstruction> ir, std::uint32_t entry);

// Intra-block constant propagation; fills io_target of every load/store.
void analyze_bases(std::vector<BasicBlock>& blocks, const MemoryMap& mem, const BusMap& bus);

// Isolates every I/O and unresolved load/store in its own block.
std::vector<BasicBlock> split_at_io(std::vector<BasicBlock> blocks);

// decode_program -> build_cfg -> analyze_bases -> split_at_io.
std::vector<BasicBlock> recover_blocks(const ProgramImage& image,
                                       const ProcessorDescription& desc);

// One line per block: id, [start,end), successors.
void dump_cfg(std::ostream& out, const std::vector<BasicBlock>& blocks);

}  // namespace cabt

#endif  // CABT_FRONTEND_HPP_
