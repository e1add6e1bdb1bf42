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
// Two-pass assembler and disassembler for the source ISA.
//
// Source syntax, one statement per line, ';' or '#' start a comment:
//
//   .text 0x0            section .text at 0x0 (executable)
//   .data 0x1000         section .data (not executable)
//   .section name base [exec]
//   .entry start         entry label or address (default: first .text byte)
//   .memory src_base src_end dst_base RAM|ROM
//   .bus base end device
//   .word e, ...   .ascii "s"   .asciz "s"   .space n
//   loop: add r1, r2, r3 / addi r1, r1, -1 / ld r2, [r1+4] / beq r1, r0, loop
//   li rd, value    la rd, label    mov rd, rs
//
// Expressions are sums and differences of numbers, 'c' characters and labels.
// Statements before any section directive go to .text at 0x0.

#ifndef CABT_ASSEMBLER_HPP_
#define CABT_ASSEMBLER_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include "cabt/image.hpp"
#include "cabt/procdesc.hpp"

namespace cabt {

struct AssemblyResult {
  ProgramImage image;
  std::string listing;  // address, word and source text per emitted word
};

// Throws SyntaxError naming the line.
AssemblyResult assemble(std::string_view source, const ProcessorDescription& desc);

std::string disassemble(std::uint32_t word, std::uint32_t pc, const ProcessorDescription& desc);

// One line per word of every executable section.
std::string disassemble_image(const ProgramImage& image, const ProcessorDescription& desc);

}  // namespace cabt

#endif  // CABT_ASSEMBLER_HPP_
