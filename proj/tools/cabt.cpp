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

// Command-line driver: translate, run, oracle, compare, debug, plus the
// asm/disasm/describe helpers used to build the program corpus.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cabt/assembler.hpp"
#include "cabt/cachemodel.hpp"
#include "cabt/codegen.hpp"
#include "cabt/debugger.hpp"
#include "cabt/error.hpp"
#include "cabt/frontend.hpp"
#include "cabt/oracle.hpp"
#include "cabt/report.hpp"
#include "cabt/timing.hpp"
#include "cabt/vtm.hpp"

namespace {

using namespace cabt;

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or stdout for "-".
void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
}

ProcessorDescription load_desc(const std::string& path) {
  return path.empty() ? tk32_description() : load_description_file(path);
}

DetailLevel level_arg(int level) {
  auto l = parse_level(level);
  if (!l) throw CLI::ValidationError("--level", "must be 1, 2 or 3");
  return *l;
}

DeviceKinds parse_devices(const std::vector<std::string>& specs) {
  DeviceKinds kinds;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("--device", "expected name=kind, got '" + s + "'");
    make_device(s.substr(eq + 1));  // rejects unknown kinds before anything runs
    if (!kinds.emplace(s.substr(0, eq), s.substr(eq + 1)).second)
      throw Error(ErrorCode::kDuplicateDevice, "device '" + s.substr(0, eq) + "' given twice");
  }
  return kinds;
}

std::string escape(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (c == '\n') out += "\\n";
    else if (c == '\\') out += "\\\\";
    else if (c == '"') out += "\\\"";
    else if (c < 0x20 || c >= 0x7f) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\x%02x", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

void print_result(const RunResult& r, DeviceRegistry& devices, const DeviceKinds& kinds) {
  char digest[24];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(r.memory_digest));
  std::cout << "hwclock " << r.hwclock << "\n"
            << "host_ops " << r.host_ops << "\n"
            << "instructions " << r.instructions << "\n"
            << "static_cycles " << r.breakdown.static_cycles << "\n"
            << "branch_correction " << r.breakdown.branch_correction << "\n"
            << "cache_correction " << r.breakdown.cache_correction << "\n"
            << "bus_accesses " << r.bus_trace.size() << "\n"
            << "memory_digest " << digest << "\n";
  for (unsigned i = 0; i < r.registers.size(); ++i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%sr%u=%08x", i ? " " : "", i, r.registers[i]);
    std::cout << buf;
  }
  std::cout << "\n";
  for (const auto& [name, kind] : kinds)
    if (auto* uart = devices.find_as<UartDevice>(name))
      std::cout << "output " << name << " \"" << escape(uart->output()) << "\"\n";
}

void write_trace(const std::string& path, const std::vector<BusEvent>& trace) {
  if (path.empty()) return;
  std::ostringstream ss;
  write_bus_trace(ss, trace);
  write_output(path, ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-accurate static binary translator for TK32 programs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string desc_path;
  app.add_option("--desc", desc_path, "Processor description JSON (default: built-in TK32)");

  // translate
  auto* translate = app.add_subcommand("translate", "Translate an image into an annotated program");
  std::string image_path, out_path = "-", cfg_out, timing_out, cabs_out, variant_name = "block";
  int level = 1;
  translate->add_option("--image", image_path, "Program image")->required();
  translate->add_option("--level", level, "Detail level 1-3");
  translate->add_option("--variant", variant_name, "block or instruction")
      ->check(CLI::IsMember({"block", "instruction"}));
  translate->add_option("-o,--out", out_path, "Output file ('-' for stdout)");
  translate->add_option("--dump-cfg", cfg_out, "Write the recovered control flow graph");
  translate->add_option("--dump-timing", timing_out, "Write per-block static cycles (CSV)");
  translate->add_option("--dump-cabs", cabs_out, "Write cache analysis blocks (CSV)");

  // run
  auto* run = app.add_subcommand("run", "Execute a translated program on the virtual target");
  std::string translated_path, trace_out;
  std::vector<std::string> device_specs;
  std::uint64_t max_ops = kDefaultMaxOps;
  auto* run_image = run->add_option("--image", image_path, "Program image (translated on the fly)");
  auto* run_translated = run->add_option("--translated", translated_path, "Translated program");
  run_image->excludes(run_translated);
  run->add_option("--level", level, "Detail level when translating --image");
  run->add_option("--device", device_specs, "Bus device name=kind (null, counter, uart[:input])");
  run->add_option("--trace-out", trace_out, "Bus trace CSV");
  run->add_option("--max-ops", max_ops, "Target op limit");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Run the interpretive reference simulator");
  bool flush = false, continuous = false;
  std::string branch_on = "off", icache_on = "off";
  oracle->add_option("--image", image_path, "Program image")->required();
  auto* flush_flag = oracle->add_flag("--flush", flush, "Clear pipeline state at block boundaries");
  oracle->add_flag("--continuous", continuous, "Carry pipeline state across blocks")
      ->excludes(flush_flag);
  oracle->add_option("--branch", branch_on, "Branch outcome model")->check(CLI::IsMember({"on", "off"}));
  oracle->add_option("--icache", icache_on, "Instruction cache model")->check(CLI::IsMember({"on", "off"}));
  oracle->add_option("--device", device_specs, "Bus device name=kind");
  oracle->add_option("--trace-out", trace_out, "Bus trace CSV");
  oracle->add_option("--max-ops", max_ops, "Instruction limit");

  // compare
  auto* compare = app.add_subcommand("compare", "Cycle deviation and op-count report (CSV)");
  std::vector<std::string> images;
  compare->add_option("images", images, "Program images")->required();
  compare->add_option("--device", device_specs, "Bus device name=kind");
  compare->add_option("-o,--out", out_path, "Output CSV ('-' for stdout)");
  compare->add_option("--max-ops", max_ops, "Op limit per run");

  // debug
  auto* debug = app.add_subcommand("debug", "Debug a program over a line protocol on stdin/stdout");
  debug->add_option("--image", image_path, "Program image")->required();
  debug->add_option("--level", level, "Detail level 1-3");
  debug->add_option("--device", device_specs, "Bus device name=kind");
  debug->add_option("--max-ops", max_ops, "Target op limit per command");

  // asm / disasm
  auto* asm_cmd = app.add_subcommand("asm", "Assemble TK32 source into a program image");
  std::string source_path, listing_out;
  asm_cmd->add_option("source", source_path, "Assembly source")->required();
  asm_cmd->add_option("-o,--out", out_path, "Output image ('-' for stdout)");
  asm_cmd->add_option("--listing", listing_out, "Write an address/word listing");
  auto* disasm = app.add_subcommand("disasm", "Disassemble the code of a program image");
  disasm->add_option("image", image_path, "Program image")->required();

  auto* describe = app.add_subcommand("describe", "Print the processor description as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    const ProcessorDescription desc = load_desc(desc_path);
    const RunLimits limits{max_ops};

    if (*translate) {
      const DetailLevel lvl = level_arg(level);
      const ProgramImage image = load_image_file(image_path);
      auto blocks = recover_blocks(image, desc);
      const auto timings = time_blocks(blocks, desc);
      if (lvl == DetailLevel::kBranchICache) {
        if (!desc.icache)
          throw Error(ErrorCode::kMissingCacheSpec,
                      "detail level 3 needs an instruction cache in the description");
        assign_cabs(blocks, *desc.icache);
      }
      if (!cfg_out.empty()) {
        std::ostringstream ss;
        dump_cfg(ss, blocks);
        write_output(cfg_out, ss.str());
      }
      if (!timing_out.empty()) {
        std::ostringstream ss;
        dump_timing(ss, timings);
        write_output(timing_out, ss.str());
      }
      if (!cabs_out.empty()) {
        if (!desc.icache)
          throw Error(ErrorCode::kMissingCacheSpec, "--dump-cabs needs an instruction cache");
        if (lvl != DetailLevel::kBranchICache) assign_cabs(blocks, *desc.icache);
        std::ostringstream ss;
        dump_cabs(ss, blocks);
        write_output(cabs_out, ss.str());
      }
      const Variant variant =
          variant_name == "block" ? Variant::kBlockOriented : Variant::kInstructionOriented;
      write_output(out_path,
                   serialize_program(emit_program(blocks, timings, lvl, desc, variant, image)));
      return 0;
    }

    if (*run) {
      TranslatedProgram prog;
      if (!translated_path.empty()) {
        prog = parse_program(read_file(translated_path));
      } else if (!image_path.empty()) {
        prog = translate_image(load_image_file(image_path), desc, level_arg(level));
      } else {
        throw CLI::ValidationError("run", "needs --image or --translated");
      }
      const DeviceKinds kinds = parse_devices(device_specs);
      DeviceRegistry devices;
      register_bus_devices(devices, prog.bus_map, kinds);
      const RunResult r = vm_run(prog, devices, limits);
      write_trace(trace_out, r.bus_trace);
      print_result(r, devices, kinds);
      return 0;
    }

    if (*oracle) {
      const ProgramImage image = load_image_file(image_path);
      OracleConfig cfg;
      cfg.continuous = continuous;
      cfg.block_flush = !continuous;
      cfg.model_branch = branch_on == "on";
      cfg.model_icache = icache_on == "on";
      const DeviceKinds kinds = parse_devices(device_specs);
      DeviceRegistry devices;
      register_bus_devices(devices, image.bus_map, kinds);
      const OracleResult r = reference_run(image, desc, cfg, devices, limits);
      write_trace(trace_out, r.run.bus_trace);
      std::cout << "cycles " << r.run.hwclock << "\n";
      print_result(r.run, devices, kinds);
      return 0;
    }

    if (*compare) {
      const DeviceKinds kinds = parse_devices(device_specs);
      std::vector<ReportRow> rows;
      for (const auto& path : images)
        rows.push_back(compare_program(std::filesystem::path(path).stem().string(),
                                       load_image_file(path), desc, kinds, limits));
      std::ostringstream ss;
      write_report_csv(ss, rows);
      write_output(out_path, ss.str());
      return 0;
    }

    if (*debug) {
      const ProgramImage image = load_image_file(image_path);
      const DeviceKinds kinds = parse_devices(device_specs);
      DeviceRegistry devices;
      register_bus_devices(devices, image.bus_map, kinds);
      DebugSession session = make_debug_session(image, desc, level_arg(level), devices, limits);
      serve(session, std::cin, std::cout);
      return 0;
    }

    if (*asm_cmd) {
      const AssemblyResult r = assemble(read_file(source_path), desc);
      write_output(out_path, store_image(r.image));
      if (!listing_out.empty()) write_output(listing_out, r.listing);
      return 0;
    }

    if (*describe) {
      std::cout << store_description(desc);
      return 0;
    }

    if (*disasm) {
      std::cout << disassemble_image(load_image_file(image_path), desc);
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    // Device errors can only come from --device here, since unlisted bus
    // devices default to null.
    const bool input = is_input_error(e.code()) || e.code() == ErrorCode::kUnknownDevice ||
                       e.code() == ErrorCode::kDuplicateDevice;
    return input ? kExitInput : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
