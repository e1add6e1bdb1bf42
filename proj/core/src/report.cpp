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

#include "cabt/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "cabt/codegen.hpp"
#include "cabt/oracle.hpp"
#include "cabt/vtm.hpp"

namespace cabt {

void register_bus_devices(DeviceRegistry& registry, const BusMap& bus, const DeviceKinds& kinds) {
  for (const auto& [name, kind] : kinds)
    if (!registry.contains(name)) registry.register_device(name, make_device(kind));
  for (const auto& io : bus.io_regions)
    if (!registry.contains(io.device)) registry.register_device(io.device, make_device("null"));
}

double deviation(std::uint64_t measured, std::uint64_t reference) {
  if (reference == 0) return measured == 0 ? 0.0 : INFINITY;
  const double diff = measured > reference ? static_cast<double>(measured - reference)
                                           : static_cast<double>(reference - measured);
  return diff / static_cast<double>(reference);
}

ReportRow compare_program(const std::string& name, const ProgramImage& image,
                          const ProcessorDescription& desc, const DeviceKinds& kinds,
                          RunLimits limits) {
  ReportRow row;
  row.program = name;
  {
    DeviceRegistry devices;
    register_bus_devices(devices, image.bus_map, kinds);
    const OracleResult o = reference_run(image, desc, full_continuous_config(), devices, limits);
    row.oracle_cycles = o.run.hwclock;
    row.instr_count = o.run.instructions;
  }
  {
    DeviceRegistry devices;
    register_bus_devices(devices, image.bus_map, kinds);
    row.flush_cycles =
        reference_run(image, desc, config_for_level(DetailLevel::kBranchICache), devices, limits)
            .run.hwclock;
  }
  for (int l = 1; l <= 3; ++l) {
    DeviceRegistry devices;
    register_bus_devices(devices, image.bus_map, kinds);
    const RunResult r = vm_run(translate_image(image, desc, *parse_level(l)), devices, limits);
    row.level_cycles[l - 1] = r.hwclock;
    row.level_dev[l - 1] = deviation(r.hwclock, row.oracle_cycles);
    row.host_ops[l - 1] = r.host_ops;
  }
  row.l3_flush_dev = deviation(row.level_cycles[2], row.flush_cycles);
  return row;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "program,instr_count,oracle_cycles,l1_cycles,l1_dev,l2_cycles,l2_dev,l3_cycles,l3_dev,"
         "l1_hostops,l2_hostops,l3_hostops,flush_cycles,l3_flush_dev,"
         "l1_ops_per_instr,l2_ops_per_instr,l3_ops_per_instr\n";
  const auto fixed = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out << r.program << "," << r.instr_count << "," << r.oracle_cycles;
    for (int l = 0; l < 3; ++l) out << "," << r.level_cycles[l] << "," << fixed(r.level_dev[l]);
    for (int l = 0; l < 3; ++l) out << "," << r.host_ops[l];
    out << "," << r.flush_cycles << "," << fixed(r.l3_flush_dev);
    for (int l = 0; l < 3; ++l) out << "," << fixed(r.ops_per_instr(l));
    out << "\n";
  }
}

}  // namespace cabt
