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

#include "cabt/devices.hpp"

#include "cabt/error.hpp"

namespace cabt {

std::uint32_t UartDevice::read(std::uint64_t, std::uint32_t offset) {
  switch (offset) {
    case kRx: {
      if (input_.empty()) return 0;
      const auto c = static_cast<unsigned char>(input_.front());
      input_.pop_front();
      return c;
    }
    case kStatus:
      return static_cast<std::uint32_t>(input_.size());
    default:
      return 0;
  }
}

void UartDevice::write(std::uint64_t hwclock, std::uint32_t offset, std::uint32_t value) {
  if (offset != kTx) return;
  output_.push_back(static_cast<char>(value & 0xff));
  tx_times_.push_back(hwclock);
}

Device& DeviceRegistry::register_device(const std::string& name, std::unique_ptr<Device> device) {
  if (!device) throw Error(ErrorCode::kInternal, "null device for '" + name + "'");
  auto [it, inserted] = devices_.emplace(name, std::move(device));
  if (!inserted) throw Error(ErrorCode::kDuplicateDevice, "device '" + name + "' already registered");
  return *it->second;
}

Device& DeviceRegistry::get(std::string_view name) {
  Device* d = find(name);
  if (d == nullptr) throw Error(ErrorCode::kUnknownDevice, "no device named '" + std::string(name) + "'");
  return *d;
}

Device* DeviceRegistry::find(std::string_view name) {
  auto it = devices_.find(name);
  return it == devices_.end() ? nullptr : it->second.get();
}

bool DeviceRegistry::contains(std::string_view name) const { return devices_.contains(name); }

std::unique_ptr<Device> make_device(std::string_view kind) {
  if (kind == "null") return std::make_unique<NullDevice>();
  if (kind == "counter") return std::make_unique<CounterDevice>();
  if (kind == "uart") return std::make_unique<UartDevice>();
  if (kind.starts_with("uart:")) return std::make_unique<UartDevice>(kind.substr(5));
  throw Error(ErrorCode::kUnknownDevice, "unknown device kind '" + std::string(kind) + "'");
}

}  // namespace cabt
