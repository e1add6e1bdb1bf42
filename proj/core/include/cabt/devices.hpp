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
// Memory-mapped bus devices. A device sees word accesses at offsets inside
// its bus window together with the hardware clock of the access.

#ifndef CABT_DEVICES_HPP_
#define CABT_DEVICES_HPP_

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace cabt {

class Device {
 public:
  virtual ~Device() = default;
  virtual std::uint32_t read(std::uint64_t hwclock, std::uint32_t offset) = 0;
  virtual void write(std::uint64_t hwclock, std::uint32_t offset, std::uint32_t value) = 0;
};

// Reads return 0, writes are ignored.
class NullDevice : public Device {
 public:
  std::uint32_t read(std::uint64_t, std::uint32_t) override { return 0; }
  void write(std::uint64_t, std::uint32_t, std::uint32_t) override {}
};

// Reads return the number of accesses that came before.
class CounterDevice : public Device {
 public:
  std::uint32_t read(std::uint64_t, std::uint32_t) override {
    return static_cast<std::uint32_t>(accesses_++);
  }
  void write(std::uint64_t, std::uint32_t, std::uint32_t) override { ++accesses_; }
  std::uint64_t accesses() const { return accesses_; }

 private:
  std::uint64_t accesses_ = 0;
};

// Minimal serial port. Offset 0 transmits the low byte of a write, offset 4
// pops the next received byte (0 when empty), offset 8 reads the number of
// bytes still waiting.
class UartDevice : public Device {
 public:
  static constexpr std::uint32_t kTx = 0;
  static constexpr std::uint32_t kRx = 4;
  static constexpr std::uint32_t kStatus = 8;

  explicit UartDevice(std::string_view input = {}) : input_(input.begin(), input.end()) {}

  std::uint32_t read(std::uint64_t hwclock, std::uint32_t offset) override;
  void write(std::uint64_t hwclock, std::uint32_t offset, std::uint32_t value) override;

  const std::string& output() const { return output_; }
  // hwclock of every transmitted byte, in order.
  const std::vector<std::uint64_t>& tx_times() const { return tx_times_; }

 private:
  std::deque<char> input_;
  std::string output_;
  std::vector<std::uint64_t> tx_times_;
};

class CallbackDevice : public Device {
 public:
  using ReadFn = std::function<std::uint32_t(std::uint64_t, std::uint32_t)>;
  using WriteFn = std::function<void(std::uint64_t, std::uint32_t, std::uint32_t)>;

  CallbackDevice(ReadFn read, WriteFn write) : read_(std::move(read)), write_(std::move(write)) {}

  std::uint32_t read(std::uint64_t hwclock, std::uint32_t offset) override {
    return read_ ? read_(hwclock, offset) : 0;
  }
  void write(std::uint64_t hwclock, std::uint32_t offset, std::uint32_t value) override {
    if (write_) write_(hwclock, offset, value);
  }

 private:
  ReadFn read_;
  WriteFn write_;
};

class DeviceRegistry {
 public:
  // Throws DuplicateDevice when `name` is taken.
  Device& register_device(const std::string& name, std::unique_ptr<Device> device);
  // Throws UnknownDevice.
  Device& get(std::string_view name);
  Device* find(std::string_view name);
  bool contains(std::string_view name) const;

  template <typename T>
  T* find_as(std::string_view name) {
    return dynamic_cast<T*>(find(name));
  }

 private:
  std::map<std::string, std::unique_ptr<Device>, std::less<>> devices_;
};

// "null", "counter", "uart" or "uart:<input text>". Throws UnknownDevice.
std::unique_ptr<Device> make_device(std::string_view kind);

}  // namespace cabt

#endif  // CABT_DEVICES_HPP_
