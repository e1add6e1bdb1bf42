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

#include "json_util.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>

namespace cabt::json_util {

void schema_error(std::string_view context, const std::string& message) {
  throw Error(ErrorCode::kSchema, std::string(context) + ": " + message);
}

json parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    schema_error(what, std::string("malformed JSON (") + e.what() + ")");
  }
}

void check_keys(const json& obj, std::string_view context,
                std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional) {
  if (!obj.is_object()) schema_error(context, "expected an object");
  for (std::string_view key : required) {
    if (!obj.contains(std::string(key)))
      schema_error(context, "missing field '" + std::string(key) + "'");
  }
  for (const auto& [key, value] : obj.items()) {
    const bool known =
        std::find(required.begin(), required.end(), key) != required.end() ||
        std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) schema_error(context, "unexpected field '" + key + "'");
  }
}

const json& field(const json& obj, std::string_view key, std::string_view context) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) schema_error(context, "missing field '" + std::string(key) + "'");
  return *it;
}

std::int64_t get_i64(const json& obj, std::string_view key, std::string_view context) {
  const json& v = field(obj, key, context);
  if (!v.is_number_integer())
    schema_error(context, "field '" + std::string(key) + "' must be an integer");
  return v.get<std::int64_t>();
}

std::uint32_t get_u32(const json& obj, std::string_view key, std::string_view context) {
  std::int64_t v = get_i64(obj, key, context);
  if (v < 0 || v > std::numeric_limits<std::uint32_t>::max())
    schema_error(context, "field '" + std::string(key) + "' out of range");
  return static_cast<std::uint32_t>(v);
}

std::string get_string(const json& obj, std::string_view key, std::string_view context) {
  const json& v = field(obj, key, context);
  if (!v.is_string())
    schema_error(context, "field '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

bool get_bool(const json& obj, std::string_view key, std::string_view context) {
  const json& v = field(obj, key, context);
  if (!v.is_boolean())
    schema_error(context, "field '" + std::string(key) + "' must be a boolean");
  return v.get<bool>();
}

std::uint32_t parse_hex_u32(const json& value, std::string_view context) {
  if (value.is_number_unsigned()) {
    auto v = value.get<std::uint64_t>();
    if (v > std::numeric_limits<std::uint32_t>::max()) schema_error(context, "address out of range");
    return static_cast<std::uint32_t>(v);
  }
  if (!value.is_string()) schema_error(context, "expected hex text");
  std::string_view s = value.get_ref<const std::string&>();
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s.remove_prefix(2);
  std::uint32_t out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    schema_error(context, "bad hex value '" + value.get<std::string>() + "'");
  return out;
}

std::uint32_t get_hex_u32(const json& obj, std::string_view key, std::string_view context) {
  return parse_hex_u32(field(obj, key, context),
                       std::string(context) + "." + std::string(key));
}

std::string hex(std::uint32_t value) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%x", value);
  return buf;
}

std::string bytes_to_hex(const std::uint8_t* data, std::size_t size) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(size * 2);
  for (std::size_t i = 0; i < size; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xf]);
  }
  return out;
}

std::vector<std::uint8_t> hex_to_bytes(std::string_view text, std::string_view context) {
  std::string digits;
  digits.reserve(text.size());
  for (char c : text) {
    if (c == ' ' || c == '\n' || c == '\t') continue;
    digits.push_back(c);
  }
  if (digits.size() % 2 != 0) schema_error(context, "hex data has an odd number of digits");
  std::vector<std::uint8_t> out(digits.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto [ptr, ec] = std::from_chars(digits.data() + 2 * i, digits.data() + 2 * i + 2, out[i], 16);
    if (ec != std::errc() || ptr != digits.data() + 2 * i + 2)
      schema_error(context, "bad hex byte at offset " + std::to_string(i));
  }
  return out;
}

}  // namespace cabt::json_util
