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

// Small helpers for strict JSON document parsing. Private to cabt_core.

#ifndef CABT_SRC_JSON_UTIL_HPP_
#define CABT_SRC_JSON_UTIL_HPP_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cabt/error.hpp"

namespace cabt::json_util {

using nlohmann::json;

json parse(std::string_view text, std::string_view what);

// Rejects missing required keys and keys outside required+optional.
void check_keys(const json& obj, std::string_view context,
                std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional = {});

const json& field(const json& obj, std::string_view key, std::string_view context);

std::uint32_t get_u32(const json& obj, std::string_view key, std::string_view context);
std::int64_t get_i64(const json& obj, std::string_view key, std::string_view context);
std::string get_string(const json& obj, std::string_view key, std::string_view context);
bool get_bool(const json& obj, std::string_view key, std::string_view context);

// "0x1f" style text. Accepts a bare JSON number as well.
std::uint32_t get_hex_u32(const json& obj, std::string_view key, std::string_view context);
std::uint32_t parse_hex_u32(const json& value, std::string_view context);
std::string hex(std::uint32_t value);

std::string bytes_to_hex(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> hex_to_bytes(std::string_view text, std::string_view context);

[[noreturn]] void schema_error(std::string_view context, const std::string& message);

}  // namespace cabt::json_util

#endif  // CABT_SRC_JSON_UTIL_HPP_
