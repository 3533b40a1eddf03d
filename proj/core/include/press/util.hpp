// Copyright 2026 The press Authors
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

#ifndef PRESS_UTIL_HPP_
#define PRESS_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace press {

// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Stable 64-bit value derived from a SHA-256 digest; used to seed RNGs.
uint64_t stable_hash64(std::string_view data);

// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
double unit_interval(uint64_t bits);

// UTC timestamp, ISO-8601 with millisecond precision.
std::string utc_timestamp();

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
// Lower-case, collapse whitespace, trim. Used for text-equality checks.
std::string normalize_text(std::string_view s);

namespace csv {

using Row = std::vector<std::string>;

// RFC 4180: quoted fields, doubled quotes, embedded newlines.
std::vector<Row> parse(std::string_view text);
std::string escape_field(std::string_view field);
std::string format_row(const Row& row);
std::string format(const std::vector<Row>& rows);

}  // namespace csv

namespace jsonl {

std::vector<nlohmann::json> read(const std::filesystem::path& path);
// Writes atomically (temp file + rename). Output is deterministic: keys sorted.
void write(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

}  // namespace jsonl

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Runs body(i) for i in [0, count) on up to `parallelism` threads. The first
// exception thrown by any body is rethrown after all workers stop.
void parallel_for(size_t count, size_t parallelism, const std::function<void(size_t)>& body);

}  // namespace press

#endif  // PRESS_UTIL_HPP_
