// Copyright 2026 The crisistl Authors.
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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace crisistl {

/// Parses the TOML subset used by pipeline config files into a JSON tree:
/// [table] and [dotted.table] headers, bare/quoted/dotted keys, basic and
/// literal strings, integers, floats, booleans, (multi-line) arrays and
/// inline tables. Dates must be written as strings. Throws DataError with
/// the offending line.
nlohmann::json parse_toml(std::string_view text);

nlohmann::json load_toml_file(const std::filesystem::path& path);

/// Reads a CSV file (RFC 4180 quoting, CRLF or LF) into rows of fields.
/// The header row is returned as the first row.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Writes atomically via a temporary sibling file and rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace crisistl
