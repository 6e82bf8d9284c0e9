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

#include <chrono>
#include <string>
#include <string_view>

namespace crisistl {

using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

/// Parses "YYYY-MM-DDTHH:MM:SS" followed by "Z" or a "+HH:MM"/"-HH:MM"
/// offset. Fractional seconds are truncated. Throws DataError.
Timestamp parse_rfc3339(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Timestamp t);

/// Parses "15h", "30m", "45s", "2d" or a combination such as "1h30m".
/// A bare number is read as seconds.
Duration parse_duration(std::string_view text);

/// Inverse of parse_duration, using the largest exact unit ("15h", "90m").
std::string format_duration(Duration d);

}  // namespace crisistl
