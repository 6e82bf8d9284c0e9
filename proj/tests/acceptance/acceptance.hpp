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

#include <ostream>
#include <string>

namespace acceptance {

inline constexpr int kSkipped = 77;

/// Prints "PASS|FAIL <name>: <detail>" and returns `ok`.
inline bool report(std::ostream& out, bool ok, const std::string& name, const std::string& detail) {
  out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  return ok;
}

/// Bundled-fixture property suite. Returns true when every item passes.
bool run_properties(std::ostream& out);

/// Published-dataset criteria read from $CRISISTL_DATASET. Returns 0 when
/// all pass, 1 on a failure and kSkipped without a dataset.
int run_dataset(std::ostream& out);

}  // namespace acceptance
