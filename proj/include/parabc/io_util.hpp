// Copyright 2026 The parabc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace parabc {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Parses a full string as a double; throws MalformedCsv naming `what`.
double parse_number(std::string_view text, std::string_view what);

/// Writes via a sibling temporary file and rename, so readers never see a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace parabc
