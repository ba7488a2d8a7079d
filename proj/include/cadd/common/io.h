// Copyright 2026 The CADD Authors.
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

#ifndef CADD_COMMON_IO_H_
#define CADD_COMMON_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace cadd {

std::string ReadTextFile(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so
// concurrent readers never observe a partial file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& value);

// Minimal stderr logger; `CADD_QUIET=1` silences info lines.
void LogInfo(std::string_view message);
void LogWarning(std::string_view message);

}  // namespace cadd

#endif  // CADD_COMMON_IO_H_
