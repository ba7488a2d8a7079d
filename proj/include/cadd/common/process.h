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

#ifndef CADD_COMMON_PROCESS_H_
#define CADD_COMMON_PROCESS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cadd {

// Looks up an executable on PATH (or checks an explicit path).
std::optional<std::filesystem::path> FindExecutable(const std::string& name);

// Runs argv[0] with the given arguments, stdout/stderr discarded unless
// capture_stdout is set. Returns the exit status; throws EnvironmentError if
// the process cannot be started.
int RunProcess(const std::vector<std::string>& argv, std::string* captured_stdout = nullptr);

// Unique scratch directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  ScratchDir();
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace cadd

#endif  // CADD_COMMON_PROCESS_H_
