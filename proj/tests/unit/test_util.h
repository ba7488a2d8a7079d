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

#ifndef CADD_TESTS_UNIT_TEST_UTIL_H_
#define CADD_TESTS_UNIT_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cadd/data/dataset.h"

namespace cadd::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Manifest with n_real then n_fake samples; audio paths are not created.
data::DatasetManifest MakeManifest(std::size_t n_real, std::size_t n_fake,
                                   const std::string& prefix = "s");

std::filesystem::path FixtureDir();

}  // namespace cadd::testing

#endif  // CADD_TESTS_UNIT_TEST_UTIL_H_
