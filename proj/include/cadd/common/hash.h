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

#ifndef CADD_COMMON_HASH_H_
#define CADD_COMMON_HASH_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace cadd {

// 64-bit FNV-1a. Stable across platforms and runs, used for cache keys,
// config hashes and the stub embedders.
std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t Fnv1a64(std::span<const double> values, std::uint64_t seed = 0xcbf29ce484222325ULL);

// SplitMix64 finalizer; a cheap bijective mixer for deriving seeds.
std::uint64_t Mix64(std::uint64_t x);

std::string HexDigest(std::uint64_t h);

}  // namespace cadd

#endif  // CADD_COMMON_HASH_H_
