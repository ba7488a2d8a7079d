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

#ifndef CADD_COMMON_VARIANT_H_
#define CADD_COMMON_VARIANT_H_

#include <string>
#include <string_view>

namespace cadd {

// Which side inputs accompany the audio: none, transcript, context or both.
enum class Variant { kBaseline, kT, kC, kTPlusC };

std::string_view VariantName(Variant v);
// Accepts "baseline", "T", "C", "T+C" and the CADD(..) spellings.
Variant ParseVariant(std::string_view text);

inline bool UsesTranscript(Variant v) { return v == Variant::kT || v == Variant::kTPlusC; }
inline bool UsesContext(Variant v) { return v == Variant::kC || v == Variant::kTPlusC; }

}  // namespace cadd

#endif  // CADD_COMMON_VARIANT_H_
