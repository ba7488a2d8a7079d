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

#include "cadd/common/variant.h"

#include <algorithm>
#include <cctype>

#include "cadd/common/error.h"

namespace cadd {

std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kBaseline: return "baseline";
    case Variant::kT: return "T";
    case Variant::kC: return "C";
    case Variant::kTPlusC: return "T+C";
  }
  return "?";
}

Variant ParseVariant(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (s.starts_with("CADD(") && s.ends_with(")")) s = s.substr(5, s.size() - 6);
  if (s == "BASELINE" || s == "NONE") return Variant::kBaseline;
  if (s == "T") return Variant::kT;
  if (s == "C") return Variant::kC;
  if (s == "T+C" || s == "TC" || s == "T_PLUS_C") return Variant::kTPlusC;
  throw ValidationError("unknown variant: " + std::string(text));
}

}  // namespace cadd
