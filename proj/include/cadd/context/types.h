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

#ifndef CADD_CONTEXT_TYPES_H_
#define CADD_CONTEXT_TYPES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cadd/common/date.h"
#include "json.hpp"

namespace cadd::context {

inline constexpr std::size_t kMaxNews = 10;
inline constexpr std::size_t kMaxPosts = 10;
inline constexpr std::size_t kMaxComments = 10;

enum class Gender { kUnknown, kMale, kFemale, kOther };

std::string_view GenderName(Gender g);
Gender ParseGender(std::string_view text);

struct SubjectProfile {
  std::string description;
  std::vector<std::string> occupations;
  Gender gender = Gender::kUnknown;
  bool has_spouse = false;
  std::int64_t n_children = 0;
  std::optional<std::int64_t> followers;
  std::optional<Date> birth_date;
  std::string category = "Other";

  bool operator==(const SubjectProfile&) const = default;
};

struct NewsArticle {
  std::string title;
  std::string body;
  Date published;

  bool operator==(const NewsArticle&) const = default;
};

struct SocialPost {
  std::string title;
  std::string body;
  std::vector<std::string> comments;
  Date published;

  bool operator==(const SocialPost&) const = default;
};

struct ContextBundle {
  std::optional<SubjectProfile> profile;
  std::vector<NewsArticle> news;
  std::vector<SocialPost> posts;

  bool empty() const { return !profile && news.empty() && posts.empty(); }
  bool operator==(const ContextBundle&) const = default;
};

nlohmann::json ToJson(const SubjectProfile& p);
nlohmann::json ToJson(const NewsArticle& a);
nlohmann::json ToJson(const SocialPost& p);
nlohmann::json ToJson(const ContextBundle& b);

SubjectProfile ProfileFromJson(const nlohmann::json& j);
NewsArticle ArticleFromJson(const nlohmann::json& j);
SocialPost PostFromJson(const nlohmann::json& j);
ContextBundle BundleFromJson(const nlohmann::json& j);

// First occupation decides; unmapped or empty gives "Other".
std::string CategorizeOccupation(const std::vector<std::string>& occupations);
const std::vector<std::string>& Categories();

// Collapses whitespace runs to one space and trims both ends.
std::string NormalizeWhitespace(std::string_view text);

}  // namespace cadd::context

#endif  // CADD_CONTEXT_TYPES_H_
