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

#include "cadd/context/types.h"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "cadd/common/error.h"

namespace cadd::context {

using nlohmann::json;

std::string_view GenderName(Gender g) {
  switch (g) {
    case Gender::kMale: return "male";
    case Gender::kFemale: return "female";
    case Gender::kOther: return "other";
    case Gender::kUnknown: break;
  }
  return "unknown";
}

Gender ParseGender(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "male" || lower == "m") return Gender::kMale;
  if (lower == "female" || lower == "f") return Gender::kFemale;
  if (lower.empty() || lower == "unknown") return Gender::kUnknown;
  return Gender::kOther;
}

namespace {

json OptionalDate(const std::optional<Date>& d) { return d ? json(d->ToString()) : json(nullptr); }

std::string StringOr(const json& j, const char* key, std::string fallback = "") {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw ParseError(std::string("key \"") + key + "\" must be a string");
  return it->get<std::string>();
}

Date RequireDate(const json& j, const char* key) {
  return Date::Parse(StringOr(j, key));
}

}  // namespace

json ToJson(const SubjectProfile& p) {
  return json{{"description", p.description},
              {"occupations", p.occupations},
              {"gender", std::string(GenderName(p.gender))},
              {"has_spouse", p.has_spouse},
              {"n_children", p.n_children},
              {"followers", p.followers ? json(*p.followers) : json(nullptr)},
              {"birth_date", OptionalDate(p.birth_date)},
              {"category", p.category}};
}

json ToJson(const NewsArticle& a) {
  return json{{"title", a.title}, {"body", a.body}, {"published", a.published.ToString()}};
}

json ToJson(const SocialPost& p) {
  return json{{"title", p.title},
              {"body", p.body},
              {"comments", p.comments},
              {"published", p.published.ToString()}};
}

json ToJson(const ContextBundle& b) {
  json news = json::array(), posts = json::array();
  for (const auto& a : b.news) news.push_back(ToJson(a));
  for (const auto& p : b.posts) posts.push_back(ToJson(p));
  return json{{"profile", b.profile ? ToJson(*b.profile) : json(nullptr)}, {"news", news}, {"posts", posts}};
}

SubjectProfile ProfileFromJson(const json& j) {
  try {
    SubjectProfile p;
    p.description = StringOr(j, "description");
    if (j.contains("occupations") && !j["occupations"].is_null()) {
      p.occupations = j["occupations"].get<std::vector<std::string>>();
    }
    p.gender = ParseGender(StringOr(j, "gender"));
    p.has_spouse = j.value("has_spouse", false);
    p.n_children = j.value("n_children", std::int64_t{0});
    if (p.n_children < 0) throw ParseError("n_children must be non-negative");
    if (j.contains("followers") && !j["followers"].is_null()) {
      p.followers = j["followers"].get<std::int64_t>();
      if (*p.followers < 0) throw ParseError("followers must be non-negative");
    }
    if (auto bd = StringOr(j, "birth_date"); !bd.empty()) p.birth_date = Date::TryParse(bd);
    p.category = CategorizeOccupation(p.occupations);
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed profile: ") + e.what());
  }
}

NewsArticle ArticleFromJson(const json& j) {
  return NewsArticle{StringOr(j, "title"), StringOr(j, "body"), RequireDate(j, "published")};
}

SocialPost PostFromJson(const json& j) {
  try {
    SocialPost p{StringOr(j, "title"), StringOr(j, "body"), {}, RequireDate(j, "published")};
    if (j.contains("comments") && !j["comments"].is_null()) {
      p.comments = j["comments"].get<std::vector<std::string>>();
    }
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed post: ") + e.what());
  }
}

ContextBundle BundleFromJson(const json& j) {
  ContextBundle b;
  if (j.contains("profile") && !j["profile"].is_null()) b.profile = ProfileFromJson(j["profile"]);
  for (const auto& a : j.value("news", json::array())) b.news.push_back(ArticleFromJson(a));
  for (const auto& p : j.value("posts", json::array())) b.posts.push_back(PostFromJson(p));
  return b;
}

namespace {

const std::unordered_map<std::string, std::string>& OccupationTable() {
  static const auto* table = [] {
    const std::vector<std::pair<std::string, std::vector<std::string>>> groups = {
        {"Entertainment",
         {"actor", "television actor", "film actor", "film director", "film producer", "stage actor",
          "voice actor", "stand-up comedian", "comedian"}},
        {"Politics", {"politician", "diplomat", "monarch", "statesperson", "lobbyist", "first lady"}},
        {"Music",
         {"singer", "singer-songwriter", "guitarist", "drummer", "rapper", "composer", "opera singer",
          "dancer"}},
        {"Media",
         {"radio personality", "youtuber", "journalist", "opinion journalist", "pundit", "sports journalist",
          "television presenter", "television producer", "publisher"}},
        {"Sports",
         {"association football player", "cricketer", "formula one driver", "american football player",
          "basketball player", "mixed martial arts fighter", "ice hockey player", "professional wrestler",
          "tennis player"}},
        {"Writing", {"poet", "writer", "screenwriter", "novelist"}},
        {"Fashion", {"model", "fashion model", "fashion designer", "beauty pageant contestant"}},
        {"Business", {"entrepreneur", "business magnate", "economist", "businessperson", "business executive"}},
        {"Law", {"lawyer", "barrister", "jurist", "judge"}},
        {"Academia & Research", {"academic", "researcher", "teacher"}},
        {"Activism", {"disability rights activist", "activist", "environmentalist", "civil rights advocate"}},
    };
    auto* t = new std::unordered_map<std::string, std::string>;
    for (const auto& [category, occupations] : groups) {
      for (const auto& o : occupations) (*t)[o] = category;
    }
    return t;
  }();
  return *table;
}

}  // namespace

const std::vector<std::string>& Categories() {
  static const std::vector<std::string> kCategories = {
      "Entertainment", "Politics", "Music", "Media", "Sports",   "Writing",
      "Fashion",       "Business", "Law",   "Academia & Research", "Activism", "Other"};
  return kCategories;
}

std::string CategorizeOccupation(const std::vector<std::string>& occupations) {
  if (occupations.empty()) return "Other";
  std::string key = NormalizeWhitespace(occupations.front());
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  const auto& table = OccupationTable();
  auto it = table.find(key);
  return it == table.end() ? "Other" : it->second;
}

std::string NormalizeWhitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace cadd::context
