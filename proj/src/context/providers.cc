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

#include "cadd/context/providers.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/io.h"
#include "httplib.h"

namespace cadd::context {

using nlohmann::json;

FixtureContextStub::FixtureContextStub(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string FixtureContextStub::Slug(const std::string& subject) {
  std::string slug;
  for (unsigned char c : subject) {
    if (std::isalnum(c)) {
      slug.push_back(static_cast<char>(std::tolower(c)));
    } else if (!slug.empty() && slug.back() != '_') {
      slug.push_back('_');
    }
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  return slug;
}

std::optional<json> FixtureContextStub::Load(const std::string& subject) {
  ++calls_;
  const auto path = dir_ / (Slug(subject) + ".json");
  if (!std::filesystem::exists(path)) return std::nullopt;
  return ReadJsonFile(path);
}

std::optional<SubjectProfile> FixtureContextStub::FetchProfile(const std::string& subject) {
  auto j = Load(subject);
  if (!j || !j->contains("profile") || (*j)["profile"].is_null()) return std::nullopt;
  return ProfileFromJson((*j)["profile"]);
}

std::vector<NewsArticle> FixtureContextStub::FetchNews(const std::string& subject, const std::optional<Date>&) {
  std::vector<NewsArticle> out;
  if (auto j = Load(subject)) {
    for (const auto& a : j->value("news", json::array())) out.push_back(ArticleFromJson(a));
  }
  return out;
}

std::vector<SocialPost> FixtureContextStub::FetchPosts(const std::string& subject, const std::optional<Date>&) {
  std::vector<SocialPost> out;
  if (auto j = Load(subject)) {
    for (const auto& p : j->value("posts", json::array())) out.push_back(PostFromJson(p));
  }
  return out;
}

ProviderSet MakeStubProviders(const std::filesystem::path& fixture_dir) {
  auto stub = std::make_shared<FixtureContextStub>(fixture_dir);
  return ProviderSet{stub, stub, stub, false};
}

HttpJsonClient::HttpJsonClient(std::string base_url, RetryPolicy retry, std::string user_agent,
                               std::chrono::milliseconds min_interval)
    : retry_(retry), user_agent_(std::move(user_agent)), min_interval_(min_interval) {
  const auto scheme_end = base_url.find("://");
  const auto path_start = base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  origin_ = base_url.substr(0, path_start);
  if (path_start != std::string::npos) prefix_ = base_url.substr(path_start);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (retry_.max_attempts < 1) throw ValidationError("retry policy needs at least one attempt");
}

std::optional<json> HttpJsonClient::Get(const std::string& path, const std::multimap<std::string, std::string>& params,
                                        const std::map<std::string, std::string>& headers) {
  std::lock_guard<std::mutex> lock(mu_);
  httplib::Client client(origin_);
  const auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(retry_.timeout).count();
  client.set_connection_timeout(static_cast<time_t>(timeout_s));
  client.set_read_timeout(static_cast<time_t>(timeout_s));
  client.set_follow_location(true);
  httplib::Headers hdrs{{"User-Agent", user_agent_}, {"Accept", "application/json"}};
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  const httplib::Params query(params.begin(), params.end());

  auto backoff = retry_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    const auto since = std::chrono::steady_clock::now() - last_request_;
    if (since < min_interval_) std::this_thread::sleep_for(min_interval_ - since);
    last_request_ = std::chrono::steady_clock::now();
    ++requests_;

    auto res = client.Get(prefix_ + path, query, hdrs);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 404) {
      return std::nullopt;
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
    } else if (res->status >= 400) {
      throw ProviderError(origin_ + prefix_ + path + ": HTTP " + std::to_string(res->status), false);
    } else {
      try {
        return json::parse(res->body);
      } catch (const json::exception&) {
        throw ProviderError(origin_ + prefix_ + path + ": invalid JSON response", false);
      }
    }
    if (attempt < retry_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(static_cast<long long>(backoff.count() * retry_.multiplier));
    }
  }
  throw ProviderError(origin_ + prefix_ + path + ": " + last_error + " after " +
                          std::to_string(retry_.max_attempts) + " attempts",
                      true);
}

namespace {

std::string EnvOr(const std::string& value, const char* var) {
  if (!value.empty()) return value;
  const char* env = std::getenv(var);
  return env == nullptr ? "" : env;
}

const json* ClaimValue(const json& entity, const char* property, std::size_t index = 0) {
  auto claims = entity.find("claims");
  if (claims == entity.end() || !claims->contains(property)) return nullptr;
  const auto& list = (*claims)[property];
  if (!list.is_array() || list.size() <= index) return nullptr;
  auto snak = list[index].find("mainsnak");
  if (snak == list[index].end()) return nullptr;
  auto dv = snak->find("datavalue");
  if (dv == snak->end()) return nullptr;
  auto v = dv->find("value");
  return v == dv->end() ? nullptr : &*v;
}

std::size_t ClaimCount(const json& entity, const char* property) {
  auto claims = entity.find("claims");
  if (claims == entity.end() || !claims->contains(property)) return 0;
  return (*claims)[property].size();
}

std::optional<std::int64_t> QuantityAmount(const json* v) {
  if (v == nullptr || !v->contains("amount")) return std::nullopt;
  return static_cast<std::int64_t>(std::llround(std::stod((*v)["amount"].get<std::string>())));
}

}  // namespace

WikidataProfileClient::WikidataProfileClient(const LiveEndpoints& e)
    : http_(e.wikidata, e.retry, e.user_agent, e.min_interval) {}

std::optional<SubjectProfile> WikidataProfileClient::FetchProfile(const std::string& subject) {
  auto search = http_.Get("/w/api.php", {{"action", "wbsearchentities"},
                                         {"search", subject},
                                         {"language", "en"},
                                         {"type", "item"},
                                         {"limit", "1"},
                                         {"format", "json"}});
  if (!search || !search->contains("search") || (*search)["search"].empty()) return std::nullopt;
  const std::string id = (*search)["search"][0].value("id", "");
  if (id.empty()) return std::nullopt;

  auto data = http_.Get("/wiki/Special:EntityData/" + id + ".json", {});
  if (!data || !data->contains("entities")) return std::nullopt;
  const auto& entities = (*data)["entities"];
  if (!entities.contains(id)) return std::nullopt;
  const json& entity = entities[id];

  SubjectProfile p;
  if (auto d = entity.find("descriptions"); d != entity.end() && d->contains("en")) {
    p.description = (*d)["en"].value("value", "");
  }
  if (const json* g = ClaimValue(entity, "P21")) {
    const std::string q = g->value("id", "");
    p.gender = q == "Q6581097" ? Gender::kMale : q == "Q6581072" ? Gender::kFemale : Gender::kOther;
  }
  p.has_spouse = ClaimCount(entity, "P26") > 0;
  if (auto n = QuantityAmount(ClaimValue(entity, "P1971"))) {
    p.n_children = *n;
  } else {
    p.n_children = static_cast<std::int64_t>(ClaimCount(entity, "P40"));
  }
  p.followers = QuantityAmount(ClaimValue(entity, "P8687"));
  if (const json* b = ClaimValue(entity, "P569"); b != nullptr && b->contains("time")) {
    std::string t = (*b)["time"].get<std::string>();
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) t = t.substr(1);
    p.birth_date = Date::TryParse(t);
  }

  std::vector<std::string> occupation_ids;
  for (std::size_t i = 0; i < ClaimCount(entity, "P106"); ++i) {
    if (const json* o = ClaimValue(entity, "P106", i)) occupation_ids.push_back(o->value("id", ""));
  }
  if (!occupation_ids.empty()) {
    std::string ids;
    for (const auto& o : occupation_ids) ids += (ids.empty() ? "" : "|") + o;
    auto labels = http_.Get("/w/api.php", {{"action", "wbgetentities"},
                                           {"ids", ids},
                                           {"props", "labels"},
                                           {"languages", "en"},
                                           {"format", "json"}});
    for (const auto& o : occupation_ids) {
      if (!labels || !labels->contains("entities") || !(*labels)["entities"].contains(o)) continue;
      const auto& l = (*labels)["entities"][o].value("labels", json::object());
      if (l.contains("en")) p.occupations.push_back(l["en"].value("value", ""));
    }
  }
  p.category = CategorizeOccupation(p.occupations);
  return p;
}

WorldNewsClient::WorldNewsClient(const LiveEndpoints& e)
    : http_(e.news, e.retry, e.user_agent, e.min_interval), api_key_(EnvOr(e.news_api_key, "WORLDNEWS_API_KEY")) {}

std::vector<NewsArticle> WorldNewsClient::FetchNews(const std::string& subject, const std::optional<Date>& cutoff) {
  if (api_key_.empty()) throw ProviderError("WORLDNEWS_API_KEY is not set", false);
  std::multimap<std::string, std::string> params{{"text", subject},
                                                 {"language", "en"},
                                                 {"number", std::to_string(kMaxNews)},
                                                 {"sort", "publish-time"},
                                                 {"sort-direction", "DESC"}};
  if (cutoff) params.emplace("latest-publish-date", cutoff->ToString() + " 23:59:59");
  auto res = http_.Get("/search-news", params, {{"x-api-key", api_key_}});
  std::vector<NewsArticle> out;
  if (!res) return out;
  for (const auto& item : res->value("news", json::array())) {
    auto date = Date::TryParse(item.value("publish_date", ""));
    if (!date) continue;
    out.push_back({item.value("title", ""), item.value("text", ""), *date});
  }
  return out;
}

RedditClient::RedditClient(const LiveEndpoints& e)
    : http_(e.reddit, e.retry, e.user_agent, e.min_interval), token_(EnvOr(e.reddit_token, "REDDIT_TOKEN")) {}

std::vector<SocialPost> RedditClient::FetchPosts(const std::string& subject, const std::optional<Date>& cutoff) {
  std::map<std::string, std::string> headers;
  if (!token_.empty()) headers["Authorization"] = "bearer " + token_;
  auto res = http_.Get("/search.json", {{"q", "\"" + subject + "\""}, {"sort", "new"}, {"limit", "100"}, {"type", "link"}},
                       headers);
  std::vector<SocialPost> out;
  if (!res) return out;
  const auto children = res->value("data", json::object()).value("children", json::array());
  for (const auto& child : children) {
    if (out.size() == kMaxPosts) break;
    const auto& d = child.value("data", json::object());
    const Date published = Date::FromUnixSeconds(static_cast<long long>(d.value("created_utc", 0.0)));
    if (cutoff && published > *cutoff) continue;
    SocialPost post{d.value("title", ""), d.value("selftext", ""), {}, published};
    const std::string permalink = d.value("permalink", "");
    if (!permalink.empty()) {
      std::string path = permalink;
      while (!path.empty() && path.back() == '/') path.pop_back();
      auto thread = http_.Get(path + ".json", {{"limit", std::to_string(kMaxComments)}, {"depth", "1"}}, headers);
      if (thread && thread->is_array() && thread->size() >= 2) {
        for (const auto& c : (*thread)[1].value("data", json::object()).value("children", json::array())) {
          if (post.comments.size() == kMaxComments) break;
          if (c.value("kind", "") != "t1") continue;
          post.comments.push_back(c.value("data", json::object()).value("body", ""));
        }
      }
    }
    out.push_back(std::move(post));
  }
  return out;
}

ProviderSet MakeLiveProviders(const LiveEndpoints& endpoints) {
  return ProviderSet{std::make_shared<WikidataProfileClient>(endpoints), std::make_shared<WorldNewsClient>(endpoints),
                     std::make_shared<RedditClient>(endpoints), true};
}

ContextCache::ContextCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path ContextCache::PathFor(const std::string& subject, const std::optional<Date>& cutoff) const {
  const std::string key = subject + '\x1f' + (cutoff ? cutoff->ToString() : "none");
  return dir_ / (HexDigest(Fnv1a64(key)) + ".json");
}

std::optional<ContextBundle> ContextCache::Get(const std::string& subject, const std::optional<Date>& cutoff) const {
  const auto path = PathFor(subject, cutoff);
  if (!std::filesystem::exists(path)) return std::nullopt;
  const json j = ReadJsonFile(path);
  const std::string want_cutoff = cutoff ? cutoff->ToString() : "";
  if (j.value("subject", "") != subject || j.value("cutoff", "") != want_cutoff) return std::nullopt;
  return BundleFromJson(j.at("bundle"));
}

void ContextCache::Put(const std::string& subject, const std::optional<Date>& cutoff,
                       const ContextBundle& bundle) const {
  WriteJsonFile(PathFor(subject, cutoff),
                json{{"subject", subject}, {"cutoff", cutoff ? cutoff->ToString() : ""}, {"bundle", ToJson(bundle)}});
}

namespace {

template <typename T>
void FilterSortCap(std::vector<T>& items, const std::optional<Date>& cutoff, std::size_t cap) {
  if (cutoff) {
    std::erase_if(items, [&](const T& item) { return item.published > *cutoff; });
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const T& a, const T& b) { return a.published > b.published; });
  if (items.size() > cap) items.resize(cap);
}

}  // namespace

ContextBundle FinalizeBundle(ContextBundle bundle, const std::optional<Date>& cutoff) {
  FilterSortCap(bundle.news, cutoff, kMaxNews);
  FilterSortCap(bundle.posts, cutoff, kMaxPosts);
  for (auto& a : bundle.news) {
    a.title = NormalizeWhitespace(a.title);
    a.body = NormalizeWhitespace(a.body);
  }
  for (auto& p : bundle.posts) {
    p.title = NormalizeWhitespace(p.title);
    p.body = NormalizeWhitespace(p.body);
    if (p.comments.size() > kMaxComments) p.comments.resize(kMaxComments);
    for (auto& c : p.comments) c = NormalizeWhitespace(c);
  }
  if (bundle.profile) {
    bundle.profile->description = NormalizeWhitespace(bundle.profile->description);
    bundle.profile->category = CategorizeOccupation(bundle.profile->occupations);
  }
  return bundle;
}

ContextBundle FetchContext(const std::string& subject, const std::optional<Date>& cutoff, ProviderSet& providers,
                           const ContextCache* cache) {
  const std::optional<Date> effective = cutoff || !providers.live ? cutoff : std::optional<Date>(Date::Today());
  if (cache != nullptr) {
    if (auto hit = cache->Get(subject, effective)) return *hit;
  }
  ContextBundle bundle;
  if (providers.profile) bundle.profile = providers.profile->FetchProfile(subject);
  if (providers.news) bundle.news = providers.news->FetchNews(subject, effective);
  if (providers.social) bundle.posts = providers.social->FetchPosts(subject, effective);
  bundle = FinalizeBundle(std::move(bundle), effective);
  if (cache != nullptr) cache->Put(subject, effective, bundle);
  return bundle;
}

Date ItwCutoff() { return Date(2024, 7, 24); }

}  // namespace cadd::context
