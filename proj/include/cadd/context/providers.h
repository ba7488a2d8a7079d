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

#ifndef CADD_CONTEXT_PROVIDERS_H_
#define CADD_CONTEXT_PROVIDERS_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cadd/context/types.h"

namespace cadd::context {

// Providers return std::nullopt / empty lists when the subject is unknown and
// throw ProviderError on transport failures.
class ProfileProvider {
 public:
  virtual ~ProfileProvider() = default;
  virtual std::optional<SubjectProfile> FetchProfile(const std::string& subject) = 0;
};

class NewsProvider {
 public:
  virtual ~NewsProvider() = default;
  virtual std::vector<NewsArticle> FetchNews(const std::string& subject, const std::optional<Date>& cutoff) = 0;
};

class SocialProvider {
 public:
  virtual ~SocialProvider() = default;
  virtual std::vector<SocialPost> FetchPosts(const std::string& subject, const std::optional<Date>& cutoff) = 0;
};

struct ProviderSet {
  std::shared_ptr<ProfileProvider> profile;
  std::shared_ptr<NewsProvider> news;
  std::shared_ptr<SocialProvider> social;
  // Live sets substitute today's date for an absent cutoff.
  bool live = false;
};

// Reads <dir>/<slug>.json with optional "profile", "news" and "posts" keys.
// A missing file means an unknown subject.
class FixtureContextStub : public ProfileProvider, public NewsProvider, public SocialProvider {
 public:
  explicit FixtureContextStub(std::filesystem::path dir);

  std::optional<SubjectProfile> FetchProfile(const std::string& subject) override;
  std::vector<NewsArticle> FetchNews(const std::string& subject, const std::optional<Date>& cutoff) override;
  std::vector<SocialPost> FetchPosts(const std::string& subject, const std::optional<Date>& cutoff) override;

  int calls() const { return calls_.load(); }
  static std::string Slug(const std::string& subject);

 private:
  std::optional<nlohmann::json> Load(const std::string& subject);

  std::filesystem::path dir_;
  std::atomic<int> calls_{0};
};

ProviderSet MakeStubProviders(const std::filesystem::path& fixture_dir);

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
  std::chrono::milliseconds timeout{15000};
};

struct LiveEndpoints {
  std::string wikidata = "https://www.wikidata.org";
  std::string news = "https://api.worldnewsapi.com";
  std::string reddit = "https://www.reddit.com";
  // Read from WORLDNEWS_API_KEY / REDDIT_TOKEN when empty.
  std::string news_api_key;
  std::string reddit_token;
  std::string user_agent = "cadd-context/1.0";
  RetryPolicy retry;
  // Minimum spacing between consecutive requests of one client.
  std::chrono::milliseconds min_interval{0};
};

// JSON GET with retry and exponential backoff. 404 gives std::nullopt;
// 429/5xx/transport errors are retried and finally raise a retriable
// ProviderError; other 4xx raise a non-retriable one.
class HttpJsonClient {
 public:
  HttpJsonClient(std::string base_url, RetryPolicy retry, std::string user_agent,
                 std::chrono::milliseconds min_interval = std::chrono::milliseconds{0});

  std::optional<nlohmann::json> Get(const std::string& path,
                                    const std::multimap<std::string, std::string>& params,
                                    const std::map<std::string, std::string>& headers = {});
  int requests() const { return requests_; }

 private:
  std::string origin_;
  std::string prefix_;
  RetryPolicy retry_;
  std::string user_agent_;
  std::chrono::milliseconds min_interval_;
  std::chrono::steady_clock::time_point last_request_{};
  std::mutex mu_;
  int requests_ = 0;
};

class WikidataProfileClient : public ProfileProvider {
 public:
  explicit WikidataProfileClient(const LiveEndpoints& endpoints);
  std::optional<SubjectProfile> FetchProfile(const std::string& subject) override;

 private:
  HttpJsonClient http_;
};

class WorldNewsClient : public NewsProvider {
 public:
  explicit WorldNewsClient(const LiveEndpoints& endpoints);
  std::vector<NewsArticle> FetchNews(const std::string& subject, const std::optional<Date>& cutoff) override;

 private:
  HttpJsonClient http_;
  std::string api_key_;
};

class RedditClient : public SocialProvider {
 public:
  explicit RedditClient(const LiveEndpoints& endpoints);
  std::vector<SocialPost> FetchPosts(const std::string& subject, const std::optional<Date>& cutoff) override;

 private:
  HttpJsonClient http_;
  std::string token_;
};

ProviderSet MakeLiveProviders(const LiveEndpoints& endpoints);

// Content-addressed bundle cache; one JSON file per (subject, cutoff),
// written through a temp file and rename so concurrent writers are safe.
class ContextCache {
 public:
  explicit ContextCache(std::filesystem::path dir);
  std::optional<ContextBundle> Get(const std::string& subject, const std::optional<Date>& cutoff) const;
  void Put(const std::string& subject, const std::optional<Date>& cutoff, const ContextBundle& bundle) const;
  std::filesystem::path PathFor(const std::string& subject, const std::optional<Date>& cutoff) const;

 private:
  std::filesystem::path dir_;
};

// Queries the providers, keeps items dated on or before the cutoff, orders
// them newest first (stable on ties) and caps each list at 10 (comments per
// post likewise). Results are cached when a cache is given.
ContextBundle FetchContext(const std::string& subject, const std::optional<Date>& cutoff,
                           ProviderSet& providers, const ContextCache* cache = nullptr);

// Applies the date filter, ordering and caps to an already fetched bundle.
ContextBundle FinalizeBundle(ContextBundle bundle, const std::optional<Date>& cutoff);

// Fixed publication date used for every in-the-wild sample.
Date ItwCutoff();

}  // namespace cadd::context

#endif  // CADD_CONTEXT_PROVIDERS_H_
