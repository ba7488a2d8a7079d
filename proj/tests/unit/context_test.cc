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

#include <atomic>
#include <thread>

#include <gtest/gtest.h>

#include "cadd/common/error.h"
#include "cadd/common/io.h"
#include "cadd/context/providers.h"
#include "httplib.h"
#include "unit/test_util.h"

namespace cadd::context {
namespace {

using nlohmann::json;

TEST(CategoryTest, FirstOccupationDecides) {
  EXPECT_EQ(CategorizeOccupation({"politician", "lawyer"}), "Politics");
  EXPECT_EQ(CategorizeOccupation({"lawyer", "politician"}), "Law");
  EXPECT_EQ(CategorizeOccupation({}), "Other");
  EXPECT_EQ(CategorizeOccupation({"astronaut"}), "Other");
  EXPECT_EQ(CategorizeOccupation({"Film Actor"}), "Entertainment");
  EXPECT_EQ(CategorizeOccupation({"First Lady"}), "Politics");
  EXPECT_EQ(CategorizeOccupation({"teacher"}), "Academia & Research");
  EXPECT_EQ(Categories().size(), 12u);
}

TEST(TypesTest, BundleJsonRoundTrip) {
  ContextBundle b;
  b.profile = SubjectProfile{"Indian businessman", {"entrepreneur"}, Gender::kMale, true, 3, std::nullopt,
                             Date(1957, 4, 19), "Business"};
  b.news.push_back({"t", "body", Date(2024, 1, 2)});
  b.posts.push_back({"pt", "pb", {"c1", "c2"}, Date(2024, 1, 3)});
  EXPECT_EQ(BundleFromJson(ToJson(b)), b);
}

TEST(TypesTest, NormalizeWhitespace) {
  EXPECT_EQ(NormalizeWhitespace("  a \n\t b  c "), "a b c");
  EXPECT_EQ(NormalizeWhitespace(""), "");
}

class StubFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    json news = json::array();
    for (int d = 1; d <= 15; ++d) {
      news.push_back({{"title", "day " + std::to_string(d)}, {"body", "b"}, {"published", Date(2024, 3, d).ToString()}});
    }
    news.push_back({{"title", "after"}, {"body", "b"}, {"published", "2024-03-20"}});
    news.push_back({{"title", "tie-first"}, {"body", "b"}, {"published", "2024-03-15"}});
    json posts = json::array();
    for (int d = 1; d <= 12; ++d) {
      json comments = json::array();
      for (int c = 0; c < 14; ++c) comments.push_back("comment " + std::to_string(c));
      posts.push_back({{"title", "p"}, {"body", "x"}, {"comments", comments}, {"published", Date(2024, 2, d).ToString()}});
    }
    WriteJsonFile(dir_ / "jane_doe.json",
                  {{"profile", {{"description", "politician"}, {"occupations", {"politician", "lawyer"}}, {"gender", "female"}}},
                   {"news", news},
                   {"posts", posts}});
    providers_ = MakeStubProviders(dir_.path());
    stub_ = std::static_pointer_cast<FixtureContextStub>(providers_.news);
  }

  cadd::testing::TempDir dir_;
  ProviderSet providers_;
  std::shared_ptr<FixtureContextStub> stub_;
};

TEST_F(StubFixture, UnknownSubjectIsEmpty) {
  const auto b = FetchContext("Nobody Known", Date(2024, 1, 1), providers_);
  EXPECT_FALSE(b.profile.has_value());
  EXPECT_TRUE(b.news.empty());
  EXPECT_TRUE(b.posts.empty());
}

TEST_F(StubFixture, TenMostRecentBeforeCutoff) {
  const auto b = FetchContext("Jane Doe", Date(2024, 3, 15), providers_);
  ASSERT_EQ(b.news.size(), 10u);
  EXPECT_EQ(b.news[0].title, "day 15");
  EXPECT_EQ(b.news[1].title, "tie-first");
  EXPECT_EQ(b.news[2].title, "day 14");
  for (std::size_t i = 0; i < b.news.size(); ++i) {
    EXPECT_LE(b.news[i].published, Date(2024, 3, 15));
    if (i > 0) EXPECT_GE(b.news[i - 1].published, b.news[i].published);
  }
  ASSERT_EQ(b.posts.size(), 10u);
  for (const auto& p : b.posts) EXPECT_EQ(p.comments.size(), 10u);
  EXPECT_EQ(b.profile->category, "Politics");
  EXPECT_EQ(b.profile->gender, Gender::kFemale);
}

TEST_F(StubFixture, NoCutoffKeepsEverythingUpToCap) {
  const auto b = FetchContext("Jane Doe", std::nullopt, providers_);
  ASSERT_EQ(b.news.size(), 10u);
  EXPECT_EQ(b.news[0].title, "after");
}

TEST_F(StubFixture, CacheAvoidsSecondProviderCall) {
  cadd::testing::TempDir cache_dir;
  ContextCache cache(cache_dir.path());
  const auto first = FetchContext("Jane Doe", Date(2024, 3, 10), providers_, &cache);
  const int calls = stub_->calls();
  const auto second = FetchContext("Jane Doe", Date(2024, 3, 10), providers_, &cache);
  EXPECT_EQ(stub_->calls(), calls);
  EXPECT_EQ(first, second);
  FetchContext("Jane Doe", Date(2024, 3, 11), providers_, &cache);
  EXPECT_GT(stub_->calls(), calls);
}

TEST_F(StubFixture, ItwCutoffIsFixed) {
  EXPECT_EQ(ItwCutoff().ToString(), "2024-07-24");
}

TEST(CachePropertyTest, ConcurrentWritersLeaveValidFile) {
  cadd::testing::TempDir dir;
  ContextCache cache(dir.path());
  ContextBundle b;
  b.news.push_back({"t", "b", Date(2024, 1, 1)});
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      for (int k = 0; k < 20; ++k) cache.Put("s", Date(2024, 1, 1), b);
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(cache.Get("s", Date(2024, 1, 1)), b);
}

// Local server standing in for the three public APIs.
class LiveFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Get("/w/api.php", [](const httplib::Request& req, httplib::Response& res) {
      if (req.get_param_value("action") == "wbsearchentities") {
        if (req.get_param_value("search") == "Mukesh Ambani") {
          res.set_content(R"({"search":[{"id":"Q298547"}]})", "application/json");
        } else {
          res.set_content(R"({"search":[]})", "application/json");
        }
      } else {
        res.set_content(R"({"entities":{"Q1":{"labels":{"en":{"value":"entrepreneur"}}},
                                         "Q2":{"labels":{"en":{"value":"graphic designer"}}}}})",
                        "application/json");
      }
    });
    server_.Get("/wiki/Special:EntityData/Q298547.json", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"entities":{"Q298547":{
        "descriptions":{"en":{"value":"Indian businessman"}},
        "claims":{
          "P21":[{"mainsnak":{"datavalue":{"value":{"id":"Q6581097"}}}}],
          "P26":[{"mainsnak":{"datavalue":{"value":{"id":"Q5"}}}}],
          "P40":[{"mainsnak":{}},{"mainsnak":{}},{"mainsnak":{}}],
          "P569":[{"mainsnak":{"datavalue":{"value":{"time":"+1957-04-19T00:00:00Z"}}}}],
          "P106":[{"mainsnak":{"datavalue":{"value":{"id":"Q1"}}}},{"mainsnak":{"datavalue":{"value":{"id":"Q2"}}}}]
        }}}})",
                      "application/json");
    });
    server_.Get("/search-news", [this](const httplib::Request& req, httplib::Response& res) {
      ++news_hits_;
      if (req.get_header_value("x-api-key") != "k") {
        res.status = 401;
        return;
      }
      if (flaky_ && news_hits_ < 3) {
        res.status = 503;
        return;
      }
      last_news_query_ = req.get_param_value("latest-publish-date");
      res.set_content(R"({"news":[{"title":"A","text":"body a","publish_date":"2024-03-01 10:00:00"},
                                  {"title":"B","text":"body b","publish_date":"2024-03-09 08:00:00"}]})",
                      "application/json");
    });
    server_.Get("/search.json", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"data":{"children":[
        {"data":{"title":"new","selftext":"x","created_utc":1718000000,"permalink":"/r/a/comments/1/new/"}},
        {"data":{"title":"old","selftext":"y","created_utc":1709251200,"permalink":"/r/a/comments/2/old/"}}]}})",
                      "application/json");
    });
    server_.Get(R"(/r/a/comments/(\d+)/(\w+)\.json)", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"([{"data":{}},{"data":{"children":[{"kind":"t1","data":{"body":"first"}},
                                                        {"kind":"more","data":{}}]}}])",
                      "application/json");
    });
    server_.Get("/always-fails", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();

    const std::string base = "http://127.0.0.1:" + std::to_string(port_);
    endpoints_.wikidata = endpoints_.news = endpoints_.reddit = base;
    endpoints_.news_api_key = "k";
    endpoints_.retry.initial_backoff = std::chrono::milliseconds(1);
    endpoints_.retry.timeout = std::chrono::milliseconds(5000);
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  LiveEndpoints endpoints_;
  std::atomic<int> news_hits_{0};
  bool flaky_ = false;
  std::string last_news_query_;
};

TEST_F(LiveFixture, WikidataProfile) {
  WikidataProfileClient client(endpoints_);
  auto p = client.FetchProfile("Mukesh Ambani");
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->description, "Indian businessman");
  EXPECT_EQ(p->gender, Gender::kMale);
  EXPECT_TRUE(p->has_spouse);
  EXPECT_EQ(p->n_children, 3);
  EXPECT_FALSE(p->followers.has_value());
  EXPECT_EQ(p->birth_date->ToString(), "1957-04-19");
  EXPECT_EQ(p->occupations, (std::vector<std::string>{"entrepreneur", "graphic designer"}));
  EXPECT_EQ(p->category, "Business");
  EXPECT_FALSE(client.FetchProfile("Nobody").has_value());
}

TEST_F(LiveFixture, NewsWithCutoffAndRetry) {
  flaky_ = true;
  WorldNewsClient client(endpoints_);
  auto news = client.FetchNews("Mukesh Ambani", Date(2024, 3, 5));
  EXPECT_EQ(news_hits_.load(), 3);
  EXPECT_EQ(last_news_query_, "2024-03-05 23:59:59");
  ASSERT_EQ(news.size(), 2u);
  // The client-side filter still applies when finalizing.
  ContextBundle b;
  b.news = news;
  EXPECT_EQ(FinalizeBundle(b, Date(2024, 3, 5)).news.size(), 1u);
}

TEST_F(LiveFixture, AuthFailureIsNotRetriable) {
  endpoints_.news_api_key = "wrong";
  WorldNewsClient client(endpoints_);
  try {
    client.FetchNews("x", std::nullopt);
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_FALSE(e.retriable());
  }
  EXPECT_EQ(news_hits_.load(), 1);
}

TEST_F(LiveFixture, ServerErrorsExhaustRetries) {
  HttpJsonClient client("http://127.0.0.1:" + std::to_string(port_), endpoints_.retry, "t");
  try {
    client.Get("/always-fails", {});
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_TRUE(e.retriable());
  }
  EXPECT_EQ(client.requests(), endpoints_.retry.max_attempts);
}

TEST_F(LiveFixture, TransportFailureIsRetriable) {
  LiveEndpoints dead = endpoints_;
  dead.wikidata = "http://127.0.0.1:1";
  dead.retry.max_attempts = 2;
  WikidataProfileClient client(dead);
  try {
    client.FetchProfile("x");
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_TRUE(e.retriable());
  }
}

TEST_F(LiveFixture, RedditPostsFilteredByCutoff) {
  RedditClient client(endpoints_);
  auto posts = client.FetchPosts("Mukesh Ambani", Date(2024, 3, 5));
  ASSERT_EQ(posts.size(), 1u);
  EXPECT_EQ(posts[0].title, "old");
  EXPECT_EQ(posts[0].comments, std::vector<std::string>{"first"});
  EXPECT_EQ(client.FetchPosts("Mukesh Ambani", std::nullopt).size(), 2u);
}

TEST_F(LiveFixture, FullLiveFetch) {
  auto providers = MakeLiveProviders(endpoints_);
  auto b = FetchContext("Mukesh Ambani", Date(2024, 3, 9), providers);
  EXPECT_TRUE(b.profile.has_value());
  EXPECT_EQ(b.news.size(), 2u);
  EXPECT_EQ(b.news[0].title, "B");
  EXPECT_EQ(b.posts.size(), 1u);
}

}  // namespace
}  // namespace cadd::context
