#include <gtest/gtest.h>

#include <filesystem>
#include <memory>

#include "foresight/provider_cache.hpp"
#include "foresight/providers_mock.hpp"
#include "testutil.hpp"

using namespace foresight;

namespace {

struct CacheDir {
    std::filesystem::path path;
    CacheDir() {
        path = std::filesystem::temp_directory_path() /
               ("foresight_cache_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
    }
    ~CacheDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST(DiskCache, PutGetEnvelope) {
    CacheDir dir;
    DiskCache cache(dir.path);
    EXPECT_FALSE(cache.get("missing").has_value());
    cache.put("key one", {{"q", "x"}}, {{"text", "hello"}});
    auto hit = cache.get("key one");
    ASSERT_TRUE(hit.has_value());
    EXPECT_EQ(hit->at("text"), "hello");

    // Envelope structure on disk: request, response, fetched_at.
    size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir.path)) {
        ++files;
        std::ifstream in(entry.path());
        nlohmann::json envelope;
        in >> envelope;
        EXPECT_TRUE(envelope.contains("request"));
        EXPECT_TRUE(envelope.contains("response"));
        EXPECT_TRUE(envelope.contains("fetched_at"));
    }
    EXPECT_EQ(files, 1u);
}

TEST(CachedCompletion, HitBypassesInnerProvider) {
    CacheDir dir;
    auto inner = std::make_shared<ScriptedCompletionProvider>();
    inner->set_default("the answer is *0.5*");
    auto cache = std::make_shared<DiskCache>(dir.path);
    CachedCompletionProvider cached(inner, cache);

    EXPECT_EQ(cached.complete("m", "prompt text", 0.0, 100), "the answer is *0.5*");
    EXPECT_EQ(cached.complete("m", "prompt text", 0.0, 100), "the answer is *0.5*");
    EXPECT_EQ(inner->call_count(), 1u);

    // Different temperature or model is a different key.
    cached.complete("m", "prompt text", 0.5, 100);
    cached.complete("m2", "prompt text", 0.0, 100);
    EXPECT_EQ(inner->call_count(), 3u);
}

TEST(CachedNews, KeyedByProviderQueryRange) {
    CacheDir dir;
    auto inner = std::make_shared<FixtureNewsProvider>("api", std::vector<ArticleRecord>{}, 3);
    auto cache = std::make_shared<DiskCache>(dir.path);
    CachedNewsProvider cached(inner, cache);

    Date from(2023, 1, 1), to(2023, 1, 10);
    auto first = cached.search("query", from, to, 3);
    auto second = cached.search("query", from, to, 3);
    ASSERT_EQ(first.size(), second.size());
    for (size_t i = 0; i < first.size(); ++i) {
        EXPECT_EQ(first[i].url, second[i].url);
        EXPECT_EQ(first[i].publish_date, second[i].publish_date);
    }
    // A different range misses the cache.
    auto third = cached.search("query", from, to + 5, 3);
    EXPECT_FALSE(third.empty());
    size_t files = 0;
    for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir.path))
        ++files;
    EXPECT_EQ(files, 2u);
}

TEST(DiskCache, CorruptEntryIsMiss) {
    CacheDir dir;
    DiskCache cache(dir.path);
    cache.put("key", {{"q", 1}}, {{"text", "x"}});
    for (const auto& entry : std::filesystem::directory_iterator(dir.path)) {
        std::ofstream out(entry.path());
        out << "{not json";
    }
    EXPECT_FALSE(cache.get("key").has_value());
}
