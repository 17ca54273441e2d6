#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "foresight/dates.hpp"
#include "foresight/errors.hpp"
#include "foresight/providers.hpp"
#include "foresight/util.hpp"

namespace foresight {

/// One file per key with a JSON envelope {request, response, fetched_at}.
/// Concurrent readers are fine; writes go through a per-key mutex and an
/// atomic rename.
class DiskCache {
public:
    explicit DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create cache dir " + dir_.string() + ": " + ec.message());
    }

    std::optional<nlohmann::json> get(const std::string& key) const {
        std::ifstream in(path_for(key));
        if (!in) return std::nullopt;
        nlohmann::json envelope;
        try {
            in >> envelope;
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;  // corrupt entry, treat as miss
        }
        if (!envelope.contains("response")) return std::nullopt;
        return envelope["response"];
    }

    void put(const std::string& key, nlohmann::json request, nlohmann::json response) {
        std::lock_guard lock(key_mutex(key));
        nlohmann::json envelope = {
            {"request", std::move(request)},
            {"response", std::move(response)},
            {"fetched_at", now_iso8601()},
        };
        auto final_path = path_for(key);
        auto tmp_path = final_path;
        tmp_path += ".tmp";
        {
            std::ofstream out(tmp_path);
            if (!out) throw IoError("cannot write cache entry " + tmp_path.string());
            out << envelope.dump(2) << "\n";
        }
        std::filesystem::rename(tmp_path, final_path);
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path path_for(const std::string& key) const {
        std::string prefix;
        for (char c : key.substr(0, 40))
            prefix.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
        return dir_ / (prefix + "-" + hex64(fnv1a64(key)) + ".json");
    }

    std::mutex& key_mutex(const std::string& key) {
        std::lock_guard lock(map_mu_);
        auto& m = mutexes_[fnv1a64(key) % 64];
        return m;
    }

    static std::string now_iso8601() {
        auto now = std::chrono::system_clock::now();
        std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    std::filesystem::path dir_;
    std::mutex map_mu_;
    std::map<uint64_t, std::mutex> mutexes_;
};

/// Wraps a completion provider with the disk cache, keyed by
/// (model, prompt hash, temperature). Hits bypass the inner provider.
class CachedCompletionProvider : public CompletionProvider {
public:
    CachedCompletionProvider(std::shared_ptr<CompletionProvider> inner,
                             std::shared_ptr<DiskCache> cache)
        : inner_(std::move(inner)), cache_(std::move(cache)) {}

    std::string complete(const std::string& model_id, const std::string& prompt,
                         double temperature, int max_output) override {
        char temp_buf[32];
        std::snprintf(temp_buf, sizeof(temp_buf), "%.3f", temperature);
        const std::string key =
            "lm|" + inner_->provider_id() + "|" + model_id + "|" + hex64(fnv1a64(prompt)) + "|" +
            temp_buf;
        if (auto hit = cache_->get(key)) return hit->at("text").get<std::string>();
        std::string text = inner_->complete(model_id, prompt, temperature, max_output);
        cache_->put(key,
                    {{"model", model_id},
                     {"prompt", prompt},
                     {"temperature", temperature},
                     {"max_output", max_output}},
                    {{"text", text}});
        return text;
    }

    int context_budget(const std::string& model_id) const override {
        return inner_->context_budget(model_id);
    }
    std::string provider_id() const override { return inner_->provider_id(); }

private:
    std::shared_ptr<CompletionProvider> inner_;
    std::shared_ptr<DiskCache> cache_;
};

namespace detail {

inline nlohmann::json article_to_json(const ArticleRecord& a) {
    nlohmann::json j = {
        {"url", a.url},       {"title", a.title},
        {"publish_date", a.publish_date.str()},
        {"full_text", a.full_text},
        {"source_api", a.source_api},
        {"search_query", a.search_query},
    };
    if (a.relevance_rating) j["relevance_rating"] = *a.relevance_rating;
    if (a.similarity) j["similarity"] = *a.similarity;
    if (a.summary) j["summary"] = *a.summary;
    return j;
}

inline ArticleRecord article_from_json(const nlohmann::json& j) {
    ArticleRecord a;
    a.url = j.at("url").get<std::string>();
    a.title = j.at("title").get<std::string>();
    a.publish_date = Date::parse(j.at("publish_date").get<std::string>());
    a.full_text = j.at("full_text").get<std::string>();
    a.source_api = j.value("source_api", "");
    a.search_query = j.value("search_query", "");
    if (j.contains("relevance_rating")) a.relevance_rating = j["relevance_rating"].get<int>();
    if (j.contains("similarity")) a.similarity = j["similarity"].get<double>();
    if (j.contains("summary")) a.summary = j["summary"].get<std::string>();
    return a;
}

}  // namespace detail

/// Wraps a news provider with the disk cache, keyed by
/// (provider, query, date range).
class CachedNewsProvider : public NewsProvider {
public:
    CachedNewsProvider(std::shared_ptr<NewsProvider> inner, std::shared_ptr<DiskCache> cache)
        : inner_(std::move(inner)), cache_(std::move(cache)) {}

    std::vector<ArticleRecord> search(const std::string& query, Date from, Date to,
                                      int limit) override {
        const std::string key =
            "news|" + inner_->provider_id() + "|" + query + "|" + from.str() + ".." + to.str();
        if (auto hit = cache_->get(key)) {
            std::vector<ArticleRecord> out;
            for (const auto& item : hit->at("articles")) {
                if (static_cast<int>(out.size()) >= limit) break;
                out.push_back(detail::article_from_json(item));
            }
            return out;
        }
        auto articles = inner_->search(query, from, to, limit);
        nlohmann::json stored = nlohmann::json::array();
        for (const auto& a : articles) stored.push_back(detail::article_to_json(a));
        cache_->put(key,
                    {{"query", query}, {"from", from.str()}, {"to", to.str()}, {"limit", limit}},
                    {{"articles", std::move(stored)}});
        return articles;
    }

    std::string provider_id() const override { return inner_->provider_id(); }

private:
    std::shared_ptr<NewsProvider> inner_;
    std::shared_ptr<DiskCache> cache_;
};

}  // namespace foresight
