#pragma once

#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "foresight/concurrency.hpp"
#include "foresight/errors.hpp"
#include "foresight/providers.hpp"
#include "foresight/util.hpp"

namespace foresight {

inline std::string require_env(const std::string& name) {
    const char* value = std::getenv(name.c_str());
    if (!value || !*value) throw ConfigError("environment variable not set: " + name);
    return value;
}

struct HttpOptions {
    int retries = 2;
    int backoff_ms = 250;
    int min_interval_ms = 0;
    int timeout_s = 60;
};

/// Chat-completions client for OpenAI-compatible endpoints. The API key is
/// read from an environment variable, never from config files.
class HttpCompletionProvider : public CompletionProvider {
public:
    HttpCompletionProvider(std::string base_url, std::string api_key_env,
                           HttpOptions options = {}, std::string id = "openai",
                           std::string path = "/v1/chat/completions",
                           int context_budget_words = 60000)
        : base_url_(std::move(base_url)),
          api_key_(require_env(api_key_env)),
          options_(options),
          id_(std::move(id)),
          path_(std::move(path)),
          budget_(context_budget_words),
          limiter_(options.min_interval_ms) {}

    std::string complete(const std::string& model_id, const std::string& prompt,
                         double temperature, int max_output) override {
        nlohmann::json body = {
            {"model", model_id},
            {"messages", {{{"role", "user"}, {"content", prompt}}}},
            {"temperature", temperature},
            {"max_tokens", max_output},
        };
        return with_retries(
            [&]() -> std::string {
                limiter_.acquire();
                httplib::Client client(base_url_);
                client.set_read_timeout(options_.timeout_s, 0);
                httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
                auto res = client.Post(path_, headers, body.dump(), "application/json");
                if (!res)
                    throw ProviderError(id_ + ": no response (" +
                                        httplib::to_string(res.error()) + ")");
                if (res->status != 200)
                    throw ProviderError(id_ + ": HTTP " + std::to_string(res->status) + " " +
                                        res->body.substr(0, 200));
                try {
                    auto j = nlohmann::json::parse(res->body);
                    return j.at("choices").at(0).at("message").at("content")
                        .get<std::string>();
                } catch (const nlohmann::json::exception& e) {
                    throw ProviderError(id_ + ": malformed completion response: " +
                                        std::string(e.what()));
                }
            },
            options_.retries, options_.backoff_ms);
    }

    int context_budget(const std::string&) const override { return budget_; }
    std::string provider_id() const override { return id_; }

private:
    std::string base_url_;
    std::string api_key_;
    HttpOptions options_;
    std::string id_;
    std::string path_;
    int budget_;
    RateLimiter limiter_;
};

/// Historical news search client in the NewsCatcher style: GET /v2/search
/// with a date range, x-api-key header, and an articles[] payload. Articles
/// lacking a publish date or outside the range never escape.
class HttpNewsProvider : public NewsProvider {
public:
    HttpNewsProvider(std::string base_url, std::string api_key_env, HttpOptions options = {},
                     std::string id = "newscatcher", std::string path = "/v2/search")
        : base_url_(std::move(base_url)),
          api_key_(require_env(api_key_env)),
          options_(options),
          id_(std::move(id)),
          path_(std::move(path)),
          limiter_(options.min_interval_ms) {}

    std::vector<ArticleRecord> search(const std::string& query, Date from, Date to,
                                      int limit) override {
        return with_retries(
            [&]() -> std::vector<ArticleRecord> {
                limiter_.acquire();
                httplib::Client client(base_url_);
                client.set_read_timeout(options_.timeout_s, 0);
                httplib::Params params = {
                    {"q", query},
                    {"from", from.str()},
                    {"to", to.str()},
                    {"page_size", std::to_string(limit)},
                    {"lang", "en"},
                };
                httplib::Headers headers = {{"x-api-key", api_key_}};
                auto res = client.Get(path_, params, headers);
                if (!res)
                    throw ProviderError(id_ + ": no response (" +
                                        httplib::to_string(res.error()) + ")");
                if (res->status != 200)
                    throw ProviderError(id_ + ": HTTP " + std::to_string(res->status));
                return parse_articles(res->body, query, from, to, limit);
            },
            options_.retries, options_.backoff_ms);
    }

    std::string provider_id() const override { return id_; }

private:
    std::vector<ArticleRecord> parse_articles(const std::string& body, const std::string& query,
                                              Date from, Date to, int limit) const {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw ProviderError(id_ + ": malformed search response: " + std::string(e.what()));
        }
        std::vector<ArticleRecord> out;
        for (const auto& item : j.value("articles", nlohmann::json::array())) {
            if (static_cast<int>(out.size()) >= limit) break;
            std::string published = item.value("published_date", "");
            if (published.size() < 10) continue;  // date unavailable, discard
            Date publish_date;
            try {
                publish_date = Date::parse(published.substr(0, 10));
            } catch (const ParseError&) {
                continue;
            }
            if (publish_date < from || publish_date > to) continue;
            ArticleRecord a;
            a.url = item.value("link", item.value("url", ""));
            if (a.url.empty()) continue;
            a.title = item.value("title", "");
            a.publish_date = publish_date;
            a.full_text = item.value("summary", item.value("content", ""));
            a.source_api = id_;
            a.search_query = query;
            out.push_back(std::move(a));
        }
        return out;
    }

    std::string base_url_;
    std::string api_key_;
    HttpOptions options_;
    std::string id_;
    std::string path_;
    RateLimiter limiter_;
};

/// Background-link fetcher: downloads a whitelisted page, keeps it only when
/// a machine-readable publish date is present, and strips markup to plain
/// text.
class HttpUrlFetcher : public UrlFetcher {
public:
    explicit HttpUrlFetcher(HttpOptions options = {}) : options_(options) {}

    std::optional<ArticleRecord> fetch(const std::string& url) override {
        size_t scheme_end = url.find("://");
        if (scheme_end == std::string::npos) return std::nullopt;
        size_t host_end = url.find('/', scheme_end + 3);
        std::string origin = host_end == std::string::npos ? url : url.substr(0, host_end);
        std::string target = host_end == std::string::npos ? "/" : url.substr(host_end);

        httplib::Client client(origin);
        client.set_read_timeout(options_.timeout_s, 0);
        client.set_follow_location(true);
        auto res = client.Get(target);
        if (!res || res->status != 200) return std::nullopt;

        auto published = find_publish_date(res->body);
        if (!published) return std::nullopt;  // undated pages never enter the pool

        ArticleRecord a;
        a.url = url;
        a.publish_date = *published;
        a.title = extract_tag(res->body, "<title>", "</title>").value_or(url);
        a.full_text = strip_tags(res->body);
        a.source_api = "background_link";
        return a;
    }

private:
    static std::optional<std::string> extract_tag(const std::string& html,
                                                  const std::string& open,
                                                  const std::string& close) {
        size_t b = html.find(open);
        if (b == std::string::npos) return std::nullopt;
        b += open.size();
        size_t e = html.find(close, b);
        if (e == std::string::npos) return std::nullopt;
        return trim(html.substr(b, e - b));
    }

    static std::optional<Date> find_publish_date(const std::string& html) {
        for (const char* marker : {"article:published_time\" content=\"",
                                   "article:published_time' content='",
                                   "\"datePublished\":\"", "\"datePublished\": \""}) {
            size_t pos = html.find(marker);
            if (pos == std::string::npos) continue;
            std::string date_text = html.substr(pos + std::string(marker).size(), 10);
            try {
                return Date::parse(date_text);
            } catch (const ParseError&) {
                continue;
            }
        }
        return std::nullopt;
    }

    static std::string strip_tags(const std::string& html) {
        std::string out;
        bool in_tag = false, in_script = false;
        for (size_t i = 0; i < html.size(); ++i) {
            if (!in_tag && html[i] == '<') {
                in_tag = true;
                if (html.compare(i, 7, "<script") == 0 || html.compare(i, 6, "<style") == 0)
                    in_script = true;
                else if (html.compare(i, 9, "</script>") == 0 ||
                         html.compare(i, 8, "</style>") == 0)
                    in_script = false;
                continue;
            }
            if (in_tag) {
                if (html[i] == '>') in_tag = false;
                continue;
            }
            if (!in_script) out.push_back(html[i]);
        }
        return normalize_whitespace(out);
    }

    HttpOptions options_;
};

}  // namespace foresight
