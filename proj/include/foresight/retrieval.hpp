#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "foresight/concurrency.hpp"
#include "foresight/errors.hpp"
#include "foresight/prompts.hpp"
#include "foresight/providers.hpp"
#include "foresight/types.hpp"
#include "foresight/util.hpp"

namespace foresight {

/// Ordered set of search queries with per-query prompt provenance. Always
/// contains the question title; duplicates collapse after whitespace
/// normalization.
struct SearchQuerySet {
    std::vector<std::string> queries;
    std::map<std::string, std::string> provenance;  // query -> prompt_id

    bool add(const std::string& raw, const std::string& prompt_id) {
        std::string q = normalize_whitespace(raw);
        if (q.empty()) return false;
        for (const auto& existing : queries)
            if (existing == q) return false;
        queries.push_back(q);
        provenance[q] = prompt_id;
        return true;
    }
};

struct QueryGenOptions {
    std::string model_id = "gpt-4-1106-preview";
    int max_words = 10;
    int retries = 2;
    int max_output = 1000;
};

namespace detail {

inline std::optional<std::vector<std::string>> parse_search_queries(const std::string& response) {
    const std::string marker = "Search Queries:";
    size_t pos = response.rfind(marker);
    if (pos == std::string::npos) return std::nullopt;
    std::vector<std::string> queries;
    for (const auto& part : split(response.substr(pos + marker.size()), ';')) {
        std::string q = normalize_whitespace(part);
        if (!q.empty()) queries.push_back(q);
    }
    return queries;
}

}  // namespace detail

/// Renders each query prompt at temperature 0, parses the semicolon-separated
/// "Search Queries:" section, and unions the results with the question title.
inline SearchQuerySet generate_queries(const ForecastQuestion& q,
                                       const std::vector<std::string>& prompt_ids,
                                       int queries_per_prompt, CompletionProvider& completion,
                                       const PromptLibrary& prompts,
                                       const QueryGenOptions& opts = {}) {
    if (queries_per_prompt < 1)
        throw ValidationError("queries_per_prompt must be >= 1");
    SearchQuerySet out;
    out.add(q.title, "question_title");
    for (const auto& prompt_id : prompt_ids) {
        const std::string prompt = render_template(
            prompts.raw(prompt_id), {{"question", q.title},
                                     {"background", q.background},
                                     {"max_words", std::to_string(opts.max_words)},
                                     {"num_keywords", std::to_string(queries_per_prompt)}});
        std::optional<std::vector<std::string>> parsed;
        for (int attempt = 0; attempt <= opts.retries && !parsed; ++attempt) {
            parsed = detail::parse_search_queries(
                completion.complete(opts.model_id, prompt, 0.0, opts.max_output));
        }
        if (!parsed)
            throw ParseError("no \"Search Queries:\" section from prompt " + prompt_id);
        for (const auto& query : *parsed) out.add(query, prompt_id);
    }
    return out;
}

/// Lowercases scheme and host, strips utm_* tracking parameters, and drops
/// fragments and trailing slashes, so the same article retrieved from two
/// APIs deduplicates.
inline std::string normalize_url(const std::string& url) {
    std::string u = url;
    if (size_t frag = u.find('#'); frag != std::string::npos) u.erase(frag);

    std::string scheme, rest = u;
    if (size_t sep = u.find("://"); sep != std::string::npos) {
        scheme = to_lower(u.substr(0, sep));
        rest = u.substr(sep + 3);
    }
    size_t path_start = rest.find('/');
    std::string host = to_lower(rest.substr(0, path_start));
    std::string path_query = path_start == std::string::npos ? "" : rest.substr(path_start);

    std::string path = path_query, query;
    if (size_t qpos = path_query.find('?'); qpos != std::string::npos) {
        path = path_query.substr(0, qpos);
        query = path_query.substr(qpos + 1);
    }
    while (path.size() > 0 && path.back() == '/') path.pop_back();

    std::string kept_query;
    for (const auto& param : split(query, '&')) {
        if (param.empty() || starts_with(to_lower(param), "utm_")) continue;
        kept_query += kept_query.empty() ? "" : "&";
        kept_query += param;
    }

    std::string out = scheme.empty() ? "" : scheme + "://";
    out += host + path;
    if (!kept_query.empty()) out += "?" + kept_query;
    return out;
}

inline std::string url_host(const std::string& url) {
    std::string rest = url;
    if (size_t sep = url.find("://"); sep != std::string::npos) rest = url.substr(sep + 3);
    size_t end = rest.find_first_of("/?#");
    return to_lower(rest.substr(0, end));
}

inline bool host_on_whitelist(const std::string& host, const std::vector<std::string>& whitelist) {
    for (const auto& entry : whitelist) {
        std::string e = to_lower(entry);
        if (host == e || (host.size() > e.size() &&
                          host.compare(host.size() - e.size() - 1, e.size() + 1, "." + e) == 0))
            return true;
    }
    return false;
}

struct FetchOptions {
    int workers = 4;
    UrlFetcher* url_fetcher = nullptr;
    std::vector<std::string> whitelist;             // hosts eligible for background links
    std::vector<std::string> background_urls;       // q.extracted_urls
};

struct FetchResult {
    std::vector<ArticleRecord> articles;
    std::vector<std::string> violations;  // date-range violations, logged and skipped
    std::vector<std::string> failures;    // per-(provider, query) errors
};

/// Fans out every (provider, query) pair, deduplicates by normalized URL
/// keeping the first occurrence, and drops anything outside [from, to].
/// Whitelisted background links join the pool under the same date guard.
/// Individual provider failures are recorded; only a total wipeout throws.
inline FetchResult fetch_articles(const SearchQuerySet& queries, Date from, Date to,
                                  const std::vector<NewsProvider*>& providers,
                                  int per_query_limit, const FetchOptions& opts = {}) {
    if (!(from < to)) throw InvalidWindow("fetch range must satisfy from < to");
    struct Task {
        NewsProvider* provider;
        const std::string* query;
    };
    std::vector<Task> tasks;
    for (auto* provider : providers)
        for (const auto& query : queries.queries) tasks.push_back({provider, &query});

    auto slot_results = parallel_map(
        tasks,
        [&](const Task& t) { return t.provider->search(*t.query, from, to, per_query_limit); },
        opts.workers);

    FetchResult result;
    size_t failed_calls = 0;
    std::set<std::string> seen;
    auto admit = [&](ArticleRecord a) {
        if (a.publish_date < from || a.publish_date > to) {
            result.violations.push_back(a.url + " published " + a.publish_date.str() +
                                        " outside [" + from.str() + ", " + to.str() + "]");
            return;
        }
        if (!seen.insert(normalize_url(a.url)).second) return;
        result.articles.push_back(std::move(a));
    };

    for (size_t i = 0; i < tasks.size(); ++i) {
        auto& [value, error] = slot_results[i];
        if (error) {
            ++failed_calls;
            try {
                std::rethrow_exception(error);
            } catch (const std::exception& e) {
                result.failures.push_back(tasks[i].provider->provider_id() + "/" +
                                          *tasks[i].query + ": " + e.what());
            }
            continue;
        }
        for (auto& a : *value) admit(std::move(a));
    }
    if (!tasks.empty() && failed_calls == tasks.size())
        throw AllProvidersFailed("every (provider, query) call failed; first: " +
                                 result.failures.front());

    if (opts.url_fetcher) {
        for (const auto& url : opts.background_urls) {
            if (!host_on_whitelist(url_host(url), opts.whitelist)) continue;
            try {
                if (auto article = opts.url_fetcher->fetch(url)) {
                    article->source_api = "background_link";
                    admit(std::move(*article));
                }
            } catch (const std::exception& e) {
                result.failures.push_back("background " + url + ": " + e.what());
            }
        }
    }
    return result;
}

enum class RelevanceMode { title_first250, full_text, embedding };

inline std::string relevance_mode_name(RelevanceMode m) {
    switch (m) {
        case RelevanceMode::title_first250: return "title_first250";
        case RelevanceMode::full_text: return "full_text";
        case RelevanceMode::embedding: return "embedding";
    }
    return "title_first250";
}

inline RelevanceMode parse_relevance_mode(const std::string& name) {
    if (name == "title_first250") return RelevanceMode::title_first250;
    if (name == "full_text") return RelevanceMode::full_text;
    if (name == "embedding") return RelevanceMode::embedding;
    throw ParseError("unknown relevance mode: " + name);
}

struct RelevanceOptions {
    std::string model_id = "gpt-3.5-turbo";
    int max_output = 1000;
};

namespace detail {

inline std::optional<int> parse_rating(const std::string& response) {
    const std::string marker = "Rating:";
    size_t pos = response.rfind(marker);
    if (pos == std::string::npos) return std::nullopt;
    size_t i = pos + marker.size();
    while (i < response.size() && !std::isdigit(static_cast<unsigned char>(response[i]))) {
        // Stop if a new line of prose starts before any digit shows up.
        if (response[i] == '\n' && i + 1 < response.size() &&
            std::isalpha(static_cast<unsigned char>(response[i + 1])))
            return std::nullopt;
        ++i;
    }
    if (i >= response.size()) return std::nullopt;
    int value = 0;
    while (i < response.size() && std::isdigit(static_cast<unsigned char>(response[i]))) {
        value = value * 10 + (response[i] - '0');
        ++i;
    }
    return value;
}

inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) dot += a[i] * b[i];
    for (double x : a) na += x * x;
    for (double x : b) nb += x * x;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace detail

/// Rates one article. LM modes parse the integer after "Rating:", clamped to
/// 1..6; parse failures score 1 and are flagged rather than retried, matching
/// how the rating prompt treats broken scrapes. Embedding mode fills
/// `similarity` and leaves the rating unset.
inline ArticleRecord rate_relevance(const ForecastQuestion& q, ArticleRecord article,
                                    RelevanceMode mode, CompletionProvider& completion,
                                    const PromptLibrary& prompts,
                                    EmbeddingProvider* embedder = nullptr,
                                    const RelevanceOptions& opts = {}) {
    if (mode == RelevanceMode::embedding) {
        if (!embedder) throw ValidationError("embedding relevance mode requires an embedder");
        auto article_vec = embedder->embed(article.title + "\n" + article.full_text);
        auto question_vec =
            embedder->embed(q.title + "\n" + q.background + "\n" + q.resolution_criteria);
        article.similarity = detail::cosine_similarity(article_vec, question_vec);
        return article;
    }

    const std::string article_text =
        mode == RelevanceMode::title_first250
            ? article.title + "\n" + truncate_words(article.full_text, 250)
            : article.title + "\n" + article.full_text;
    const std::string prompt =
        render_template(prompts.raw("relevance_rating"),
                        {{"question", q.title},
                         {"background", q.background},
                         {"resolution_criteria", q.resolution_criteria},
                         {"article", article_text}});
    const std::string response = completion.complete(opts.model_id, prompt, 0.0, opts.max_output);
    auto rating = detail::parse_rating(response);
    if (!rating) {
        article.relevance_rating = 1;
        article.rating_flagged = true;
        return article;
    }
    int clamped = std::clamp(*rating, 1, 6);
    article.relevance_rating = clamped;
    article.rating_flagged = clamped != *rating;
    return article;
}

enum class ArticleOrder { relevance, recency };

inline std::string article_order_name(ArticleOrder o) {
    return o == ArticleOrder::relevance ? "relevance" : "recency";
}

inline ArticleOrder parse_article_order(const std::string& name) {
    if (name == "relevance") return ArticleOrder::relevance;
    if (name == "recency") return ArticleOrder::recency;
    throw ParseError("unknown article order: " + name);
}

namespace detail {

inline double article_score(const ArticleRecord& a) {
    if (a.relevance_rating) return static_cast<double>(*a.relevance_rating);
    if (a.similarity) return *a.similarity;
    return 1.0;
}

}  // namespace detail

/// Drops articles scoring below the threshold, orders the survivors, and
/// returns the first k. Empty output is legal (the no-retrieval case).
inline std::vector<ArticleRecord> filter_rank_select(std::vector<ArticleRecord> articles,
                                                     double threshold, ArticleOrder order,
                                                     int k) {
    std::erase_if(articles,
                  [&](const ArticleRecord& a) { return detail::article_score(a) < threshold; });
    auto by_relevance = [](const ArticleRecord& a, const ArticleRecord& b) {
        double sa = detail::article_score(a), sb = detail::article_score(b);
        if (sa != sb) return sa > sb;
        if (a.publish_date != b.publish_date) return a.publish_date > b.publish_date;
        return a.url < b.url;
    };
    auto by_recency = [&](const ArticleRecord& a, const ArticleRecord& b) {
        if (a.publish_date != b.publish_date) return a.publish_date > b.publish_date;
        return by_relevance(a, b);
    };
    if (order == ArticleOrder::relevance)
        std::sort(articles.begin(), articles.end(), by_relevance);
    else
        std::sort(articles.begin(), articles.end(), by_recency);
    if (k < 0) k = 0;
    if (static_cast<size_t>(k) < articles.size()) articles.resize(static_cast<size_t>(k));
    return articles;
}

struct SummarizeOptions {
    std::string model_id = "gpt-3.5-turbo";
    double temperature = 0.2;
    int max_output = 1000;
};

/// Summarizes the article with respect to the question at temperature 0.2.
/// Articles longer than the provider's context budget are truncated from the
/// end until the rendered prompt fits.
inline ArticleRecord summarize(const ForecastQuestion& q, ArticleRecord article,
                               CompletionProvider& completion, const PromptLibrary& prompts,
                               const SummarizeOptions& opts = {}) {
    if (trim(article.full_text).empty()) {
        article.summary = "";
        article.summary_flagged = true;
        return article;
    }
    auto render = [&](const std::string& text) {
        return render_template(prompts.raw("summarization"), {{"article", text},
                                                              {"question", q.title},
                                                              {"background", q.background}});
    };
    const size_t budget = static_cast<size_t>(completion.context_budget(opts.model_id));
    std::string prompt = render(article.full_text);
    if (count_words(prompt) > budget) {
        size_t scaffold_words = count_words(render(""));
        size_t allowed = budget > scaffold_words ? budget - scaffold_words : 0;
        prompt = render(truncate_words(article.full_text, allowed));
    }
    article.summary = trim(completion.complete(opts.model_id, prompt, opts.temperature,
                                               opts.max_output));
    return article;
}

/// Recall and precision of approximate relevance labels against gold labels
/// (gold relevant := full-text rating >= 4). Zero denominators score 0.
inline std::pair<double, double> approximation_quality(
    const std::vector<std::pair<std::string, bool>>& gold,
    const std::vector<std::pair<std::string, bool>>& predicted) {
    if (gold.empty() || predicted.empty()) throw EmptyInput("approximation_quality needs labels");
    std::map<std::string, bool> gold_by_id(gold.begin(), gold.end());
    std::map<std::string, bool> pred_by_id(predicted.begin(), predicted.end());
    if (gold_by_id.size() != pred_by_id.size())
        throw ValidationError("gold and predicted id sets differ");
    size_t tp = 0, gold_pos = 0, pred_pos = 0;
    for (const auto& [id, g] : gold_by_id) {
        auto it = pred_by_id.find(id);
        if (it == pred_by_id.end()) throw ValidationError("gold and predicted id sets differ");
        if (g) ++gold_pos;
        if (it->second) ++pred_pos;
        if (g && it->second) ++tp;
    }
    double recall = gold_pos ? static_cast<double>(tp) / static_cast<double>(gold_pos) : 0.0;
    double precision = pred_pos ? static_cast<double>(tp) / static_cast<double>(pred_pos) : 0.0;
    return {recall, precision};
}

}  // namespace foresight
