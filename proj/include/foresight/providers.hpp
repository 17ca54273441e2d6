#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foresight/dates.hpp"
#include "foresight/types.hpp"

namespace foresight {

/// One retrieved news article with provenance. Articles without a publish
/// date never leave a NewsProvider.
struct ArticleRecord {
    std::string url;
    std::string title;
    Date publish_date;
    std::string full_text;
    std::string source_api;
    std::string search_query;
    std::optional<int> relevance_rating;  // 1..6
    std::optional<double> similarity;
    std::optional<std::string> summary;
    bool rating_flagged = false;   // parse failure or out-of-scale clamp
    bool summary_flagged = false;  // summarized from degenerate input
};

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual std::string complete(const std::string& model_id, const std::string& prompt,
                                 double temperature, int max_output) = 0;
    /// Prompt budget in whitespace-delimited words for the given model.
    virtual int context_budget(const std::string& model_id) const {
        (void)model_id;
        return 60000;
    }
    virtual std::string provider_id() const = 0;
};

class NewsProvider {
public:
    virtual ~NewsProvider() = default;
    /// Every returned article has publish_date within [from, to].
    virtual std::vector<ArticleRecord> search(const std::string& query, Date from, Date to,
                                              int limit) = 0;
    virtual std::string provider_id() const = 0;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<double> embed(const std::string& text) = 0;
    virtual std::string provider_id() const = 0;
};

/// Fetches a single whitelisted background link as an article, when the page
/// carries a usable publish date.
class UrlFetcher {
public:
    virtual ~UrlFetcher() = default;
    virtual std::optional<ArticleRecord> fetch(const std::string& url) = 0;
};

}  // namespace foresight
