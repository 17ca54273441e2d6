#pragma once

#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "foresight/crowd.hpp"
#include "foresight/errors.hpp"
#include "foresight/extraction.hpp"
#include "foresight/providers.hpp"
#include "foresight/types.hpp"
#include "foresight/util.hpp"

namespace foresight {

/// Test double driven by an ordered script and/or substring-matched rules.
/// Deterministic at any temperature.
class ScriptedCompletionProvider : public CompletionProvider {
public:
    explicit ScriptedCompletionProvider(std::string id = "scripted") : id_(std::move(id)) {}

    void push_response(std::string response) {
        std::lock_guard lock(mu_);
        queue_.push_back(std::move(response));
    }

    /// Responds with `response` whenever the prompt contains `needle`.
    /// Rules are checked in insertion order, after the queue is exhausted.
    void add_rule(std::string needle, std::string response) {
        std::lock_guard lock(mu_);
        rules_.emplace_back(std::move(needle), std::move(response));
    }

    void set_default(std::string response) {
        std::lock_guard lock(mu_);
        default_ = std::move(response);
    }

    void fail_next(int times) {
        std::lock_guard lock(mu_);
        failures_remaining_ = times;
    }

    std::string complete(const std::string& model_id, const std::string& prompt,
                         double temperature, int max_output) override {
        std::lock_guard lock(mu_);
        calls_.push_back({model_id, prompt, temperature, max_output});
        if (failures_remaining_ > 0) {
            --failures_remaining_;
            throw ProviderError("scripted failure");
        }
        if (!queue_.empty()) {
            std::string r = std::move(queue_.front());
            queue_.pop_front();
            return r;
        }
        for (const auto& [needle, response] : rules_)
            if (prompt.find(needle) != std::string::npos) return response;
        if (default_) return *default_;
        throw ProviderError("no scripted response for prompt");
    }

    std::string provider_id() const override { return id_; }
    int context_budget(const std::string&) const override { return budget_; }
    void set_context_budget(int words) { budget_ = words; }

    struct Call {
        std::string model_id;
        std::string prompt;
        double temperature;
        int max_output;
    };
    std::vector<Call> calls() const {
        std::lock_guard lock(mu_);
        return calls_;
    }
    size_t call_count() const {
        std::lock_guard lock(mu_);
        return calls_.size();
    }

private:
    std::string id_;
    mutable std::mutex mu_;
    std::deque<std::string> queue_;
    std::vector<std::pair<std::string, std::string>> rules_;
    std::optional<std::string> default_;
    std::vector<Call> calls_;
    int failures_remaining_ = 0;
    int budget_ = 60000;
};

/// Oracle provider for end-to-end checks: answers every reasoning prompt with
/// the question's crowd prediction at the simulated date, wrapped in
/// asterisks. Recognizes the question by title and the date from the
/// "Today's date:" line embedded in the prompt.
class CrowdEchoCompletionProvider : public CompletionProvider {
public:
    /// jitter > 0 perturbs the echoed value by a deterministic hash of the
    /// prompt, for pipelines that need members that differ from the crowd.
    explicit CrowdEchoCompletionProvider(std::vector<ForecastQuestion> questions,
                                         double jitter = 0.0)
        : questions_(std::move(questions)), jitter_(jitter) {}

    std::string complete(const std::string&, const std::string& prompt, double,
                         int) override {
        if (prompt.find("Use semicolons to separate the queries") != std::string::npos) {
            const ForecastQuestion* q = match_question(prompt);
            return "Thoughts: none\nSearch Queries: " + (q ? q->title : "news") + ";";
        }
        if (prompt.find("rate the relevance") != std::string::npos)
            return "Thought: on topic\nRating: 5";
        if (prompt.find("condense it to no more than 100 words") != std::string::npos)
            return "Condensed article kept for the forecasting question.";
        if (prompt.find("binary forecasting questions by outputting") != std::string::npos)
            return "Insert thinking:\nlooks reasonable\n\nClassification:\nok";
        if (prompt.find("Assign a category for the given question") != std::string::npos) {
            const ForecastQuestion* q = match_question(prompt);
            return q ? category_name(q->category) : "Other";
        }
        if (prompt.find("Several forecasters have shared") != std::string::npos) {
            // Aggregation prompt: echo the members' final prediction.
            auto last = extract_probability(prompt, Probability(0.5));
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", last.probability.value());
            return "Agreeing with the members.\nFinal prediction: *" + std::string(buf) + "*";
        }
        // Reasoning prompt: echo the crowd value at the simulated date.
        const ForecastQuestion* q = match_question(prompt);
        if (!q) throw ProviderError("crowd echo: question not recognized in prompt");
        auto date = match_date(prompt);
        if (!date) throw ProviderError("crowd echo: no Today's date in prompt");
        double value = crowd_at(q->community_series, *date).value();
        if (jitter_ > 0.0) {
            double offset =
                (static_cast<double>(fnv1a64(prompt) % 2001) - 1000.0) / 1000.0 * jitter_;
            value = std::min(1.0, std::max(0.0, value + offset));
        }
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        return "Matching the community view.\nFinal prediction: *" + std::string(buf) + "*";
    }

    std::string provider_id() const override { return "crowd_echo"; }

private:
    const ForecastQuestion* match_question(const std::string& prompt) const {
        for (const auto& q : questions_)
            if (!q.title.empty() && prompt.find(q.title) != std::string::npos) return &q;
        return nullptr;
    }

    static std::optional<Date> match_date(const std::string& prompt) {
        const std::string marker = "Today's date: ";
        size_t pos = prompt.find(marker);
        if (pos == std::string::npos) return std::nullopt;
        return Date::parse(prompt.substr(pos + marker.size(), 10));
    }

    std::vector<ForecastQuestion> questions_;
    double jitter_ = 0.0;
};

/// News source backed by a fixed article list, or synthesizing deterministic
/// dated articles when none are given. Honors the date-range invariant.
class FixtureNewsProvider : public NewsProvider {
public:
    explicit FixtureNewsProvider(std::string id = "fixture",
                                 std::vector<ArticleRecord> articles = {},
                                 int synthesized_per_query = 3)
        : id_(std::move(id)),
          articles_(std::move(articles)),
          synthesized_per_query_(synthesized_per_query) {}

    std::vector<ArticleRecord> search(const std::string& query, Date from, Date to,
                                      int limit) override {
        std::vector<ArticleRecord> out;
        if (!articles_.empty()) {
            for (const auto& a : articles_) {
                if (static_cast<int>(out.size()) >= limit) break;
                if (a.publish_date < from || a.publish_date > to) continue;
                ArticleRecord copy = a;
                copy.source_api = id_;
                copy.search_query = query;
                out.push_back(std::move(copy));
            }
            return out;
        }
        const long span = to - from;
        const int count = std::min(limit, synthesized_per_query_);
        for (int i = 0; i < count; ++i) {
            ArticleRecord a;
            a.publish_date = to - static_cast<int>(i % (span + 1));
            a.url = "https://news.example.org/" + hex64(fnv1a64(id_ + "|" + query)) + "/" +
                    std::to_string(i);
            a.title = "Report " + std::to_string(i + 1) + " on " + query;
            a.full_text = "Coverage of " + query + " published on " + a.publish_date.str() +
                          ". Sources describe developments relevant to the question.";
            a.source_api = id_;
            a.search_query = query;
            out.push_back(std::move(a));
        }
        return out;
    }

    std::string provider_id() const override { return id_; }

private:
    std::string id_;
    std::vector<ArticleRecord> articles_;
    int synthesized_per_query_;
};

/// Hashed bag-of-words embedding; identical texts embed identically.
class MockEmbeddingProvider : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(size_t dim = 64) : dim_(dim) {}

    std::vector<double> embed(const std::string& text) override {
        std::vector<double> v(dim_, 0.0);
        for (const auto& w : whitespace_tokens(to_lower(text)))
            v[fnv1a64(w) % dim_] += 1.0;
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (double& x : v) x /= norm;
        return v;
    }

    std::string provider_id() const override { return "mock_embedding"; }

private:
    size_t dim_;
};

/// News provider that always throws, for failure-path tests.
class FailingNewsProvider : public NewsProvider {
public:
    explicit FailingNewsProvider(std::string id = "failing") : id_(std::move(id)) {}
    std::vector<ArticleRecord> search(const std::string&, Date, Date, int) override {
        throw ProviderError(id_ + " is down");
    }
    std::string provider_id() const override { return id_; }

private:
    std::string id_;
};

}  // namespace foresight
