#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "foresight/concurrency.hpp"
#include "foresight/config.hpp"
#include "foresight/crowd.hpp"
#include "foresight/ensemble.hpp"
#include "foresight/errors.hpp"
#include "foresight/reasoning.hpp"
#include "foresight/retrieval.hpp"
#include "foresight/schedule.hpp"
#include "foresight/scoring.hpp"
#include "foresight/sweep.hpp"
#include "foresight/types.hpp"

namespace foresight {

/// External services the pipeline runs against; any of them may be mocks.
struct ProviderSet {
    CompletionProvider* completion = nullptr;
    std::vector<NewsProvider*> news;
    EmbeddingProvider* embedder = nullptr;
    UrlFetcher* url_fetcher = nullptr;
    const PromptLibrary* prompts = nullptr;
};

struct MemberForecast {
    std::string model_id;
    std::string prompt_id;
    double probability = 0.5;
    bool refusal = false;
    bool extraction_fallback = false;
    std::string reasoning;
};

struct ArticleRef {
    std::string url;
    Date publish_date;
    double score = 0.0;
    std::string search_query;
    std::string source_api;
};

/// One forecast-log line: everything recorded at a (question, retrieval point).
struct ForecastRecord {
    std::string question_id;
    int retrieval_index = 0;
    Date retrieval_date;
    std::vector<MemberForecast> members;
    double ensemble_probability = 0.5;
    std::optional<double> crowd_probability;
    int relevant_article_count = 0;   // post-filter, before top-k truncation
    int presented_article_count = 0;  // after top-k truncation
    std::vector<ArticleRef> articles;  // the presented articles
    std::optional<int> outcome;
    bool failed = false;
    std::string error;
};

using ForecastLog = std::vector<ForecastRecord>;

struct RetrievalArtifacts {
    std::vector<std::string> summaries;  // presented to the reasoning model, in order
    std::vector<ArticleRecord> rated_articles;  // every rated article, pre-filter
    std::vector<ArticleRef> presented;
    int relevant_article_count = 0;  // post-filter, before top-k truncation
};

/// The full retrieval chain for one question at one simulated date:
/// query generation, dated fetch, relevance rating, filter/rank/top-k,
/// summarization.
inline RetrievalArtifacts retrieve_and_summarize(const ForecastQuestion& q, Date retrieval_date,
                                                 const PipelineConfig& config,
                                                 const ProviderSet& providers) {
    if (!providers.completion || !providers.prompts)
        throw ConfigError("provider set needs a completion provider and prompt library");
    const PromptLibrary& prompts = *providers.prompts;
    RetrievalArtifacts out;

    QueryGenOptions query_opts;
    query_opts.model_id = config.query_model_id;
    query_opts.max_words = config.query_max_words;
    query_opts.retries = config.provider_retries;
    SearchQuerySet queries =
        generate_queries(q, config.query_prompt_ids, config.queries_per_prompt,
                         *providers.completion, prompts, query_opts);

    FetchOptions fetch_opts;
    fetch_opts.workers = config.workers;
    fetch_opts.url_fetcher = providers.url_fetcher;
    fetch_opts.whitelist = config.whitelist;
    fetch_opts.background_urls = q.extracted_urls;
    FetchResult fetched = fetch_articles(queries, q.date_begin, retrieval_date, providers.news,
                                         config.per_query_limit, fetch_opts);

    RelevanceOptions rel_opts;
    rel_opts.model_id = config.relevance_model_id;
    auto rated_slots = parallel_map(
        fetched.articles,
        [&](const ArticleRecord& a) {
            return rate_relevance(q, a, config.relevance_mode, *providers.completion, prompts,
                                  providers.embedder, rel_opts);
        },
        config.workers);
    for (auto& [value, error] : rated_slots) {
        if (error) std::rethrow_exception(error);
        out.rated_articles.push_back(std::move(*value));
    }

    auto filtered = filter_rank_select(out.rated_articles, config.relevance_threshold,
                                       config.article_order, std::numeric_limits<int>::max());
    out.relevant_article_count = static_cast<int>(filtered.size());
    if (static_cast<size_t>(config.top_k_articles) < filtered.size())
        filtered.resize(static_cast<size_t>(config.top_k_articles));

    SummarizeOptions sum_opts;
    sum_opts.model_id = config.summary_model_id;
    auto summarized_slots = parallel_map(
        filtered,
        [&](const ArticleRecord& a) {
            return summarize(q, a, *providers.completion, prompts, sum_opts);
        },
        config.workers);
    for (auto& [value, error] : summarized_slots) {
        if (error) std::rethrow_exception(error);
        const ArticleRecord& a = *value;
        out.summaries.push_back(a.title + " (published " + a.publish_date.str() + "): " +
                                a.summary.value_or(""));
        out.presented.push_back(
            {a.url, a.publish_date, detail::article_score(a), a.search_query, a.source_api});
    }
    return out;
}

struct PointRunArtifacts {
    ForecastRecord record;
    std::vector<ArticleRecord> rated_articles;  // every rated article, pre-filter
};

/// Runs the full retrieval -> reasoning -> ensembling chain for one question
/// at one retrieval point.
inline PointRunArtifacts run_question_point(const ForecastQuestion& q, RetrievalPoint point,
                                            const PipelineConfig& config,
                                            const ProviderSet& providers) {
    if (!providers.completion || !providers.prompts)
        throw ConfigError("provider set needs a completion provider and prompt library");
    const PromptLibrary& prompts = *providers.prompts;

    PointRunArtifacts out;
    ForecastRecord& record = out.record;
    record.question_id = q.id;
    record.retrieval_index = point.index;
    record.retrieval_date = point.date;

    std::vector<std::string> summaries;
    if (config.retrieval_enabled) {
        if (providers.news.empty())
            throw ConfigError("retrieval is enabled but no news provider is configured");
        RetrievalArtifacts retrieved = retrieve_and_summarize(q, point.date, config, providers);
        summaries = std::move(retrieved.summaries);
        out.rated_articles = std::move(retrieved.rated_articles);
        record.articles = std::move(retrieved.presented);
        record.relevant_article_count = retrieved.relevant_article_count;
        record.presented_article_count = static_cast<int>(record.articles.size());
    }

    ForecastOptions forecast_opts;
    forecast_opts.fallback = Probability(config.fallback_probability);
    forecast_opts.max_output = config.max_output_tokens;
    forecast_opts.retries = config.provider_retries;

    std::vector<Probability> member_probs;
    std::vector<std::string> member_reasonings;
    auto add_member = [&](const ForecastSample& s) {
        record.members.push_back({s.model_id, s.prompt_id, s.probability.value(), s.refusal,
                                  s.extraction_fallback, s.reasoning});
        member_probs.push_back(s.probability);
        member_reasonings.push_back(s.reasoning);
    };

    for (const auto& prompt_id : config.scratchpad_prompt_ids) {
        add_member(forecast_once(q, summaries, prompts.reasoning(prompt_id),
                                 config.basic_model_id, config.base_temperature, point,
                                 *providers.completion, forecast_opts));
    }
    if (config.tuned_model_id) {
        const PromptTemplate& basic = prompts.reasoning("basic_info");
        for (int s = 0; s < config.samples_per_tuned_model; ++s) {
            add_member(forecast_once(q, summaries, basic, *config.tuned_model_id,
                                     config.tuned_temperature, point, *providers.completion,
                                     forecast_opts));
        }
    }

    UscOptions usc_opts;
    usc_opts.model_id = config.basic_model_id;
    usc_opts.fallback = Probability(config.fallback_probability);
    record.ensemble_probability =
        ensemble(member_probs, config.ensemble_method, providers.completion,
                 &member_reasonings, providers.prompts, usc_opts)
            .value();

    try {
        record.crowd_probability = crowd_at(q.community_series, point.date).value();
    } catch (const CrowdUnavailable&) {
        record.crowd_probability.reset();
    }
    if (q.resolution) record.outcome = q.resolution->value();
    return out;
}

/// Evaluator wiring for the hyperparameter sweep: one pipeline run per
/// question at the midpoint retrieval date, yielding the Brier score and the
/// pre-filter relevance ratings.
inline SweepEvaluator make_system_sweep_evaluator(const ProviderSet& providers) {
    return [providers](const PipelineConfig& config, const ForecastQuestion& q) {
        auto artifacts =
            run_question_point(q, {1, sweep_retrieval_date(q)}, config, providers);
        SweepSample sample;
        if (q.resolution)
            sample.brier =
                brier(Probability(artifacts.record.ensemble_probability), *q.resolution);
        for (const auto& a : artifacts.rated_articles)
            sample.ratings.push_back(detail::article_score(a));
        return sample;
    };
}

// ---------------------------------------------------------------------------
// Scoring a forecast log
// ---------------------------------------------------------------------------

namespace detail {

enum class ScoreSource { system, crowd };

inline std::vector<QuestionScore> question_scores(const ForecastLog& log, ScoreSource source) {
    std::map<std::string, std::pair<std::map<int, double>, std::map<int, bool>>> per_question;
    for (const auto& r : log) {
        if (r.failed || !r.outcome) continue;
        double p;
        if (source == ScoreSource::crowd) {
            if (!r.crowd_probability) continue;
            p = *r.crowd_probability;
        } else {
            p = r.ensemble_probability;
        }
        Outcome o(*r.outcome);
        auto& [briers, hits] = per_question[r.question_id];
        briers[r.retrieval_index] = brier(Probability(p), o);
        hits[r.retrieval_index] = accuracy_hit(Probability(p), o);
    }
    std::vector<QuestionScore> scores;
    scores.reserve(per_question.size());
    for (auto& [qid, maps] : per_question)
        scores.push_back(make_question_score(qid, std::move(maps.first),
                                             std::move(maps.second)));
    return scores;
}

}  // namespace detail

enum class ComplementMode { weighted_4to1, unweighted };

/// Combines the system forecast with the crowd aggregate: a 4x-weighted
/// average toward the crowd, or the plain midpoint.
inline Probability complement_crowd(Probability system_p, Probability crowd_p,
                                    ComplementMode mode) {
    if (mode == ComplementMode::weighted_4to1)
        return Probability((4.0 * crowd_p.value() + system_p.value()) / 5.0);
    return Probability((crowd_p.value() + system_p.value()) / 2.0);
}

namespace detail {

inline std::vector<QuestionScore> complement_scores(const ForecastLog& log,
                                                    ComplementMode mode) {
    std::map<std::string, std::pair<std::map<int, double>, std::map<int, bool>>> per_question;
    for (const auto& r : log) {
        if (r.failed || !r.outcome || !r.crowd_probability) continue;
        Probability combined = complement_crowd(Probability(r.ensemble_probability),
                                                Probability(*r.crowd_probability), mode);
        Outcome o(*r.outcome);
        auto& [briers, hits] = per_question[r.question_id];
        briers[r.retrieval_index] = brier(combined, o);
        hits[r.retrieval_index] = accuracy_hit(combined, o);
    }
    std::vector<QuestionScore> scores;
    for (auto& [qid, maps] : per_question)
        scores.push_back(make_question_score(qid, std::move(maps.first),
                                             std::move(maps.second)));
    return scores;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Selective criteria
// ---------------------------------------------------------------------------

/// Strength conditions under which the system chooses to forecast.
struct SelectiveCriterion {
    enum class Kind { crowd_uncertain, early_retrieval, min_articles, all_criteria };
    Kind kind = Kind::all_criteria;
    double lo = 0.3;       // crowd_uncertain bounds, inclusive
    double hi = 0.7;
    int max_index = 3;     // early_retrieval
    int min_articles = 5;  // relevant articles available pre-top-k

    static SelectiveCriterion crowd_uncertain(double lo = 0.3, double hi = 0.7) {
        return {Kind::crowd_uncertain, lo, hi, 3, 5};
    }
    static SelectiveCriterion early_retrieval(int max_index = 3) {
        return {Kind::early_retrieval, 0.3, 0.7, max_index, 5};
    }
    static SelectiveCriterion min_article_count(int min_articles = 5) {
        return {Kind::min_articles, 0.3, 0.7, 3, min_articles};
    }
    static SelectiveCriterion all() { return {Kind::all_criteria, 0.3, 0.7, 3, 5}; }

    void validate(int schedule_n) const {
        if (lo < 0.0 || hi > 1.0 || lo > hi)
            throw ValidationError("crowd_uncertain bounds must satisfy 0 <= lo <= hi <= 1");
        if (max_index < 1 || max_index > schedule_n)
            throw ValidationError("early_retrieval max_index must be in [1, n]");
    }

    std::string name() const {
        switch (kind) {
            case Kind::crowd_uncertain: return "crowd_uncertain";
            case Kind::early_retrieval: return "early_retrieval";
            case Kind::min_articles: return "min_articles";
            case Kind::all_criteria: return "all_criteria";
        }
        return "all_criteria";
    }

    bool matches(const ForecastRecord& r) const {
        switch (kind) {
            case Kind::crowd_uncertain:
                return r.crowd_probability && *r.crowd_probability >= lo &&
                       *r.crowd_probability <= hi;
            case Kind::early_retrieval:
                return r.retrieval_index <= max_index;
            case Kind::min_articles:
                return r.relevant_article_count >= min_articles;
            case Kind::all_criteria:
                return crowd_uncertain(lo, hi).matches(r) &&
                       early_retrieval(max_index).matches(r) &&
                       min_article_count(min_articles).matches(r);
        }
        return false;
    }
};

struct SelectiveRow {
    std::string criterion;
    AggregateScore ours;
    AggregateScore crowd;
    AggregateScore aggregate;  // system-crowd complement over qualifying pairs
    size_t qualifying_forecasts = 0;
    double pct_forecasts = 0.0;  // of scorable forecasts in the log
    double pct_questions = 0.0;  // of scorable questions in the log
    double pct_scheduled = 0.0;  // of n x questions scheduled points
};

/// Recomputes system and crowd scores over qualifying (question, date) pairs
/// only. Retention is reported against both denominators: forecasts actually
/// made, and the full n-per-question schedule.
inline std::vector<SelectiveRow> selective_report(
    const ForecastLog& log, const std::vector<SelectiveCriterion>& criteria, int schedule_n,
    ComplementMode mode = ComplementMode::unweighted) {
    for (const auto& criterion : criteria) criterion.validate(schedule_n);
    ForecastLog scorable;
    std::set<std::string> all_questions;
    for (const auto& r : log) {
        if (r.failed || !r.outcome) continue;
        scorable.push_back(r);
        all_questions.insert(r.question_id);
    }

    std::vector<SelectiveRow> rows;
    for (const auto& criterion : criteria) {
        ForecastLog qualifying;
        std::set<std::string> questions;
        for (const auto& r : scorable) {
            if (!criterion.matches(r)) continue;
            qualifying.push_back(r);
            questions.insert(r.question_id);
        }
        SelectiveRow row;
        row.criterion = criterion.name();
        row.qualifying_forecasts = qualifying.size();
        if (!qualifying.empty()) {
            row.ours = aggregate_scores(detail::question_scores(qualifying,
                                                                detail::ScoreSource::system));
            auto crowd_qs = detail::question_scores(qualifying, detail::ScoreSource::crowd);
            if (!crowd_qs.empty()) row.crowd = aggregate_scores(crowd_qs);
            auto complement_qs = detail::complement_scores(qualifying, mode);
            if (!complement_qs.empty()) row.aggregate = aggregate_scores(complement_qs);
        }
        if (!scorable.empty())
            row.pct_forecasts = static_cast<double>(qualifying.size()) /
                                static_cast<double>(scorable.size());
        if (!all_questions.empty())
            row.pct_questions = static_cast<double>(questions.size()) /
                                static_cast<double>(all_questions.size());
        if (schedule_n > 0 && !all_questions.empty())
            row.pct_scheduled = static_cast<double>(qualifying.size()) /
                                (static_cast<double>(schedule_n) *
                                 static_cast<double>(all_questions.size()));
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Full-system evaluation
// ---------------------------------------------------------------------------

struct ReportTableRow {
    std::string label;
    AggregateScore ours;
    AggregateScore crowd;
    size_t questions = 0;
};

struct EvaluationReport {
    AggregateScore overall_ours;
    AggregateScore overall_crowd;
    AggregateScore overall_aggregate;  // 4x-weighted crowd complement
    std::vector<ReportTableRow> by_platform;
    std::vector<ReportTableRow> by_category;
    std::optional<CalibrationCurve> calibration_system;
    std::optional<CalibrationCurve> calibration_crowd;
    std::vector<SelectiveRow> selective;
    size_t question_count = 0;
    size_t scored_question_count = 0;
    size_t forecast_count = 0;
    size_t failed_question_count = 0;
    bool non_comparable = false;  // more than 5% of questions failed
    std::vector<std::string> failures;
    // Standard errors assume i.i.d. questions; forecasting data are a time
    // series, so they understate the real uncertainty.
    std::string se_footnote =
        "Standard errors assume independent questions; forecasting data are "
        "time-series, so these values likely understate the true error.";
};

inline EvaluationReport build_report(const ForecastLog& log,
                                     const std::vector<ForecastQuestion>& dataset,
                                     int schedule_n,
                                     const std::vector<SelectiveCriterion>& criteria = {
                                         SelectiveCriterion::crowd_uncertain(),
                                         SelectiveCriterion::early_retrieval(),
                                         SelectiveCriterion::min_article_count(),
                                         SelectiveCriterion::all()}) {
    std::map<std::string, const ForecastQuestion*> by_id;
    for (const auto& q : dataset) by_id[q.id] = &q;

    EvaluationReport report;
    report.question_count = dataset.size();

    ForecastLog scorable;
    for (const auto& r : log) {
        if (r.failed) {
            ++report.failed_question_count;
            report.failures.push_back(r.question_id + ": " + r.error);
            continue;
        }
        if (r.outcome) scorable.push_back(r);
    }
    report.forecast_count = scorable.size();
    report.non_comparable =
        report.question_count > 0 &&
        static_cast<double>(report.failed_question_count) >
            0.05 * static_cast<double>(report.question_count);

    auto system_qs = detail::question_scores(scorable, detail::ScoreSource::system);
    report.scored_question_count = system_qs.size();
    if (!system_qs.empty()) report.overall_ours = aggregate_scores(system_qs);
    auto crowd_qs = detail::question_scores(scorable, detail::ScoreSource::crowd);
    if (!crowd_qs.empty()) report.overall_crowd = aggregate_scores(crowd_qs);
    auto agg_qs = detail::complement_scores(scorable, ComplementMode::weighted_4to1);
    if (!agg_qs.empty()) report.overall_aggregate = aggregate_scores(agg_qs);

    auto grouped_rows = [&](auto key_of) {
        std::map<std::string, ForecastLog> groups;
        for (const auto& r : scorable) {
            auto it = by_id.find(r.question_id);
            if (it == by_id.end()) continue;
            groups[key_of(*it->second)].push_back(r);
        }
        std::vector<ReportTableRow> rows;
        for (auto& [label, records] : groups) {
            ReportTableRow row;
            row.label = label;
            auto qs = detail::question_scores(records, detail::ScoreSource::system);
            if (qs.empty()) continue;
            row.ours = aggregate_scores(qs);
            row.questions = qs.size();
            auto cqs = detail::question_scores(records, detail::ScoreSource::crowd);
            if (!cqs.empty()) row.crowd = aggregate_scores(cqs);
            rows.push_back(std::move(row));
        }
        return rows;
    };
    report.by_platform = grouped_rows(
        [](const ForecastQuestion& q) { return platform_name(q.platform); });
    report.by_category = grouped_rows(
        [](const ForecastQuestion& q) { return category_name(q.category); });

    std::vector<std::pair<Probability, Outcome>> sys_points, crowd_points;
    for (const auto& r : scorable) {
        sys_points.emplace_back(Probability(r.ensemble_probability), Outcome(*r.outcome));
        if (r.crowd_probability)
            crowd_points.emplace_back(Probability(*r.crowd_probability), Outcome(*r.outcome));
    }
    if (!sys_points.empty()) report.calibration_system = calibration(sys_points);
    if (!crowd_points.empty()) report.calibration_crowd = calibration(crowd_points);

    report.selective = selective_report(log, criteria, schedule_n);
    return report;
}

struct RunSystemResult {
    ForecastLog log;
    EvaluationReport report;
};

/// Runs the pipeline over every question and retained retrieval point, then
/// scores the log. Provider failures mark the question failed and excluded
/// from scoring; the report counts them.
inline RunSystemResult run_system(const std::vector<ForecastQuestion>& dataset,
                                  const PipelineConfig& config, const ProviderSet& providers) {
    if (dataset.empty()) throw EmptyDataset("run_system needs a dataset");
    config.validate();

    auto per_question = parallel_map(
        dataset,
        [&](const ForecastQuestion& q) {
            ForecastLog records;
            auto points =
                retrieval_dates(q.date_begin, q.date_close, q.date_resolve, config.schedule_n);
            for (const auto& point : points)
                records.push_back(run_question_point(q, point, config, providers).record);
            return records;
        },
        config.workers);

    ForecastLog log;
    for (size_t i = 0; i < dataset.size(); ++i) {
        auto& [records, error] = per_question[i];
        if (error) {
            ForecastRecord failed;
            failed.question_id = dataset[i].id;
            failed.failed = true;
            try {
                std::rethrow_exception(error);
            } catch (const std::exception& e) {
                failed.error = e.what();
            }
            log.push_back(std::move(failed));
            continue;
        }
        for (auto& r : *records) log.push_back(std::move(r));
    }
    std::stable_sort(log.begin(), log.end(), [](const ForecastRecord& a,
                                                const ForecastRecord& b) {
        if (a.question_id != b.question_id) return a.question_id < b.question_id;
        return a.retrieval_index < b.retrieval_index;
    });

    return {log, build_report(log, dataset, config.schedule_n)};
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json record_to_json(const ForecastRecord& r) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : r.members)
        members.push_back({{"model_id", m.model_id},
                           {"prompt_id", m.prompt_id},
                           {"probability", m.probability},
                           {"refusal", m.refusal},
                           {"extraction_fallback", m.extraction_fallback},
                           {"reasoning", m.reasoning}});
    nlohmann::json articles = nlohmann::json::array();
    for (const auto& a : r.articles)
        articles.push_back({{"url", a.url},
                            {"publish_date", a.publish_date.str()},
                            {"score", a.score},
                            {"search_query", a.search_query},
                            {"source_api", a.source_api}});
    nlohmann::json j = {{"question_id", r.question_id},
                        {"retrieval_index", r.retrieval_index},
                        {"retrieval_date", r.retrieval_date.str()},
                        {"members", members},
                        {"ensemble_probability", r.ensemble_probability},
                        {"relevant_article_count", r.relevant_article_count},
                        {"presented_article_count", r.presented_article_count},
                        {"articles", articles},
                        {"failed", r.failed}};
    if (r.crowd_probability) j["crowd_probability"] = *r.crowd_probability;
    if (r.outcome) j["outcome"] = *r.outcome;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

inline ForecastRecord record_from_json(const nlohmann::json& j) {
    ForecastRecord r;
    r.question_id = j.at("question_id").get<std::string>();
    r.retrieval_index = j.value("retrieval_index", 0);
    if (j.contains("retrieval_date"))
        r.retrieval_date = Date::parse(j["retrieval_date"].get<std::string>());
    for (const auto& m : j.value("members", nlohmann::json::array())) {
        r.members.push_back({m.at("model_id").get<std::string>(),
                             m.at("prompt_id").get<std::string>(),
                             m.at("probability").get<double>(), m.value("refusal", false),
                             m.value("extraction_fallback", false), m.value("reasoning", "")});
    }
    r.ensemble_probability = j.value("ensemble_probability", 0.5);
    if (j.contains("crowd_probability")) r.crowd_probability = j["crowd_probability"].get<double>();
    r.relevant_article_count = j.value("relevant_article_count", 0);
    r.presented_article_count = j.value("presented_article_count", 0);
    for (const auto& a : j.value("articles", nlohmann::json::array())) {
        r.articles.push_back({a.at("url").get<std::string>(),
                              Date::parse(a.at("publish_date").get<std::string>()),
                              a.value("score", 0.0), a.value("search_query", ""),
                              a.value("source_api", "")});
    }
    if (j.contains("outcome")) r.outcome = j["outcome"].get<int>();
    r.failed = j.value("failed", false);
    r.error = j.value("error", "");
    return r;
}

namespace detail {

inline nlohmann::json aggregate_to_json(const AggregateScore& a) {
    return {{"mean_brier", a.mean_brier},
            {"mean_accuracy", a.mean_accuracy},
            {"standard_error", a.standard_error},
            {"question_count", a.question_count}};
}

inline nlohmann::json calibration_to_json(const CalibrationCurve& c) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : c.bins)
        bins.push_back({{"lower", b.lower},
                        {"upper", b.upper},
                        {"count", b.count},
                        {"mean_forecast", b.mean_forecast},
                        {"empirical_rate", b.empirical_rate}});
    return {{"bins", bins}, {"rms_error", c.rms_error}, {"sample_count", c.sample_count}};
}

inline nlohmann::json selective_row_to_json(const SelectiveRow& row) {
    return {{"criterion", row.criterion},
            {"ours", aggregate_to_json(row.ours)},
            {"crowd", aggregate_to_json(row.crowd)},
            {"aggregate", aggregate_to_json(row.aggregate)},
            {"qualifying_forecasts", row.qualifying_forecasts},
            {"pct_forecasts", row.pct_forecasts},
            {"pct_questions", row.pct_questions},
            {"pct_scheduled", row.pct_scheduled}};
}

}  // namespace detail

inline nlohmann::json report_to_json(const EvaluationReport& r) {
    auto table = [](const std::vector<ReportTableRow>& rows) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& row : rows)
            out.push_back({{"label", row.label},
                           {"ours", detail::aggregate_to_json(row.ours)},
                           {"crowd", detail::aggregate_to_json(row.crowd)},
                           {"questions", row.questions}});
        return out;
    };
    nlohmann::json selective = nlohmann::json::array();
    for (const auto& row : r.selective) selective.push_back(detail::selective_row_to_json(row));
    nlohmann::json j = {{"overall", {{"ours", detail::aggregate_to_json(r.overall_ours)},
                                     {"crowd", detail::aggregate_to_json(r.overall_crowd)},
                                     {"aggregate",
                                      detail::aggregate_to_json(r.overall_aggregate)}}},
                        {"by_platform", table(r.by_platform)},
                        {"by_category", table(r.by_category)},
                        {"selective", selective},
                        {"question_count", r.question_count},
                        {"scored_question_count", r.scored_question_count},
                        {"forecast_count", r.forecast_count},
                        {"failed_question_count", r.failed_question_count},
                        {"non_comparable", r.non_comparable},
                        {"failures", r.failures},
                        {"se_footnote", r.se_footnote}};
    if (r.calibration_system)
        j["calibration_system"] = detail::calibration_to_json(*r.calibration_system);
    if (r.calibration_crowd)
        j["calibration_crowd"] = detail::calibration_to_json(*r.calibration_crowd);
    return j;
}

}  // namespace foresight
