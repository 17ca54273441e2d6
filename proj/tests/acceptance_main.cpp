// Acceptance suite: oracle-equivalence and invariant checks for the whole
// pipeline, one pass/fail line per criterion. Returns the number of failed
// criteria as the exit code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "foresight/crowd.hpp"
#include "foresight/ensemble.hpp"
#include "foresight/evaluate.hpp"
#include "foresight/finetune.hpp"
#include "foresight/ingest.hpp"
#include "foresight/providers_mock.hpp"
#include "foresight/reasoning.hpp"
#include "foresight/schedule.hpp"
#include "foresight/scoring.hpp"
#include "foresight/sweep.hpp"

using namespace foresight;

namespace {

struct Harness {
    int failures = 0;

    void run(const std::string& name, const std::function<void()>& body) {
        auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        if (error.empty()) {
            std::printf("[PASS] %-22s (%lld ms)\n", name.c_str(),
                        static_cast<long long>(ms));
        } else {
            ++failures;
            std::printf("[FAIL] %-22s (%lld ms): %s\n", name.c_str(),
                        static_cast<long long>(ms), error.c_str());
        }
        std::fflush(stdout);
    }
};

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

void require_near(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
        std::ostringstream os;
        os << what << ": got " << got << ", want " << want << " (tol " << tol << ")";
        throw std::runtime_error(os.str());
    }
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ForecastQuestion synthetic_question(std::mt19937_64& rng, int index) {
    int window = 8 + static_cast<int>(rng() % 80);
    int resolve_offset = 2 + static_cast<int>(rng() % window);
    if (resolve_offset > window) resolve_offset = window;
    ForecastQuestion q;
    q.id = "q" + std::to_string(index);
    q.title = "Will synthetic event " + std::to_string(index) + " occur?";
    q.background = "Synthetic background " + std::to_string(index) + ".";
    q.resolution_criteria = "Resolves yes if the synthetic event occurs.";
    q.date_begin = Date(2023, 1, 1);
    q.date_close = q.date_begin + window;
    q.date_resolve = q.date_begin + resolve_offset;
    q.resolution = Outcome(static_cast<int>(rng() % 2));
    q.platform = static_cast<Platform>(rng() % 5);
    q.category = static_cast<Category>(rng() % 11);
    q.source_url = "https://example.org/" + q.id;
    double value = 0.05 + 0.9 * uniform01(rng);
    CommunityPoint p;
    p.timestamp.date = q.date_begin;
    p.value = Probability(value);
    q.community_series.points.push_back(p);
    for (int d = 3; d <= window; d += 4) {
        CommunityPoint more;
        more.timestamp.date = q.date_begin + d;
        more.value = Probability(0.05 + 0.9 * uniform01(rng));
        q.community_series.points.push_back(more);
    }
    return q;
}

ForecastLog& end_to_end_log() {
    static ForecastLog log;
    return log;
}

std::vector<ForecastQuestion>& end_to_end_questions() {
    static std::vector<ForecastQuestion> questions;
    return questions;
}

// --- criteria -------------------------------------------------------------

void scoring_oracle() {
    std::mt19937_64 rng(1001);
    for (int i = 0; i < 10000; ++i) {
        double f = uniform01(rng);
        int o = static_cast<int>(rng() % 2);
        double want_brier = (f - o) * (f - o);
        require_near(brier(Probability(f), Outcome(o)), want_brier, 1e-12, "brier");
        bool got_hit = accuracy_hit(Probability(f), Outcome(o));
        bool want_hit = (f > 0.5 && o == 1) || (f < 0.5 && o == 0);
        require(got_hit == want_hit, "accuracy_hit mismatch");
    }
    require(brier(Probability(0.5), Outcome(0)) == 0.25, "brier(0.5, 0) must be exactly 0.25");
    require(brier(Probability(0.5), Outcome(1)) == 0.25, "brier(0.5, 1) must be exactly 0.25");

    // Aggregation order against an independent recomputation.
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<QuestionScore> scores;
        size_t n = 1 + rng() % 30;
        for (size_t i = 0; i < n; ++i) {
            std::map<int, double> briers;
            std::map<int, bool> hits;
            size_t dates = 1 + rng() % 5;
            for (size_t k = 1; k <= dates; ++k) {
                briers[int(k)] = uniform01(rng);
                hits[int(k)] = rng() % 2 == 0;
            }
            scores.push_back(make_question_score("q" + std::to_string(i), briers, hits));
        }
        auto agg = aggregate_scores(scores);
        double mean = 0.0, acc = 0.0;
        for (const auto& s : scores) {
            double qs = 0.0;
            for (auto& [k, b] : s.per_date_briers) qs += b;
            mean += qs / double(s.per_date_briers.size());
            double hs = 0.0;
            for (auto& [k, h] : s.per_date_hits) hs += h;
            acc += hs / double(s.per_date_hits.size());
        }
        mean /= double(n);
        acc /= double(n);
        double se = 0.0;
        if (n > 1) {
            double ss = 0.0;
            for (const auto& s : scores) {
                double qs = 0.0;
                for (auto& [k, b] : s.per_date_briers) qs += b;
                double d = qs / double(s.per_date_briers.size()) - mean;
                ss += d * d;
            }
            se = std::sqrt(ss / double(n - 1)) / std::sqrt(double(n));
        }
        require_near(agg.mean_brier, mean, 1e-12, "aggregate mean");
        require_near(agg.mean_accuracy, acc, 1e-12, "aggregate accuracy");
        require_near(agg.standard_error, se, 1e-12, "aggregate SE");
    }
}

void schedule_golden() {
    const Date day0(2023, 1, 1);
    auto offsets_of = [&](const std::vector<RetrievalPoint>& pts) {
        std::vector<long> out;
        for (auto& p : pts) out.push_back(p.date - day0);
        return out;
    };
    require(offsets_of(retrieval_dates(day0, day0 + 33, std::nullopt, 5)) ==
                std::vector<long>({2, 4, 8, 16, 32}),
            "33-day window must yield offsets {2,4,8,16,32}");
    require(offsets_of(retrieval_dates(day0, day0 + 33, day0 + 10, 5)) ==
                std::vector<long>({2, 4, 8}),
            "resolve at day 10 must truncate to {2,4,8}");
    require(offsets_of(retrieval_dates(day0, day0 + 2, std::nullopt, 5)) ==
                std::vector<long>({1}),
            "2-day window must collapse to {1}");

    std::mt19937_64 rng(1002);
    for (int trial = 0; trial < 1000; ++trial) {
        long window = 1 + static_cast<long>(rng() % 1000);
        bool resolved = rng() % 2 == 0;
        std::optional<Date> resolve;
        if (resolved) resolve = day0 + static_cast<int>(rng() % (window + 1));
        auto points = retrieval_dates(day0, day0 + static_cast<int>(window), resolve, 5);
        long bound = window - 1 < 1 ? 1 : window - 1;
        long last = 0;
        for (const auto& p : points) {
            long offset = p.date - day0;
            require(offset >= 1, "offset below 1");
            require(offset <= bound, "offset beyond close-derived bound");
            if (resolve) require(p.date <= *resolve, "leaked past resolve date");
            require(offset > last, "offsets must strictly increase");
            last = offset;
        }
    }
}

void trimmed_mean_golden() {
    std::vector<Probability> members;
    for (double v : {0.1, 0.5, 0.5, 0.5, 0.5, 0.6}) members.emplace_back(v);
    require_near(
        ensemble_numeric(members, EnsembleMethod::trimmed_mean_median_variant).value(), 0.485,
        1e-9, "trimmed mean golden");

    const std::vector<EnsembleMethod> methods = {
        EnsembleMethod::mean, EnsembleMethod::median, EnsembleMethod::geometric_mean,
        EnsembleMethod::trimmed_mean_median_variant,
        EnsembleMethod::trimmed_mean_extremes_variant};
    std::mt19937_64 rng(1003);
    for (int trial = 0; trial < 1000; ++trial) {
        size_t m = 1 + rng() % 8;
        std::vector<Probability> set;
        // Members drawn outside the geometric mean's clamp zone, where the
        // closure and idempotence invariants hold for every method.
        for (size_t i = 0; i < m; ++i) set.emplace_back(1e-3 + uniform01(rng) * (1.0 - 2e-3));
        double lo = 1.0, hi = 0.0;
        for (auto& p : set) {
            lo = std::min(lo, p.value());
            hi = std::max(hi, p.value());
        }
        std::vector<Probability> constant(m, set[0]);
        for (auto method : methods) {
            double v = ensemble_numeric(set, method).value();
            require(v >= lo - 1e-12 && v <= hi + 1e-12, "ensemble outside [min, max]");
            auto shuffled = set;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            require_near(ensemble_numeric(shuffled, method).value(), v, 1e-12,
                         "permutation invariance");
            require_near(ensemble_numeric(constant, method).value(), constant[0].value(), 1e-12,
                         "idempotence on constants");
        }
    }
}

void crowd_aggregators() {
    auto event = [](const std::string& id, int t, double v, Date d) {
        ForecasterEvent e;
        e.forecaster_id = id;
        e.t = t;
        e.value = Probability(v);
        e.timestamp.date = d;
        return e;
    };
    const Date d1(2023, 4, 17);

    // Worked examples.
    require(metaculus_weighted_median({event("a", 1, 0.2, d1), event("b", 1, 0.5, d1),
                                       event("c", 1, 0.9, d1)})
                    .value() == 0.5,
            "equal-weight median");
    require(metaculus_weighted_median({event("A", 1, 0.2, d1), event("A", 2, 0.8, d1 + 1),
                                       event("B", 1, 0.4, d1)})
                    .value() == 0.4,
            "weighted median worked example");
    require(metaculus_weighted_median({event("a", 1, 0.7, d1)}).value() == 0.7, "singleton");

    std::vector<ForecasterEvent> gj;
    double values[] = {0.2, 0.4, 0.6, 0.8, 1.0};
    for (int t = 1; t <= 5; ++t) gj.push_back(event("A", t, values[t - 1], d1 + t));
    gj.push_back(event("B", 1, 0.5, d1));
    require_near(gjopen_recent_mean(gj).value(), (0.8 + 1.0 + 0.5) / 3.0, 1e-12,
                 "recent-40% mean worked example");
    require(gjopen_recent_mean({event("a", 1, 0.3, d1)}).value() == 0.3, "gjopen singleton");
    require_near(gjopen_recent_mean({event("a", 1, 0.2, d1), event("b", 1, 0.8, d1)}).value(),
                 0.5, 1e-12, "gjopen pair");

    // Brute-force oracles on random instances.
    std::mt19937_64 rng(1004);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ForecasterEvent> events;
        size_t forecasters = 1 + rng() % 7;
        for (size_t f = 0; f < forecasters; ++f) {
            size_t m = 1 + rng() % 6;
            for (size_t t = 1; t <= m; ++t)
                events.push_back(event("f" + std::to_string(f), int(t), uniform01(rng),
                                       d1 + int(t)));
        }
        std::vector<std::pair<double, double>> weighted;
        for (auto& e : events)
            weighted.emplace_back(e.value.value(), std::exp(std::sqrt(double(e.t))));
        std::sort(weighted.begin(), weighted.end());
        double total = 0.0;
        for (auto& [v, w] : weighted) total += w;
        double cum = 0.0, expected_median = weighted.back().first;
        for (auto& [v, w] : weighted) {
            cum += w;
            if (cum >= total / 2.0) {
                expected_median = v;
                break;
            }
        }
        require_near(metaculus_weighted_median(events).value(), expected_median, 1e-12,
                     "weighted median vs oracle");

        std::map<std::string, std::vector<std::pair<int, double>>> by;
        for (auto& e : events) by[e.forecaster_id].emplace_back(e.t, e.value.value());
        double sum = 0.0;
        size_t kept = 0;
        for (auto& [id, list] : by) {
            std::sort(list.begin(), list.end());
            size_t keep = size_t(std::ceil(0.4 * double(list.size())));
            if (keep < 1) keep = 1;
            for (size_t i = list.size() - keep; i < list.size(); ++i) {
                sum += list[i].second;
                ++kept;
            }
        }
        require_near(gjopen_recent_mean(events).value(), sum / double(kept), 1e-12,
                     "gjopen mean vs oracle");
    }
}

void end_to_end_mock_oracle() {
    std::mt19937_64 rng(1005);
    std::vector<ForecastQuestion> questions;
    for (int i = 0; i < 50; ++i) questions.push_back(synthetic_question(rng, i));

    CrowdEchoCompletionProvider completion(questions);
    FixtureNewsProvider news("fixture_news");
    PromptLibrary prompts = PromptLibrary::builtin();
    ProviderSet providers;
    providers.completion = &completion;
    providers.news.push_back(&news);
    providers.prompts = &prompts;

    PipelineConfig config;
    config.tuned_model_id.reset();
    config.workers = 2;
    config.queries_per_prompt = 2;
    config.per_query_limit = 3;

    auto result = run_system(questions, config, providers);
    require(result.report.failed_question_count == 0, "mock run must not fail questions");
    require(result.report.scored_question_count == questions.size(),
            "all questions must be scored");
    require_near(result.report.overall_ours.mean_brier, result.report.overall_crowd.mean_brier,
                 1e-12, "system Brier vs crowd Brier");

    auto rows = selective_report(result.log,
                                 {SelectiveCriterion::early_retrieval(config.schedule_n)},
                                 config.schedule_n);
    require(rows.size() == 1, "one selective row expected");
    require(rows[0].pct_forecasts == 1.0, "retain-all criterion must retain 100% of forecasts");
    require(rows[0].pct_questions == 1.0, "retain-all criterion must retain 100% of questions");

    // Stash the log for the leakage audit.
    end_to_end_log() = result.log;
    end_to_end_questions() = questions;
}

void finetune_selection() {
    std::mt19937_64 rng(1006);
    std::vector<FinetuneCandidate> candidates;
    std::map<std::pair<std::string, int>, Probability> crowd;
    std::map<std::string, Outcome> outcomes;
    struct Raw {
        std::string qid;
        double p, c;
        int o;
    };
    std::vector<Raw> raw;
    PromptLibrary prompts = PromptLibrary::builtin();
    ForecastQuestion proto;
    proto.title = "Will it happen?";
    proto.background = "bg";
    proto.resolution_criteria = "rc";
    proto.date_begin = Date(2023, 1, 1);
    proto.date_close = Date(2023, 2, 1);

    for (int i = 0; i < 1000; ++i) {
        std::string qid = "q" + std::to_string(i);
        double p = uniform01(rng), c = uniform01(rng);
        int o = int(rng() % 2);
        FinetuneCandidate cand;
        cand.sample.question_id = qid;
        cand.sample.retrieval_index = 1;
        cand.sample.retrieval_date = Date(2023, 1, 2);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", p);
        cand.sample.reasoning = "Reasoning text. Final: *" + std::string(buf) + "*";
        cand.sample.probability = Probability(p);
        cand.basic_input =
            assemble_prompt(proto, {"summary"}, prompts.reasoning("basic_info"), Date(2023, 1, 2));
        cand.question_date_begin = Date(2023, 1, 1) + int(rng() % 200);
        candidates.push_back(std::move(cand));
        crowd[{qid, 1}] = Probability(c);
        outcomes[qid] = Outcome(o);
        raw.push_back({qid, p, c, o});
    }
    auto pairs = select_pairs(candidates, crowd, outcomes);

    std::set<std::string> expected;
    for (const auto& r : raw) {
        bool better = (r.p - r.o) * (r.p - r.o) < (r.c - r.o) * (r.c - r.o);
        bool close = std::fabs(r.p - r.c) <= 0.15;
        if (better && close) expected.insert(r.qid);
    }
    std::set<std::string> got;
    for (const auto& pair : pairs) got.insert(pair.question_id);
    require(got == expected, "selection differs from brute-force filter");

    for (const auto& pair : pairs)
        require(pair.input.find("Instructions:") == std::string::npos,
                "emitted input contains scratchpad instructions");

    // Worked examples.
    auto worked = [&](double p, double c, int o) {
        FinetuneCandidate cand;
        cand.sample.question_id = "w";
        cand.sample.retrieval_index = 1;
        cand.sample.probability = Probability(p);
        cand.sample.reasoning = "Final: *" + std::to_string(p) + "*";
        cand.basic_input = "input";
        cand.question_date_begin = Date(2023, 1, 1);
        std::map<std::pair<std::string, int>, Probability> cw = {{{"w", 1}, Probability(c)}};
        std::map<std::string, Outcome> os = {{"w", Outcome(o)}};
        return select_pairs({cand}, cw, os);
    };
    auto kept = worked(0.7, 0.6, 1);
    require(kept.size() == 1, "0.7 vs crowd 0.6 must be kept");
    require_near(kept[0].target_probability.value(), 0.65, 1e-12, "averaged target");
    require(worked(0.8, 0.6, 1).empty(), "deviation 0.2 must be discarded");
    require(worked(0.5, 0.5, 1).empty(), "equal Brier must be discarded");
}

void calibration_criterion() {
    std::vector<std::pair<Probability, Outcome>> exact;
    for (int i = 0; i < 65; ++i) exact.emplace_back(Probability(0.65), Outcome(1));
    for (int i = 0; i < 35; ++i) exact.emplace_back(Probability(0.65), Outcome(0));
    require_near(calibration(exact, 10).rms_error, 0.0, 1e-12, "bin-exact set rms");

    std::vector<std::pair<Probability, Outcome>> all_wrong(30,
                                                           {Probability(1.0), Outcome(0)});
    require(calibration(all_wrong, 10).rms_error == 1.0, "all-wrong set must score rms 1");

    std::mt19937_64 rng(1007);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::pair<Probability, Outcome>> samples;
        size_t n = 1 + rng() % 300;
        for (size_t i = 0; i < n; ++i)
            samples.emplace_back(Probability(uniform01(rng)), Outcome(int(rng() % 2)));
        auto curve = calibration(samples, 10);
        size_t total = 0;
        for (auto& b : curve.bins) total += b.count;
        require(total == n, "calibration counts must sum to input size");
        require(curve.rms_error >= 0.0 && curve.rms_error <= 1.0, "rms out of range");
    }
}

void leakage_audit() {
    const auto& log = end_to_end_log();
    const auto& questions = end_to_end_questions();
    require(!log.empty(), "end-to-end log missing (run after the mock oracle)");

    std::map<std::string, const ForecastQuestion*> by_id;
    for (const auto& q : questions) by_id[q.id] = &q;

    size_t article_count = 0;
    for (const auto& r : log) {
        require(!r.failed, "unexpected failed record");
        for (const auto& a : r.articles) {
            ++article_count;
            require(a.publish_date <= r.retrieval_date,
                    "article published after its retrieval date");
        }
        const ForecastQuestion* q = by_id.at(r.question_id);
        auto allowed = retrieval_dates(q->date_begin, q->date_close, q->date_resolve, 5);
        bool found = false;
        for (const auto& p : allowed)
            if (p.index == r.retrieval_index && p.date == r.retrieval_date) found = true;
        require(found, "log contains a schedule point that violates the resolve-date rule");
    }
    require(article_count > 0, "audit needs at least one article");
}

void sweep_recovery() {
    std::vector<ForecastQuestion> dataset;
    std::mt19937_64 rng(1008);
    for (int i = 0; i < 5; ++i) dataset.push_back(synthetic_question(rng, i));

    auto group = [](const std::string& name, const std::string& field,
                    std::vector<int> values) {
        SweepGroup g;
        g.name = name;
        for (int v : values) g.axis.push_back({field + std::to_string(v), {{field, v}}});
        return g;
    };
    std::vector<SweepGroup> groups = {
        group("g1", "top_k_articles", {5, 10, 15}),
        group("g2", "queries_per_prompt", {2, 4, 6}),
        group("g3", "per_query_limit", {1, 5, 9}),
    };
    SweepEvaluator eval = [](const PipelineConfig& c, const ForecastQuestion&) {
        auto sq = [](double x) { return x * x; };
        SweepSample s;
        s.brier = 0.001 * sq(c.top_k_articles - 10) + 0.002 * sq(c.queries_per_prompt - 6) +
                  0.003 * sq(c.per_query_limit - 5);
        return s;
    };
    auto a = run_sweep(groups, dataset, PipelineConfig{}, eval, 77);
    require(a.final_config.top_k_articles == 10 && a.final_config.queries_per_prompt == 6 &&
                a.final_config.per_query_limit == 5,
            "sweep must recover the coordinate-wise optimum");
    auto b = run_sweep(groups, dataset, PipelineConfig{}, eval, 77);
    require(config_hash(a.final_config) == config_hash(b.final_config),
            "sweep must be deterministic under a fixed seed");
    require(sweep_result_to_json(a).dump() == sweep_result_to_json(b).dump(),
            "sweep tables must be identical across runs");
    require(a.pipeline_runs == (3u + 3u + 3u) * dataset.size(), "pipeline run count");
}

void ingest_round_trip() {
    const char* record =
        R"({"question": "Will Starship achieve liftoff before Monday, May 1st, 2023?", "start_date": "2023-04-17", "end_date": "2023-04-30", "resolve_date": "2023-04-20", "category": "Science & Technology", "platform": "Metaculus", "resolution": 1.0, "url": "https://www.metaculus.com/api2/questions/15973/", "background": "On April 14th, SpaceX received a launch license for its Starship spacecraft.", "resolution_criteria": "Resolves Yes if Starship leaves the launchpad intact and under its own power before 11:59pm ET on Sunday, April 30th.", "community_predictions": [["2023-04-17", 0.725], ["2023-04-18", 0.74], ["2023-04-20", 0.734]], "extracted_urls": ["https://twitter.com/SpaceX/status/1648092752893313024"]})";
    auto q = question_from_json(nlohmann::json::parse(record));
    require(validate_question(q).empty(), "sample record must validate");
    require(q.resolution && q.resolution->value() == 1, "resolution must be outcome 1");
    auto j = question_to_json(q);
    auto q2 = question_from_json(j);
    require(question_to_json(q2).dump() == j.dump(), "serialize/reload must be identity");

    SplitSpec spec;
    auto in_test = question_from_json(nlohmann::json::parse(
        R"({"question": "t", "start_date": "2023-07-01", "end_date": "2023-08-01"})"));
    auto in_pool = question_from_json(nlohmann::json::parse(
        R"({"question": "p", "start_date": "2023-01-01", "end_date": "2023-04-01", "resolve_date": "2023-03-01", "resolution": 1.0})"));
    auto spanning = question_from_json(nlohmann::json::parse(
        R"({"question": "s", "start_date": "2023-05-01", "end_date": "2023-08-01", "resolve_date": "2023-07-01", "resolution": 0.0})"));
    auto splits = split({in_test, in_pool, spanning}, spec);
    require(splits.test.size() == 1 && splits.test[0].title == "t",
            "post-cutoff question must land in test");
    require(splits.train.size() + splits.validation.size() == 1,
            "pre-cutoff resolved question must land in the train/validation pool");
    require(splits.discarded.size() == 1 && splits.discarded[0].title == "s",
            "spanning question must be discarded");
}

}  // namespace

int main() {
    Harness h;
    h.run("scoring_oracle", scoring_oracle);
    h.run("schedule_golden", schedule_golden);
    h.run("trimmed_mean_golden", trimmed_mean_golden);
    h.run("crowd_aggregators", crowd_aggregators);
    h.run("end_to_end_mock", end_to_end_mock_oracle);
    h.run("finetune_selection", finetune_selection);
    h.run("calibration", calibration_criterion);
    h.run("leakage_audit", leakage_audit);
    h.run("sweep_recovery", sweep_recovery);
    h.run("ingest_round_trip", ingest_round_trip);
    if (h.failures == 0) std::printf("all acceptance criteria passed\n");
    else std::printf("%d acceptance criteria FAILED\n", h.failures);
    return h.failures;
}
