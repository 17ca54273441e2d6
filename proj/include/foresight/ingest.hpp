#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "foresight/errors.hpp"
#include "foresight/prompts.hpp"
#include "foresight/providers.hpp"
#include "foresight/types.hpp"
#include "foresight/util.hpp"

namespace foresight {

inline nlohmann::json question_to_json(const ForecastQuestion& q) {
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& p : q.community_series.points)
        preds.push_back({p.timestamp.str(), p.value.value()});
    nlohmann::json j = {
        {"id", q.id},
        {"question", q.title},
        {"background", q.background},
        {"resolution_criteria", q.resolution_criteria},
        {"start_date", q.date_begin.str()},
        {"end_date", q.date_close.str()},
        {"category", category_name(q.category)},
        {"platform", platform_name(q.platform)},
        {"url", q.source_url},
        {"community_predictions", preds},
        {"extracted_urls", q.extracted_urls},
    };
    if (q.date_resolve) j["resolve_date"] = q.date_resolve->str();
    if (q.resolution) j["resolution"] = static_cast<double>(q.resolution->value());
    return j;
}

inline ForecastQuestion question_from_json(const nlohmann::json& j) {
    ForecastQuestion q;
    try {
        q.title = j.at("question").get<std::string>();
        q.background = j.value("background", "");
        q.resolution_criteria = j.value("resolution_criteria", "");
        q.date_begin = Date::parse(j.at("start_date").get<std::string>());
        q.date_close = Date::parse(j.at("end_date").get<std::string>());
        if (j.contains("resolve_date") && !j["resolve_date"].is_null())
            q.date_resolve = Date::parse(j["resolve_date"].get<std::string>());
        if (j.contains("resolution") && !j["resolution"].is_null()) {
            double r = j["resolution"].get<double>();
            if (r != 0.0 && r != 1.0)
                throw ParseError("resolution must be 0 or 1, got " + std::to_string(r));
            q.resolution = Outcome(static_cast<int>(r));
        }
        q.category = parse_category(j.value("category", "Other"));
        q.platform = parse_platform(j.value("platform", "Metaculus"));
        q.source_url = j.value("url", "");
        q.id = j.value("id", q.source_url);
        if (j.contains("extracted_urls"))
            q.extracted_urls = j["extracted_urls"].get<std::vector<std::string>>();
        if (j.contains("community_predictions")) {
            for (const auto& pair : j["community_predictions"]) {
                CommunityPoint point;
                point.timestamp = DateTime::parse(pair.at(0).get<std::string>());
                point.value = Probability(pair.at(1).get<double>());
                q.community_series.points.push_back(std::move(point));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed question record: ") + e.what());
    }
    return q;
}

struct LoadResult {
    std::vector<ForecastQuestion> questions;
    std::vector<std::pair<int, std::string>> rejected;  // (line number, reason)
};

/// Parses one JSON question per line. Records that fail validation are
/// rejected with their line numbers; parse errors are collected, not fatal.
inline LoadResult load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);
    LoadResult result;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        try {
            ForecastQuestion q = question_from_json(nlohmann::json::parse(line));
            auto violations = validate_question(q);
            if (!violations.empty()) {
                std::string reason;
                for (const auto& v : violations) reason += (reason.empty() ? "" : "; ") + v;
                result.rejected.emplace_back(line_number, reason);
                continue;
            }
            result.questions.push_back(std::move(q));
        } catch (const std::exception& e) {
            result.rejected.emplace_back(line_number, e.what());
        }
    }
    return result;
}

inline void save_dataset(const std::vector<ForecastQuestion>& questions,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset: " + path);
    for (const auto& q : questions) out << question_to_json(q).dump() << "\n";
    if (!out) throw IoError("failed writing dataset: " + path);
}

/// Leak-safe split rule: test questions opened on/after the cutoff; train and
/// validation questions resolved strictly before it; anything spanning the
/// cutoff is discarded. Validation is carved from the pre-cutoff pool by a
/// seeded uniform draw.
struct SplitSpec {
    Date cutoff = Date(2023, 6, 1);
    double validation_fraction = 840.0 / 4602.0;
    uint64_t seed = 0;
};

struct SplitResult {
    std::vector<ForecastQuestion> train;
    std::vector<ForecastQuestion> validation;
    std::vector<ForecastQuestion> test;
    std::vector<ForecastQuestion> discarded;
};

inline SplitResult split(const std::vector<ForecastQuestion>& questions, const SplitSpec& spec) {
    SplitResult result;
    std::vector<ForecastQuestion> pool;
    for (const auto& q : questions) {
        if (q.date_begin >= spec.cutoff) result.test.push_back(q);
        else if (q.date_resolve && *q.date_resolve < spec.cutoff) pool.push_back(q);
        else result.discarded.push_back(q);
    }
    // Deterministic membership: seeded Fisher-Yates over the pool, first
    // fraction goes to validation.
    std::mt19937_64 rng(spec.seed);
    for (size_t i = pool.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(bounded_uniform(rng, i));
        std::swap(pool[i - 1], pool[j]);
    }
    size_t val_count = static_cast<size_t>(
        std::llround(spec.validation_fraction * static_cast<double>(pool.size())));
    for (size_t i = 0; i < pool.size(); ++i) {
        if (i < val_count) result.validation.push_back(std::move(pool[i]));
        else result.train.push_back(std::move(pool[i]));
    }
    return result;
}

/// Optional engagement screen: drops questions whose community series has
/// fewer than `min_count` points. Off at 0; there is no principled default.
inline std::vector<ForecastQuestion> filter_min_forecasts(std::vector<ForecastQuestion> questions,
                                                          size_t min_count) {
    if (min_count == 0) return questions;
    std::erase_if(questions, [&](const ForecastQuestion& q) {
        return q.community_series.points.size() < min_count;
    });
    return questions;
}

enum class ScreenVerdict { ok, flag };

struct ScreenResult {
    ScreenVerdict verdict = ScreenVerdict::flag;
    bool parse_flagged = false;  // response did not follow the format
};

/// Runs the ill-defined-question screen; unparseable responses flag the
/// question conservatively.
inline ScreenResult screen_question(const ForecastQuestion& q, CompletionProvider& completion,
                                    const PromptLibrary& prompts,
                                    const std::string& model_id = "gpt-3.5-turbo") {
    const std::string prompt =
        render_template(prompts.raw("screening"), {{"question", q.title}});
    const std::string response = completion.complete(model_id, prompt, 0.0, 1000);

    const std::string marker = "Classification:";
    size_t pos = response.rfind(marker);
    if (pos == std::string::npos) return {ScreenVerdict::flag, true};
    std::string tail = to_lower(trim(response.substr(pos + marker.size())));
    if (starts_with(tail, "\"")) tail = tail.substr(1);
    if (starts_with(tail, "flag")) return {ScreenVerdict::flag, false};
    if (starts_with(tail, "ok")) return {ScreenVerdict::ok, false};
    return {ScreenVerdict::flag, true};
}

struct CategoryResult {
    Category category = Category::Other;
    bool parse_flagged = false;
};

/// Assigns one of the 11 categories by exact label match (after trimming);
/// anything else maps to Other, flagged.
inline CategoryResult assign_category(const ForecastQuestion& q, CompletionProvider& completion,
                                      const PromptLibrary& prompts,
                                      const std::string& model_id = "gpt-3.5-turbo") {
    const std::string prompt = render_template(
        prompts.raw("categorization"), {{"question", q.title}, {"background", q.background}});
    const std::string response = completion.complete(model_id, prompt, 0.0, 100);

    auto exact = [](const std::string& text) -> std::optional<Category> {
        for (const auto& [cat, label] : category_labels())
            if (text == label) return cat;
        return std::nullopt;
    };
    if (auto cat = exact(trim(response))) return {*cat, false};
    // Tolerate a trailing "Answer: <label>" line.
    auto lines = split(response, '\n');
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        std::string line = trim(*it);
        if (line.empty()) continue;
        const std::string answer_marker = "Answer:";
        if (starts_with(line, answer_marker)) line = trim(line.substr(answer_marker.size()));
        if (auto cat = exact(line)) return {*cat, false};
        break;
    }
    return {Category::Other, true};
}

}  // namespace foresight
