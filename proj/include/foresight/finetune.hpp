#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "foresight/errors.hpp"
#include "foresight/scoring.hpp"
#include "foresight/types.hpp"
#include "foresight/extraction.hpp"
#include "foresight/util.hpp"

namespace foresight {

/// One of the two article-retrieval settings sampled per question for data
/// augmentation.
struct RetrievalVariant {
    std::string query_prompt_id;
    int queries_per_prompt = 6;
    int per_query_limit = 10;
};

/// One of the 16 candidate-generation settings per question:
/// 2 retrieval variants x 4 scratchpad prompts x 2 models.
struct CandidateConfig {
    RetrievalVariant retrieval_variant;
    std::string scratchpad_prompt_id;
    std::string model_id;
};

inline std::vector<CandidateConfig> make_candidate_configs(
    const std::vector<RetrievalVariant>& retrieval_variants,
    const std::vector<std::string>& scratchpad_prompt_ids,
    const std::vector<std::string>& model_ids) {
    if (retrieval_variants.size() != 2 || scratchpad_prompt_ids.size() != 4 ||
        model_ids.size() != 2)
        throw ValidationError("candidate cross product must be 2 x 4 x 2");
    std::vector<CandidateConfig> configs;
    for (const auto& rv : retrieval_variants)
        for (const auto& pid : scratchpad_prompt_ids)
            for (const auto& mid : model_ids) configs.push_back({rv, pid, mid});
    return configs;
}

/// Uniform sample of `count` distinct retrieval variants.
template <typename Rng>
inline std::vector<RetrievalVariant> sample_retrieval_variants(
    std::vector<RetrievalVariant> pool, size_t count, Rng& rng) {
    if (pool.size() < count) throw ValidationError("retrieval variant pool too small");
    std::vector<RetrievalVariant> out;
    for (size_t i = 0; i < count; ++i) {
        size_t pick = static_cast<size_t>(bounded_uniform(rng, pool.size()));
        out.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<long>(pick));
    }
    return out;
}

/// The optimal prompt plus `extra` others sampled without replacement with
/// probability inversely proportional to their validation Brier score.
template <typename Rng>
inline std::vector<std::string> sample_scratchpad_prompts(
    const std::string& optimal_id, std::vector<std::pair<std::string, double>> pool_with_brier,
    size_t extra, Rng& rng) {
    std::erase_if(pool_with_brier, [&](const auto& p) { return p.first == optimal_id; });
    if (pool_with_brier.size() < extra)
        throw ValidationError("scratchpad prompt pool too small");
    std::vector<std::string> out = {optimal_id};
    for (size_t i = 0; i < extra; ++i) {
        double total = 0.0;
        for (const auto& [id, score] : pool_with_brier) total += 1.0 / (score + 1e-6);
        // 53-bit uniform in [0,1); portable across standard libraries.
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
        size_t pick = 0;
        double cum = 0.0;
        for (size_t j = 0; j < pool_with_brier.size(); ++j) {
            cum += 1.0 / (pool_with_brier[j].second + 1e-6);
            if (u < cum) {
                pick = j;
                break;
            }
            pick = j;
        }
        out.push_back(pool_with_brier[pick].first);
        pool_with_brier.erase(pool_with_brier.begin() + static_cast<long>(pick));
    }
    return out;
}

/// A candidate forecast together with the instruction-free input it would be
/// trained on.
struct FinetuneCandidate {
    ForecastSample sample;
    std::string basic_input;  // basic_info rendering: question info + summaries
    Date question_date_begin;
};

struct FineTunePair {
    std::string input;
    std::string target;
    Probability model_probability;
    Probability crowd_probability;
    Probability target_probability;  // mean of the two, rounded to 2 decimals
    std::string question_id;
    int retrieval_index = 1;
    Date question_date_begin;
};

namespace detail {

inline std::string format_two_decimals(double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

/// Keeps candidates that beat the crowd's Brier score strictly, stay within
/// 0.15 of the crowd, and did not refuse; the target reasoning gets its final
/// asterisk-delimited prediction replaced by the model-crowd average.
/// Candidates whose reasoning lacks an extractable prediction are dropped.
inline std::vector<FineTunePair> select_pairs(
    const std::vector<FinetuneCandidate>& candidates,
    const std::map<std::pair<std::string, int>, Probability>& crowd_probs,
    const std::map<std::string, Outcome>& outcomes) {
    std::vector<FineTunePair> pairs;
    for (const auto& candidate : candidates) {
        const ForecastSample& s = candidate.sample;
        auto outcome_it = outcomes.find(s.question_id);
        if (outcome_it == outcomes.end())
            throw UnresolvedQuestion("no outcome for question " + s.question_id);
        auto crowd_it = crowd_probs.find({s.question_id, s.retrieval_index});
        if (crowd_it == crowd_probs.end())
            throw CrowdUnavailable("no crowd prediction for " + s.question_id + " at index " +
                                   std::to_string(s.retrieval_index));
        if (s.refusal) continue;

        const Outcome o = outcome_it->second;
        const Probability crowd = crowd_it->second;
        if (!(brier(s.probability, o) < brier(crowd, o))) continue;
        if (std::fabs(s.probability.value() - crowd.value()) > 0.15) continue;

        auto span = final_prediction_span(s.reasoning);
        if (!span) continue;

        double target_value =
            std::round((s.probability.value() + crowd.value()) / 2.0 * 100.0) / 100.0;
        std::string target = s.reasoning;
        target.replace(span->first, span->second - span->first + 1,
                       "*" + detail::format_two_decimals(target_value) + "*");

        FineTunePair pair;
        pair.input = candidate.basic_input;
        pair.target = std::move(target);
        pair.model_probability = s.probability;
        pair.crowd_probability = crowd;
        pair.target_probability = Probability(target_value);
        pair.question_id = s.question_id;
        pair.retrieval_index = s.retrieval_index;
        pair.question_date_begin = candidate.question_date_begin;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

/// Writes the most recent pairs (by question begin date, newest first) as
/// JSON-lines, up to `limit`. Returns the number written.
inline size_t emit_dataset(std::vector<FineTunePair> pairs, size_t limit,
                           const std::string& path) {
    std::stable_sort(pairs.begin(), pairs.end(), [](const FineTunePair& a,
                                                    const FineTunePair& b) {
        return a.question_date_begin > b.question_date_begin;
    });
    if (pairs.size() > limit) pairs.resize(limit);

    std::ofstream out(path);
    if (!out) throw IoError("cannot write fine-tune dataset: " + path);
    for (const auto& p : pairs) {
        nlohmann::json j = {{"input", p.input},
                            {"target", p.target},
                            {"question_id", p.question_id},
                            {"retrieval_index", p.retrieval_index},
                            {"model_probability", p.model_probability.value()},
                            {"crowd_probability", p.crowd_probability.value()},
                            {"target_probability", p.target_probability.value()}};
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("failed writing fine-tune dataset: " + path);
    return pairs.size();
}

}  // namespace foresight
