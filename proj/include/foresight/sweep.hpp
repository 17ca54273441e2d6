#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "foresight/config.hpp"
#include "foresight/errors.hpp"
#include "foresight/types.hpp"
#include "foresight/util.hpp"

namespace foresight {

enum class SweepMetric { mean_brier, mean_relevance, mean_relevance_above_4 };

inline std::string sweep_metric_name(SweepMetric m) {
    switch (m) {
        case SweepMetric::mean_brier: return "mean_brier";
        case SweepMetric::mean_relevance: return "mean_relevance";
        case SweepMetric::mean_relevance_above_4: return "mean_relevance_above_4";
    }
    return "mean_brier";
}

inline SweepMetric parse_sweep_metric(const std::string& name) {
    if (name == "mean_brier") return SweepMetric::mean_brier;
    if (name == "mean_relevance") return SweepMetric::mean_relevance;
    if (name == "mean_relevance_above_4") return SweepMetric::mean_relevance_above_4;
    throw ParseError("unknown sweep metric: " + name);
}

/// One candidate setting for a group: a label plus config-field overrides
/// (1-2 hyperparameters per group).
struct SweepCandidate {
    std::string label;
    nlohmann::json patch;  // config field -> value
};

struct SweepGroup {
    std::string name;
    std::vector<SweepCandidate> axis;
    SweepMetric metric = SweepMetric::mean_brier;
};

/// What one pipeline run over one question yields for metric computation:
/// the question's mean Brier at the sweep retrieval date, and the relevance
/// ratings of every article retrieved along the way.
struct SweepSample {
    std::optional<double> brier;
    std::vector<double> ratings;
};

using SweepEvaluator =
    std::function<SweepSample(const PipelineConfig&, const ForecastQuestion&)>;

struct SweepRow {
    std::string label;
    double metric_value = 0.0;
    size_t question_count = 0;
};

struct SweepTable {
    std::string group;
    SweepMetric metric = SweepMetric::mean_brier;
    std::vector<SweepRow> rows;
    size_t winner = 0;
};

struct SweepResult {
    PipelineConfig final_config;
    std::vector<SweepTable> tables;
    size_t pipeline_runs = 0;
};

/// Retrieval date used during hyperparameter optimization: the midpoint of
/// the question's open-to-resolve window.
inline Date sweep_retrieval_date(const ForecastQuestion& q) {
    if (!q.date_resolve) throw UnresolvedQuestion("sweep needs resolved questions: " + q.id);
    return q.date_begin + static_cast<int>((*q.date_resolve - q.date_begin) / 2);
}

inline PipelineConfig apply_patch(const PipelineConfig& base, const nlohmann::json& patch) {
    nlohmann::json j = config_to_json(base);
    for (const auto& [key, value] : patch.items()) {
        if (!j.contains(key)) throw ConfigError("sweep patch targets unknown field: " + key);
        j[key] = value;
    }
    return config_from_json(j);
}

namespace detail {

inline double sweep_metric_value(SweepMetric metric, const std::vector<SweepSample>& samples) {
    if (metric == SweepMetric::mean_brier) {
        double sum = 0.0;
        size_t n = 0;
        for (const auto& s : samples)
            if (s.brier) {
                sum += *s.brier;
                ++n;
            }
        return n ? sum / static_cast<double>(n) : 0.0;
    }
    double sum = 0.0;
    size_t n = 0;
    for (const auto& s : samples) {
        for (double r : s.ratings) {
            if (metric == SweepMetric::mean_relevance_above_4 && r < 4.0) continue;
            sum += r;
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

inline bool sweep_metric_improves(SweepMetric metric, double candidate, double best) {
    // Brier is minimized; relevance metrics are maximized. Strict comparison
    // keeps ties on the earlier-listed candidate.
    return metric == SweepMetric::mean_brier ? candidate < best : candidate > best;
}

}  // namespace detail

/// Sequential group-wise optimization: groups are swept in order with earlier
/// winners fixed; hyperparameters of groups not yet swept are drawn uniformly
/// at random, independently for each input question, from a generator seeded
/// by (seed, group, question id). The draw does not depend on the candidate
/// under test, so candidates within a group face identical randomized
/// conditions. Deterministic under a fixed seed and a deterministic
/// evaluator.
inline SweepResult run_sweep(const std::vector<SweepGroup>& groups,
                             const std::vector<ForecastQuestion>& dataset,
                             const PipelineConfig& base_config, const SweepEvaluator& evaluate,
                             uint64_t seed) {
    if (dataset.empty()) throw EmptyDataset("sweep needs a validation dataset");

    SweepResult result;
    std::vector<size_t> winners(groups.size(), 0);

    for (size_t g = 0; g < groups.size(); ++g) {
        const SweepGroup& group = groups[g];
        if (group.axis.empty()) throw ConfigError("sweep group has empty axis: " + group.name);

        SweepTable table;
        table.group = group.name;
        table.metric = group.metric;
        std::optional<double> best_value;

        for (size_t c = 0; c < group.axis.size(); ++c) {
            std::vector<SweepSample> samples;
            samples.reserve(dataset.size());
            for (const auto& q : dataset) {
                nlohmann::json patch = nlohmann::json::object();
                for (size_t prev = 0; prev < g; ++prev)
                    patch.update(groups[prev].axis[winners[prev]].patch);
                patch.update(group.axis[c].patch);
                for (size_t later = g + 1; later < groups.size(); ++later) {
                    uint64_t h = fnv1a64(std::to_string(seed) + "|" + std::to_string(g) + "|" +
                                         std::to_string(later) + "|" + q.id);
                    const auto& axis = groups[later].axis;
                    patch.update(axis[h % axis.size()].patch);
                }
                samples.push_back(evaluate(apply_patch(base_config, patch), q));
                ++result.pipeline_runs;
            }
            double value = detail::sweep_metric_value(group.metric, samples);
            table.rows.push_back({group.axis[c].label, value, dataset.size()});
            if (!best_value || detail::sweep_metric_improves(group.metric, value, *best_value)) {
                best_value = value;
                winners[g] = c;
            }
        }
        table.winner = winners[g];
        result.tables.push_back(std::move(table));
    }

    nlohmann::json final_patch = nlohmann::json::object();
    for (size_t g = 0; g < groups.size(); ++g)
        final_patch.update(groups[g].axis[winners[g]].patch);
    result.final_config = apply_patch(base_config, final_patch);
    return result;
}

inline nlohmann::json sweep_result_to_json(const SweepResult& r) {
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : r.tables) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : t.rows)
            rows.push_back({{"label", row.label},
                            {"metric_value", row.metric_value},
                            {"question_count", row.question_count}});
        tables.push_back({{"group", t.group},
                          {"metric", sweep_metric_name(t.metric)},
                          {"rows", rows},
                          {"winner", t.winner}});
    }
    return {{"final_config", config_to_json(r.final_config)},
            {"tables", tables},
            {"pipeline_runs", r.pipeline_runs}};
}

}  // namespace foresight
