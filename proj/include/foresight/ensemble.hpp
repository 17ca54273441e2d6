#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "foresight/errors.hpp"
#include "foresight/extraction.hpp"
#include "foresight/prompts.hpp"
#include "foresight/providers.hpp"
#include "foresight/types.hpp"

namespace foresight {

enum class EnsembleMethod {
    mean,
    median,
    geometric_mean,
    trimmed_mean_median_variant,    // halve the single member farthest from the median
    trimmed_mean_extremes_variant,  // halve the two most extreme members at both ends
    lm_aggregator,                  // universal self-consistency, handled by the caller
};

inline std::string ensemble_method_name(EnsembleMethod m) {
    switch (m) {
        case EnsembleMethod::mean: return "mean";
        case EnsembleMethod::median: return "median";
        case EnsembleMethod::geometric_mean: return "geometric_mean";
        case EnsembleMethod::trimmed_mean_median_variant: return "trimmed_mean_median_variant";
        case EnsembleMethod::trimmed_mean_extremes_variant:
            return "trimmed_mean_extremes_variant";
        case EnsembleMethod::lm_aggregator: return "lm_aggregator";
    }
    return "mean";
}

inline EnsembleMethod parse_ensemble_method(const std::string& name) {
    if (name == "mean") return EnsembleMethod::mean;
    if (name == "median") return EnsembleMethod::median;
    if (name == "geometric_mean") return EnsembleMethod::geometric_mean;
    if (name == "trimmed_mean" || name == "trimmed_mean_median_variant")
        return EnsembleMethod::trimmed_mean_median_variant;
    if (name == "trimmed_mean_extremes_variant")
        return EnsembleMethod::trimmed_mean_extremes_variant;
    if (name == "lm_aggregator" || name == "usc") return EnsembleMethod::lm_aggregator;
    throw ParseError("unknown ensemble method: " + name);
}

namespace detail {

inline double plain_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : (v[m / 2 - 1] + v[m / 2]) / 2.0;
}

inline double trimmed_mean_median_variant(const std::vector<double>& v) {
    const size_t m = v.size();
    if (m == 1) return v[0];
    const double med = plain_median(v);

    // Farthest from the median; ties go to the smaller value, then first index.
    size_t demoted = 0;
    for (size_t i = 1; i < m; ++i) {
        double di = std::fabs(v[i] - med);
        double dd = std::fabs(v[demoted] - med);
        if (di > dd || (di == dd && v[i] < v[demoted])) demoted = i;
    }

    const double uniform = 1.0 / static_cast<double>(m);
    const double removed = uniform / 2.0;
    const double boost = removed / static_cast<double>(m - 1);
    std::vector<double> weights(m, uniform + boost);
    weights[demoted] = uniform / 2.0;

    double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    assert(std::fabs(wsum - 1.0) < 1e-12);
    assert(weights[demoted] * 2.0 == uniform);
    (void)wsum;

    double out = 0.0;
    for (size_t i = 0; i < m; ++i) out += weights[i] * v[i];
    return out;
}

inline double trimmed_mean_extremes_variant(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t m = v.size();
    std::vector<double> weights(m, 1.0);
    size_t edge = std::min<size_t>(2, m);
    for (size_t i = 0; i < edge; ++i) {
        weights[i] *= 0.5;              // smallest end
        weights[m - 1 - i] *= 0.5;      // largest end
    }
    double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    double out = 0.0;
    for (size_t i = 0; i < m; ++i) out += weights[i] / wsum * v[i];
    return out;
}

}  // namespace detail

/// Aggregates member forecasts into one probability. All methods except
/// lm_aggregator are closed over [min(members), max(members)] and permutation
/// invariant. The geometric mean clamps members to [1e-3, 1 - 1e-3] first so a
/// single extreme member cannot annihilate the ensemble.
inline Probability ensemble_numeric(const std::vector<Probability>& members,
                                    EnsembleMethod method) {
    if (members.empty()) throw EmptyInput("ensemble needs at least one member");
    std::vector<double> v;
    v.reserve(members.size());
    for (const auto& p : members) v.push_back(p.value());

    switch (method) {
        case EnsembleMethod::mean:
            return Probability(std::accumulate(v.begin(), v.end(), 0.0) /
                               static_cast<double>(v.size()));
        case EnsembleMethod::median:
            return Probability(detail::plain_median(v));
        case EnsembleMethod::geometric_mean: {
            double log_sum = 0.0;
            for (double x : v) log_sum += std::log(std::clamp(x, 1e-3, 1.0 - 1e-3));
            return Probability(std::exp(log_sum / static_cast<double>(v.size())));
        }
        case EnsembleMethod::trimmed_mean_median_variant:
            return Probability(detail::trimmed_mean_median_variant(v));
        case EnsembleMethod::trimmed_mean_extremes_variant:
            return Probability(detail::trimmed_mean_extremes_variant(v));
        case EnsembleMethod::lm_aggregator:
            throw MissingAggregator("lm_aggregator requires a completion provider");
    }
    throw ValidationError("unhandled ensemble method");
}

struct UscOptions {
    std::string model_id = "gpt-4-1106-preview";
    double temperature = 0.0;
    int max_output = 2500;
    Probability fallback = Probability(0.5);
};

/// Full ensembling entry point. lm_aggregator presents the
/// reasoning-prediction pairs to the aggregator model and extracts its
/// probability; every other method is pure arithmetic.
inline Probability ensemble(const std::vector<Probability>& members, EnsembleMethod method,
                            CompletionProvider* aggregator = nullptr,
                            const std::vector<std::string>* reasonings = nullptr,
                            const PromptLibrary* prompts = nullptr,
                            const UscOptions& opts = {}) {
    if (members.empty()) throw EmptyInput("ensemble needs at least one member");
    if (method != EnsembleMethod::lm_aggregator) return ensemble_numeric(members, method);
    if (!aggregator || !reasonings)
        throw MissingAggregator("lm_aggregator needs an aggregator and member reasonings");
    if (reasonings->size() != members.size())
        throw ValidationError("one reasoning per member forecast required");

    std::string pairs;
    for (size_t i = 0; i < members.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", members[i].value());
        pairs += "Forecaster " + std::to_string(i + 1) + " reasoning:\n" + (*reasonings)[i] +
                 "\nForecaster " + std::to_string(i + 1) + " prediction: *" + buf + "*\n\n";
    }
    static const PromptLibrary fallback_prompts = PromptLibrary::builtin();
    const PromptLibrary& lib = prompts ? *prompts : fallback_prompts;
    const std::string prompt =
        render_template(lib.raw("usc_aggregate"), {{"member_forecasts", trim(pairs)}});
    const std::string response =
        aggregator->complete(opts.model_id, prompt, opts.temperature, opts.max_output);
    return extract_probability(response, opts.fallback).probability;
}

}  // namespace foresight
