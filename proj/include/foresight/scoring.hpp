#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "foresight/errors.hpp"
#include "foresight/types.hpp"

namespace foresight {

/// Squared error between a probabilistic forecast and a binary outcome.
/// Strictly proper: expected score is minimized by reporting the true rate.
inline double brier(Probability f, Outcome o) {
    double d = f.value() - static_cast<double>(o.value());
    return d * d;
}

/// Directional hit at the 0.5 threshold; an exact 0.5 counts as a miss.
inline bool accuracy_hit(Probability f, Outcome o) {
    if (f.value() > 0.5) return o.value() == 1;
    if (f.value() < 0.5) return o.value() == 0;
    return false;
}

/// Per-question scores keyed by retrieval index.
struct QuestionScore {
    std::string question_id;
    std::map<int, double> per_date_briers;
    double mean_brier = 0.0;
    std::map<int, bool> per_date_hits;
};

inline QuestionScore make_question_score(std::string question_id,
                                         std::map<int, double> per_date_briers,
                                         std::map<int, bool> per_date_hits) {
    if (per_date_briers.empty()) throw EmptyInput("question score needs at least one date");
    double sum = 0.0;
    for (const auto& [k, b] : per_date_briers) {
        if (!(b >= 0.0 && b <= 1.0))
            throw ValidationError("per-date Brier out of [0,1]: " + std::to_string(b));
        sum += b;
    }
    QuestionScore s;
    s.question_id = std::move(question_id);
    s.mean_brier = sum / static_cast<double>(per_date_briers.size());
    s.per_date_briers = std::move(per_date_briers);
    s.per_date_hits = std::move(per_date_hits);
    return s;
}

struct AggregateScore {
    double mean_brier = 0.0;
    double mean_accuracy = 0.0;
    double standard_error = 0.0;  // of the per-question mean Briers
    size_t question_count = 0;
};

/// Averages Brier scores across retrieval dates per question first, then
/// across questions; accuracy mirrors that order. The standard error assumes
/// i.i.d. questions (an approximation for time-series data) and is defined as
/// 0 for a single question.
inline AggregateScore aggregate_scores(const std::vector<QuestionScore>& scores) {
    if (scores.empty()) throw EmptyInput("aggregate_scores needs at least one question");
    double brier_sum = 0.0;
    double acc_sum = 0.0;
    for (const auto& s : scores) {
        brier_sum += s.mean_brier;
        size_t hits = 0;
        for (const auto& [k, hit] : s.per_date_hits) hits += hit ? 1 : 0;
        acc_sum += s.per_date_hits.empty()
                       ? 0.0
                       : static_cast<double>(hits) / static_cast<double>(s.per_date_hits.size());
    }
    const double n = static_cast<double>(scores.size());
    AggregateScore agg;
    agg.question_count = scores.size();
    agg.mean_brier = brier_sum / n;
    agg.mean_accuracy = acc_sum / n;
    if (scores.size() > 1) {
        double ss = 0.0;
        for (const auto& s : scores) {
            double d = s.mean_brier - agg.mean_brier;
            ss += d * d;
        }
        agg.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return agg;
}

struct CalibrationBin {
    double lower = 0.0;
    double upper = 0.0;
    size_t count = 0;
    double mean_forecast = 0.0;
    double empirical_rate = 0.0;
};

struct CalibrationCurve {
    std::vector<CalibrationBin> bins;  // nonempty bins only, in bin order
    double rms_error = 0.0;
    size_t sample_count = 0;
};

/// Count-weighted RMS calibration error over equal-width bins (right-closed
/// last bin). Empty bins are excluded.
inline CalibrationCurve calibration(const std::vector<std::pair<Probability, Outcome>>& samples,
                                    int bin_count = 10) {
    if (samples.empty()) throw EmptyInput("calibration needs at least one sample");
    if (bin_count < 1) throw ValidationError("bin_count must be >= 1");

    std::vector<size_t> counts(static_cast<size_t>(bin_count), 0);
    std::vector<double> forecast_sum(static_cast<size_t>(bin_count), 0.0);
    std::vector<double> outcome_sum(static_cast<size_t>(bin_count), 0.0);
    for (const auto& [f, o] : samples) {
        int b = static_cast<int>(f.value() * bin_count);
        if (b >= bin_count) b = bin_count - 1;  // f == 1.0 lands in the last bin
        counts[static_cast<size_t>(b)]++;
        forecast_sum[static_cast<size_t>(b)] += f.value();
        outcome_sum[static_cast<size_t>(b)] += o.value();
    }

    CalibrationCurve curve;
    curve.sample_count = samples.size();
    double weighted_sq = 0.0;
    for (int b = 0; b < bin_count; ++b) {
        size_t c = counts[static_cast<size_t>(b)];
        if (c == 0) continue;
        CalibrationBin bin;
        bin.lower = static_cast<double>(b) / bin_count;
        bin.upper = static_cast<double>(b + 1) / bin_count;
        bin.count = c;
        bin.mean_forecast = forecast_sum[static_cast<size_t>(b)] / static_cast<double>(c);
        bin.empirical_rate = outcome_sum[static_cast<size_t>(b)] / static_cast<double>(c);
        double err = bin.mean_forecast - bin.empirical_rate;
        weighted_sq += static_cast<double>(c) * err * err;
        curve.bins.push_back(bin);
    }
    curve.rms_error = std::sqrt(weighted_sq / static_cast<double>(samples.size()));
    return curve;
}

}  // namespace foresight
