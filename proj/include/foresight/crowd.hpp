#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "foresight/errors.hpp"
#include "foresight/types.hpp"

namespace foresight {

/// Crowd prediction as of the end of `date`: the latest series point whose
/// timestamp falls on or before that day.
inline Probability crowd_at(const CommunityPredictionSeries& series, Date date) {
    const CommunityPoint* best = nullptr;
    for (const auto& p : series.points) {
        if (p.timestamp.date <= date) best = &p;
        else break;  // timestamps are non-decreasing
    }
    if (!best) throw CrowdUnavailable("no community prediction on or before " + date.str());
    return best->value;
}

/// One forecaster submission; t is the per-forecaster submission index
/// starting at 1 in timestamp order.
struct ForecasterEvent {
    std::string forecaster_id;
    int t = 1;
    Probability value;
    DateTime timestamp;
};

/// Checks that each forecaster's t values run 1, 2, ... in timestamp order.
inline std::vector<std::string> validate_events(const std::vector<ForecasterEvent>& events) {
    std::vector<std::string> violations;
    std::map<std::string, std::vector<const ForecasterEvent*>> by_forecaster;
    for (const auto& e : events) by_forecaster[e.forecaster_id].push_back(&e);
    for (auto& [id, evs] : by_forecaster) {
        std::stable_sort(evs.begin(), evs.end(), [](const ForecasterEvent* a,
                                                    const ForecasterEvent* b) {
            return a->timestamp < b->timestamp;
        });
        for (size_t i = 0; i < evs.size(); ++i) {
            if (evs[i]->t != static_cast<int>(i) + 1) {
                violations.push_back("forecaster " + id + " has non-consecutive t values");
                break;
            }
        }
    }
    return violations;
}

/// Metaculus-style crowd aggregate: every submission weighted e^sqrt(t),
/// aggregated by weighted median (first value whose cumulative weight reaches
/// half the total).
inline Probability metaculus_weighted_median(std::vector<ForecasterEvent> events) {
    if (events.empty()) throw EmptyInput("weighted median needs at least one event");
    std::stable_sort(events.begin(), events.end(), [](const ForecasterEvent& a,
                                                      const ForecasterEvent& b) {
        return a.value < b.value;
    });
    double total = 0.0;
    for (const auto& e : events) total += std::exp(std::sqrt(static_cast<double>(e.t)));
    double cum = 0.0;
    for (const auto& e : events) {
        cum += std::exp(std::sqrt(static_cast<double>(e.t)));
        if (cum >= total / 2.0) return e.value;
    }
    return events.back().value;  // unreachable with exact arithmetic
}

/// GJOpen-style crowd aggregate: for each forecaster keep the most recent
/// ceil(0.4 * m) of their m forecasts (at least one), then take the unweighted
/// mean of the pooled kept values.
inline Probability gjopen_recent_mean(const std::vector<ForecasterEvent>& events) {
    if (events.empty()) throw EmptyInput("recent mean needs at least one event");
    std::map<std::string, std::vector<const ForecasterEvent*>> by_forecaster;
    for (const auto& e : events) by_forecaster[e.forecaster_id].push_back(&e);
    double sum = 0.0;
    size_t kept = 0;
    for (auto& [id, evs] : by_forecaster) {
        std::stable_sort(evs.begin(), evs.end(), [](const ForecasterEvent* a,
                                                    const ForecasterEvent* b) {
            if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
            return a->t < b->t;
        });
        size_t m = evs.size();
        size_t keep = static_cast<size_t>(
            std::ceil(0.4 * static_cast<double>(m)));
        if (keep < 1) keep = 1;
        for (size_t i = m - keep; i < m; ++i) {
            sum += evs[i]->value.value();
            ++kept;
        }
    }
    return Probability(sum / static_cast<double>(kept));
}

}  // namespace foresight
