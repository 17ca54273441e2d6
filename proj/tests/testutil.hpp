#pragma once

#include <random>
#include <string>
#include <vector>

#include "foresight/types.hpp"

namespace foresight::testutil {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline ForecastQuestion make_question(const std::string& id, Date begin, Date close,
                                      std::optional<Date> resolve = std::nullopt,
                                      std::optional<int> outcome = std::nullopt) {
    ForecastQuestion q;
    q.id = id;
    q.title = "Will event " + id + " happen?";
    q.background = "Background for " + id + ".";
    q.resolution_criteria = "Resolves yes if event " + id + " happens.";
    q.date_begin = begin;
    q.date_close = close;
    q.date_resolve = resolve;
    if (outcome) q.resolution = Outcome(*outcome);
    q.platform = Platform::Metaculus;
    q.category = Category::ScienceTech;
    q.source_url = "https://example.org/q/" + id;
    return q;
}

inline void add_series_point(ForecastQuestion& q, Date date, double value) {
    CommunityPoint p;
    p.timestamp.date = date;
    p.value = Probability(value);
    q.community_series.points.push_back(p);
}

/// A resolved question with a community series covering its whole window.
inline ForecastQuestion make_scored_question(const std::string& id, Date begin, int window_days,
                                             int resolve_offset, int outcome,
                                             double crowd_value) {
    auto q = make_question(id, begin, begin + window_days, begin + resolve_offset, outcome);
    add_series_point(q, begin, crowd_value);
    return q;
}

}  // namespace foresight::testutil
