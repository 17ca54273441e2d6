#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "foresight/crowd.hpp"
#include "testutil.hpp"

using namespace foresight;

namespace {

ForecasterEvent make_event(const std::string& who, int t, double value, Date when) {
    ForecasterEvent e;
    e.forecaster_id = who;
    e.t = t;
    e.value = Probability(value);
    e.timestamp.date = when;
    return e;
}

const Date d1(2023, 4, 17);

}  // namespace

TEST(CrowdAt, LatestPointOnOrBeforeDate) {
    CommunityPredictionSeries series;
    series.points.push_back({DateTime{d1, -1}, Probability(0.725)});
    series.points.push_back({DateTime{d1 + 2, -1}, Probability(0.734)});
    EXPECT_DOUBLE_EQ(crowd_at(series, d1 + 1).value(), 0.725);
    EXPECT_DOUBLE_EQ(crowd_at(series, d1 + 2).value(), 0.734);
}

TEST(CrowdAt, SameDayLookup) {
    CommunityPredictionSeries series;
    series.points.push_back({DateTime{d1, -1}, Probability(0.5)});
    EXPECT_DOUBLE_EQ(crowd_at(series, d1).value(), 0.5);
}

TEST(CrowdAt, NoPointBeforeDateThrows) {
    CommunityPredictionSeries series;
    series.points.push_back({DateTime{d1 + 4, -1}, Probability(0.9)});
    EXPECT_THROW(crowd_at(series, d1), CrowdUnavailable);
    EXPECT_THROW(crowd_at({}, d1), CrowdUnavailable);
}

TEST(CrowdAt, IntradayPointsUseLatestOfDay) {
    CommunityPredictionSeries series;
    series.points.push_back({DateTime{d1, 9 * 3600}, Probability(0.4)});
    series.points.push_back({DateTime{d1, 17 * 3600}, Probability(0.6)});
    EXPECT_DOUBLE_EQ(crowd_at(series, d1).value(), 0.6);
}

TEST(WeightedMedian, EqualWeightsReduceToMedian) {
    std::vector<ForecasterEvent> events = {make_event("a", 1, 0.2, d1),
                                           make_event("b", 1, 0.5, d1),
                                           make_event("c", 1, 0.9, d1)};
    EXPECT_DOUBLE_EQ(metaculus_weighted_median(events).value(), 0.5);
}

TEST(WeightedMedian, LaterForecastsWeighHeavier) {
    // Weights e, e^sqrt(2), e; half total reached at value 0.4.
    std::vector<ForecasterEvent> events = {make_event("A", 1, 0.2, d1),
                                           make_event("A", 2, 0.8, d1 + 1),
                                           make_event("B", 1, 0.4, d1)};
    EXPECT_DOUBLE_EQ(metaculus_weighted_median(events).value(), 0.4);
}

TEST(WeightedMedian, Singleton) {
    EXPECT_DOUBLE_EQ(metaculus_weighted_median({make_event("a", 1, 0.7, d1)}).value(), 0.7);
    EXPECT_THROW(metaculus_weighted_median({}), EmptyInput);
}

TEST(GjopenRecentMean, KeepsMostRecentFortyPercent) {
    std::vector<ForecasterEvent> events;
    double values[] = {0.2, 0.4, 0.6, 0.8, 1.0};
    for (int t = 1; t <= 5; ++t) events.push_back(make_event("A", t, values[t - 1], d1 + t));
    events.push_back(make_event("B", 1, 0.5, d1));
    // ceil(0.4*5)=2 kept for A (0.8, 1.0); B keeps its only forecast.
    EXPECT_NEAR(gjopen_recent_mean(events).value(), (0.8 + 1.0 + 0.5) / 3.0, 1e-15);
}

TEST(GjopenRecentMean, SingletonAndPairs) {
    EXPECT_DOUBLE_EQ(gjopen_recent_mean({make_event("a", 1, 0.3, d1)}).value(), 0.3);
    EXPECT_DOUBLE_EQ(gjopen_recent_mean({make_event("a", 1, 0.2, d1),
                                         make_event("b", 1, 0.8, d1)})
                         .value(),
                     0.5);
    EXPECT_THROW(gjopen_recent_mean({}), EmptyInput);
}

TEST(GjopenRecentMean, IdenticalValuesReturnExactly) {
    std::vector<ForecasterEvent> events;
    for (int t = 1; t <= 7; ++t) events.push_back(make_event("a", t, 0.37, d1 + t));
    EXPECT_DOUBLE_EQ(gjopen_recent_mean(events).value(), 0.37);
}

TEST(ValidateEvents, CatchesNonConsecutiveT) {
    std::vector<ForecasterEvent> good = {make_event("a", 1, 0.2, d1),
                                         make_event("a", 2, 0.4, d1 + 1)};
    EXPECT_TRUE(validate_events(good).empty());
    std::vector<ForecasterEvent> bad = {make_event("a", 1, 0.2, d1),
                                        make_event("a", 3, 0.4, d1 + 1)};
    EXPECT_FALSE(validate_events(bad).empty());
}

TEST(CrowdAggregators, AgreeWithBruteForceOracles) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        // Random instance: up to 8 forecasters, up to 6 forecasts each.
        std::vector<ForecasterEvent> events;
        size_t forecasters = 1 + rng() % 8;
        for (size_t f = 0; f < forecasters; ++f) {
            size_t m = 1 + rng() % 6;
            for (size_t t = 1; t <= m; ++t)
                events.push_back(make_event("f" + std::to_string(f), static_cast<int>(t),
                                            testutil::uniform01(rng),
                                            d1 + static_cast<int>(t)));
        }

        // Oracle 1: explicit cumulative-weight scan over value-sorted events.
        {
            std::vector<std::pair<double, double>> weighted;  // (value, weight)
            for (const auto& e : events)
                weighted.emplace_back(e.value.value(), std::exp(std::sqrt(double(e.t))));
            std::sort(weighted.begin(), weighted.end());
            double total = 0.0;
            for (auto& [v, w] : weighted) total += w;
            double cum = 0.0;
            double expected = weighted.back().first;
            for (auto& [v, w] : weighted) {
                cum += w;
                if (cum >= total / 2.0) {
                    expected = v;
                    break;
                }
            }
            EXPECT_NEAR(metaculus_weighted_median(events).value(), expected, 1e-12);
        }

        // Oracle 2: explicit per-forecaster subset selection.
        {
            std::map<std::string, std::vector<std::pair<int, double>>> by_forecaster;
            for (const auto& e : events)
                by_forecaster[e.forecaster_id].emplace_back(e.t, e.value.value());
            double sum = 0.0;
            size_t kept = 0;
            for (auto& [id, list] : by_forecaster) {
                std::sort(list.begin(), list.end());
                size_t keep = static_cast<size_t>(std::ceil(0.4 * double(list.size())));
                if (keep < 1) keep = 1;
                for (size_t i = list.size() - keep; i < list.size(); ++i) {
                    sum += list[i].second;
                    ++kept;
                }
            }
            EXPECT_NEAR(gjopen_recent_mean(events).value(), sum / double(kept), 1e-12);
        }

        // Output of the weighted median is always one of the inputs.
        double wm = metaculus_weighted_median(events).value();
        bool found = false;
        double lo = 1.0, hi = 0.0;
        for (const auto& e : events) {
            lo = std::min(lo, e.value.value());
            hi = std::max(hi, e.value.value());
            if (e.value.value() == wm) found = true;
        }
        EXPECT_TRUE(found);
        EXPECT_GE(wm, lo);
        EXPECT_LE(wm, hi);
    }
}
