#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "foresight/dates.hpp"
#include "foresight/errors.hpp"
#include "foresight/util.hpp"

namespace foresight {

/// A probability in [0, 1]. Construction outside the range throws.
class Probability {
public:
    Probability() : value_(0.5) {}
    explicit Probability(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0))
            throw ValidationError("probability out of [0,1]: " + std::to_string(value));
    }

    double value() const { return value_; }
    auto operator<=>(const Probability&) const = default;

    /// Clamps into [0,1] instead of throwing; reports whether clamping occurred.
    static std::pair<Probability, bool> clamped(double value) {
        if (value < 0.0) return {Probability(0.0), true};
        if (value > 1.0) return {Probability(1.0), true};
        return {Probability(value), false};
    }

private:
    double value_;
};

/// Binary question outcome.
class Outcome {
public:
    Outcome() : value_(0) {}
    explicit Outcome(int value) : value_(value) {
        if (value != 0 && value != 1)
            throw ValidationError("outcome must be 0 or 1, got " + std::to_string(value));
    }
    int value() const { return value_; }
    auto operator<=>(const Outcome&) const = default;

private:
    int value_;
};

enum class Platform { Metaculus, GJOpen, INFER, Polymarket, Manifold };

inline std::string platform_name(Platform p) {
    switch (p) {
        case Platform::Metaculus: return "Metaculus";
        case Platform::GJOpen: return "GJOpen";
        case Platform::INFER: return "INFER";
        case Platform::Polymarket: return "Polymarket";
        case Platform::Manifold: return "Manifold";
    }
    return "Metaculus";
}

inline Platform parse_platform(const std::string& name) {
    if (name == "Metaculus") return Platform::Metaculus;
    if (name == "GJOpen" || name == "Good Judgment Open") return Platform::GJOpen;
    if (name == "INFER" || name == "CSET") return Platform::INFER;
    if (name == "Polymarket") return Platform::Polymarket;
    if (name == "Manifold") return Platform::Manifold;
    throw ParseError("unknown platform: " + name);
}

// The 11 question categories used by the curation prompt.
enum class Category {
    ScienceTech,
    HealthcareBiology,
    EconomicsBusiness,
    EnvironmentEnergy,
    PoliticsGovernance,
    EducationResearch,
    ArtsRecreation,
    SecurityDefense,
    SocialSciences,
    Sports,
    Other,
};

inline const std::vector<std::pair<Category, std::string>>& category_labels() {
    static const std::vector<std::pair<Category, std::string>> labels = {
        {Category::ScienceTech, "Science & Tech"},
        {Category::HealthcareBiology, "Healthcare & Biology"},
        {Category::EconomicsBusiness, "Economics & Business"},
        {Category::EnvironmentEnergy, "Environment & Energy"},
        {Category::PoliticsGovernance, "Politics & Governance"},
        {Category::EducationResearch, "Education & Research"},
        {Category::ArtsRecreation, "Arts & Recreation"},
        {Category::SecurityDefense, "Security & Defense"},
        {Category::SocialSciences, "Social Sciences"},
        {Category::Sports, "Sports"},
        {Category::Other, "Other"},
    };
    return labels;
}

inline std::string category_name(Category c) {
    for (const auto& [cat, name] : category_labels())
        if (cat == c) return name;
    return "Other";
}

/// Exact match against the 11 labels, plus aliases seen in platform exports.
/// Unknown labels map to Other.
inline Category parse_category(const std::string& raw) {
    const std::string name = trim(raw);
    for (const auto& [cat, label] : category_labels())
        if (name == label) return cat;
    if (name == "Science & Technology") return Category::ScienceTech;
    if (name == "Security & Defenses") return Category::SecurityDefense;
    return Category::Other;
}

struct CommunityPoint {
    DateTime timestamp;
    Probability value;
};

/// A platform's running crowd aggregate: (timestamp, probability) points with
/// non-decreasing timestamps. May be empty for questions with no forecasts yet.
struct CommunityPredictionSeries {
    std::vector<CommunityPoint> points;

    bool empty() const { return points.empty(); }
};

struct ForecastQuestion {
    std::string id;
    Platform platform = Platform::Metaculus;
    std::string title;
    std::string background;
    std::string resolution_criteria;
    Date date_begin;
    Date date_close;
    std::optional<Date> date_resolve;
    std::optional<Outcome> resolution;
    Category category = Category::Other;
    std::string source_url;
    std::vector<std::string> extracted_urls;
    CommunityPredictionSeries community_series;

    bool resolved() const { return resolution.has_value(); }
};

/// One model-generated reasoning + probability at a (question, retrieval date).
struct ForecastSample {
    std::string question_id;
    int retrieval_index = 1;
    Date retrieval_date;
    std::string model_id;
    std::string prompt_id;
    std::string reasoning;
    Probability probability;
    bool refusal = false;
    bool extraction_fallback = false;
};

/// Returns human-readable descriptions of every violated invariant; empty
/// means the question is valid. Never mutates q.
inline std::vector<std::string> validate_question(const ForecastQuestion& q) {
    std::vector<std::string> violations;
    if (!(q.date_begin < q.date_close))
        violations.push_back("date_begin must be strictly before date_close (" +
                             q.date_begin.str() + " vs " + q.date_close.str() + ")");
    if (q.date_resolve && *q.date_resolve < q.date_begin)
        violations.push_back("date_resolve precedes date_begin");
    if (q.resolution.has_value() != q.date_resolve.has_value())
        violations.push_back("resolution must be present exactly when date_resolve is present");
    for (size_t i = 1; i < q.community_series.points.size(); ++i) {
        if (q.community_series.points[i].timestamp < q.community_series.points[i - 1].timestamp) {
            violations.push_back("community prediction timestamps must be non-decreasing");
            break;
        }
    }
    return violations;
}

}  // namespace foresight
