#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "foresight/types.hpp"
#include "foresight/util.hpp"

namespace foresight {

struct ProbabilityExtraction {
    Probability probability;
    bool refusal = false;        // nothing extractable; fallback substituted
    bool used_fallback = false;  // asterisk pattern absent (bare decimal or fallback)
    bool clamped = false;        // parsed value fell outside [0,1]
};

namespace detail {

inline std::optional<double> parse_full_double(std::string_view s) {
    std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) return std::nullopt;
    return v;
}

/// Span (inclusive of both asterisks) and value of the last *x* token whose
/// content parses as a decimal.
inline std::optional<std::pair<std::pair<size_t, size_t>, double>> last_asterisk_decimal(
    std::string_view text) {
    std::optional<std::pair<std::pair<size_t, size_t>, double>> found;
    size_t i = 0;
    while (true) {
        size_t open = text.find('*', i);
        if (open == std::string_view::npos) break;
        size_t close = text.find('*', open + 1);
        if (close == std::string_view::npos) break;
        auto value = parse_full_double(text.substr(open + 1, close - open - 1));
        if (value) {
            found = {{open, close}, *value};
            i = close + 1;  // consume the pair
        } else {
            i = close;  // the closing star may open the next pair
        }
    }
    return found;
}

/// Last decimal token in [0,1] positioned after any occurrence of
/// "probability" or "answer" (case-insensitive).
inline std::optional<double> last_bare_decimal_after_keyword(std::string_view text) {
    const std::string lower = to_lower(text);
    size_t first_keyword = std::string::npos;
    for (const char* kw : {"probability", "answer"}) {
        size_t pos = lower.find(kw);
        if (pos != std::string::npos) first_keyword = std::min(first_keyword, pos);
    }
    if (first_keyword == std::string::npos) return std::nullopt;

    std::optional<double> found;
    size_t i = first_keyword;
    while (i < text.size()) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            if (i > 0 && (std::isdigit(static_cast<unsigned char>(text[i - 1])) ||
                          text[i - 1] == '.')) {
                ++i;
                continue;
            }
            size_t j = i;
            while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) ||
                                       text[j] == '.'))
                ++j;
            std::string token(text.substr(i, j - i));
            while (!token.empty() && token.back() == '.') token.pop_back();  // sentence period
            auto value = parse_full_double(token);
            if (value && *value >= 0.0 && *value <= 1.0) found = *value;
            i = j;
        } else {
            ++i;
        }
    }
    return found;
}

}  // namespace detail

/// Pulls the forecast probability out of a model response. Total by design:
/// prefers the last asterisk-delimited decimal (clamped into [0,1] when
/// needed), then the last bare decimal in [0,1] after "probability"/"answer",
/// then the configured fallback with refusal set.
inline ProbabilityExtraction extract_probability(const std::string& response,
                                                 Probability fallback) {
    ProbabilityExtraction out;
    if (auto star = detail::last_asterisk_decimal(response)) {
        auto [p, clamped] = Probability::clamped(star->second);
        out.probability = p;
        out.clamped = clamped;
        return out;
    }
    if (auto bare = detail::last_bare_decimal_after_keyword(response)) {
        out.probability = Probability(*bare);
        out.used_fallback = true;
        return out;
    }
    out.probability = fallback;
    out.refusal = true;
    out.used_fallback = true;
    return out;
}

/// Span of the final asterisk-delimited decimal, for splicing an amended
/// prediction back into a reasoning text.
inline std::optional<std::pair<size_t, size_t>> final_prediction_span(const std::string& text) {
    auto found = detail::last_asterisk_decimal(text);
    if (!found) return std::nullopt;
    return found->first;
}

}  // namespace foresight
