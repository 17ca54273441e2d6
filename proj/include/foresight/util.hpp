#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace foresight {

inline std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            break;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

// Collapses runs of whitespace to single spaces and trims the ends.
inline std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true;  // leading spaces dropped
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            out.push_back(static_cast<char>(c));
            in_space = false;
        }
    }
    return out;
}

inline std::vector<std::string> whitespace_tokens(std::string_view s) {
    std::vector<std::string> words;
    std::istringstream iss{std::string(s)};
    std::string w;
    while (iss >> w) words.push_back(w);
    return words;
}

inline size_t count_words(std::string_view s) { return whitespace_tokens(s).size(); }

// Keeps the first `max_words` whitespace-delimited words.
inline std::string truncate_words(std::string_view s, size_t max_words) {
    auto words = whitespace_tokens(s);
    if (words.size() <= max_words) return normalize_whitespace(s);
    std::string out;
    for (size_t i = 0; i < max_words; ++i) {
        if (i) out.push_back(' ');
        out += words[i];
    }
    return out;
}

// FNV-1a, used for cache keys and config hashes. Stable across platforms,
// unlike std::hash.
inline uint64_t fnv1a64(std::string_view data, uint64_t seed = 1469598103934665603ull) {
    uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// Deterministic bounded uniform draw. std::uniform_int_distribution is not
// portable across standard libraries, so logs seeded through here stay
// byte-identical everywhere.
template <typename Rng>
inline uint64_t bounded_uniform(Rng& rng, uint64_t bound) {
    return bound == 0 ? 0 : rng() % bound;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

inline bool contains_ci(std::string_view haystack, std::string_view needle) {
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

}  // namespace foresight
