#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "foresight/errors.hpp"

namespace foresight {

/// Calendar date at day granularity. All question timestamps are treated as
/// timezone-naive calendar days.
class Date {
public:
    Date() : days_(std::chrono::sys_days{}) {}
    explicit Date(std::chrono::sys_days d) : days_(d) {}
    Date(int year, unsigned month, unsigned day)
        : days_(std::chrono::sys_days{std::chrono::year_month_day{
              std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}}}) {}

    static Date parse(std::string_view text) {
        int y = 0;
        unsigned m = 0, d = 0;
        if (std::sscanf(std::string(text).c_str(), "%d-%u-%u", &y, &m, &d) != 3)
            throw ParseError("invalid date: " + std::string(text));
        std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
        if (!ymd.ok()) throw ParseError("invalid date: " + std::string(text));
        return Date(std::chrono::sys_days{ymd});
    }

    std::string str() const {
        std::chrono::year_month_day ymd{days_};
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                      unsigned(ymd.day()));
        return buf;
    }

    Date operator+(int days) const { return Date(days_ + std::chrono::days{days}); }
    Date operator-(int days) const { return Date(days_ - std::chrono::days{days}); }
    /// Whole days from other to *this.
    long operator-(Date other) const { return (days_ - other.days_).count(); }

    auto operator<=>(const Date&) const = default;

    std::chrono::sys_days sys() const { return days_; }

private:
    std::chrono::sys_days days_;
};

/// A timestamp as it appears in community-prediction series: a calendar day
/// plus an optional time-of-day, preserved from input but compared against
/// retrieval dates at day granularity.
struct DateTime {
    Date date;
    int seconds_of_day = -1;  // -1 when the input carried no time component

    static DateTime parse(std::string_view text) {
        std::string s(text);
        DateTime dt;
        size_t sep = s.find_first_of("T ");
        if (sep == std::string::npos) {
            dt.date = Date::parse(s);
            return dt;
        }
        dt.date = Date::parse(s.substr(0, sep));
        int h = 0, m = 0, sec = 0;
        int n = std::sscanf(s.c_str() + sep + 1, "%d:%d:%d", &h, &m, &sec);
        if (n < 2 || h < 0 || h > 23 || m < 0 || m > 59 || sec < 0 || sec > 60)
            throw ParseError("invalid timestamp: " + s);
        dt.seconds_of_day = h * 3600 + m * 60 + sec;
        return dt;
    }

    std::string str() const {
        if (seconds_of_day < 0) return date.str();
        char buf[16];
        std::snprintf(buf, sizeof(buf), " %02d:%02d:%02d", seconds_of_day / 3600,
                      (seconds_of_day / 60) % 60, seconds_of_day % 60);
        return date.str() + buf;
    }

    auto operator<=>(const DateTime&) const = default;
};

inline std::optional<Date> parse_date_opt(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return Date::parse(text);
}

}  // namespace foresight
