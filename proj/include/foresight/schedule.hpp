#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "foresight/dates.hpp"
#include "foresight/errors.hpp"

namespace foresight {

struct RetrievalPoint {
    int index = 1;  // k in [1, n]
    Date date;
};

/// Geometric retrieval schedule. The kth candidate date is
///
///     date_begin + floor((D - 1)^(k/n))  days,  D = days(date_close - date_begin),
///
/// with a floor of one day so no retrieval coincides with date_begin.
/// Candidates strictly after date_resolve are excluded; duplicate dates after
/// day rounding collapse onto the smallest index. Retrieval on the resolve day
/// itself is kept.
inline std::vector<RetrievalPoint> retrieval_dates(Date date_begin, Date date_close,
                                                   std::optional<Date> date_resolve, int n = 5) {
    if (!(date_begin < date_close))
        throw InvalidWindow("date_close must be strictly after date_begin (" + date_begin.str() +
                            " vs " + date_close.str() + ")");
    if (n < 1) throw InvalidN("retrieval schedule needs n >= 1, got " + std::to_string(n));

    const double window = static_cast<double>(date_close - date_begin);
    std::vector<RetrievalPoint> points;
    points.reserve(static_cast<size_t>(n));
    long last_offset = -1;
    for (int k = 1; k <= n; ++k) {
        // The 1e-9 nudge keeps exact integer powers (e.g. 32^(3/5) = 8) from
        // flooring one short when pow lands a hair below the true value.
        long offset = static_cast<long>(
            std::floor(std::pow(window - 1.0, static_cast<double>(k) / n) + 1e-9));
        if (offset < 1) offset = 1;
        if (offset == last_offset) continue;  // collapsed duplicate, keep smallest index
        last_offset = offset;
        Date date = date_begin + static_cast<int>(offset);
        if (date_resolve && date > *date_resolve) break;  // later candidates only grow
        points.push_back({k, date});
    }
    return points;
}

/// Latest date the schedule may ever emit for this window, resolve date aside.
inline Date schedule_upper_bound(Date date_begin, Date date_close) {
    long span = date_close - date_begin;
    long max_offset = span - 1 < 1 ? 1 : span - 1;
    return date_begin + static_cast<int>(max_offset);
}

}  // namespace foresight
