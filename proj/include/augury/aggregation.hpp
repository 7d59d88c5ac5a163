#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "augury/csv.hpp"
#include "augury/error.hpp"
#include "augury/ingestion.hpp"
#include "augury/series.hpp"
#include "augury/time.hpp"

namespace augury {

struct AppShare {
    std::string app_id;
    std::size_t request_count = 0;
    double share = 0.0;
};

/// Applications by descending request count, ties broken by app id.
struct AppRanking {
    std::vector<AppShare> apps;
    std::size_t total_requests = 0;
};

struct MemoryPoint {
    Timestamp timestamp{};
    double cumulative_mb = 0.0;
};

struct DayCurve {
    Timestamp day{};  ///< midnight UTC
    std::vector<MemoryPoint> points;
};

/// Worst-case accumulated memory, one curve per calendar day.
struct MemoryProjection {
    std::vector<DayCurve> days;
};

struct RuntimeSample {
    Timestamp timestamp{};
    Duration duration{};
};

struct RuntimeDistribution {
    std::vector<RuntimeSample> samples;
    std::size_t skipped = 0;  ///< matching records without a duration
};

/// A clock-time window [start, end) within each day.
struct ClockWindow {
    Duration start{};
    Duration end{};
};

/**
 * Request counts of `app_id` per slot of width `lag`. Slots are half-open and
 * aligned to midnight UTC; the grid runs from the slot of the first matching
 * record to the slot of the last, with empty slots set to 0.
 */
inline RegularSeries count_in_slots(const std::vector<RequestRecord>& records, std::string_view app_id, Duration lag) {
    detail::require(lag.count() > 0 && kDay % lag == Duration::zero(), ErrorKind::InvalidParameter,
                    "slot width must be positive and divide one day");
    detail::require(!records.empty(), ErrorKind::EmptyInput, "no request records");
    std::vector<Timestamp> times;
    for (const auto& r : records) {
        if (r.app_id == app_id) {
            times.push_back(r.timestamp);
        }
    }
    detail::require(!times.empty(), ErrorKind::EmptySelection, "no records for app '" + std::string(app_id) + "'");
    const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
    const Timestamp origin = floor_to(*lo, lag);
    const auto n = static_cast<std::size_t>((floor_to(*hi, lag) - origin) / lag) + 1;
    std::vector<RegularSeries::Value> counts(n, 0.0);
    for (Timestamp t : times) {
        *counts[static_cast<std::size_t>((t - origin) / lag)] += 1.0;
    }
    return RegularSeries(origin, lag, std::move(counts));
}

inline RegularSeries count_executions(const std::vector<RequestRecord>& records, std::string_view app_id,
                                      int window_minutes) {
    detail::require(window_minutes >= 1, ErrorKind::InvalidParameter, "window must be at least one minute");
    return count_in_slots(records, app_id, kMinute * window_minutes);
}

/// Top-k applications; shares are relative to all records.
inline AppRanking rank_applications(const std::vector<RequestRecord>& records, std::size_t top_k) {
    detail::require(!records.empty(), ErrorKind::EmptyInput, "no request records");
    detail::require(top_k >= 1, ErrorKind::InvalidParameter, "top_k must be at least 1");
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records) {
        ++counts[r.app_id];
    }
    std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    AppRanking ranking;
    ranking.total_requests = records.size();
    const double total = static_cast<double>(records.size());
    for (std::size_t i = 0; i < sorted.size() && i < top_k; ++i) {
        ranking.apps.push_back({sorted[i].first, sorted[i].second, static_cast<double>(sorted[i].second) / total});
    }
    return ranking;
}

/// Cumulative k * per_execution_mb at the k-th execution inside the clock window, per day.
inline MemoryProjection accumulated_memory(const std::vector<RequestRecord>& records, std::string_view app_id,
                                           const ClockWindow& window, double per_execution_mb) {
    detail::require(per_execution_mb > 0.0, ErrorKind::InvalidParameter, "memory per execution must be positive");
    detail::require(window.start >= Duration::zero() && window.end <= kDay && window.start < window.end,
                    ErrorKind::InvalidParameter, "clock window must satisfy 00:00 <= start < end <= 24:00");
    std::map<Timestamp, std::vector<Timestamp>> by_day;
    for (const auto& r : records) {
        if (r.app_id != app_id) {
            continue;
        }
        const Duration clock = time_of_day(r.timestamp);
        if (clock >= window.start && clock < window.end) {
            by_day[day_start(r.timestamp)].push_back(r.timestamp);
        }
    }
    detail::require(!by_day.empty(), ErrorKind::EmptySelection,
                    "no executions of '" + std::string(app_id) + "' inside the clock window");
    MemoryProjection projection;
    for (auto& [day, times] : by_day) {
        std::sort(times.begin(), times.end());
        DayCurve curve{day, {}};
        for (std::size_t k = 0; k < times.size(); ++k) {
            curve.points.push_back({times[k], static_cast<double>(k + 1) * per_execution_mb});
        }
        projection.days.push_back(std::move(curve));
    }
    return projection;
}

/// Chronological (timestamp, duration) pairs for one application.
inline RuntimeDistribution runtime_distribution(const std::vector<RequestRecord>& records, std::string_view app_id) {
    RuntimeDistribution dist;
    for (const auto& r : records) {
        if (r.app_id != app_id) {
            continue;
        }
        if (r.duration) {
            dist.samples.push_back({r.timestamp, *r.duration});
        } else {
            ++dist.skipped;
        }
    }
    detail::require(!dist.samples.empty(), ErrorKind::EmptySelection,
                    "no records of '" + std::string(app_id) + "' carry a duration");
    std::stable_sort(dist.samples.begin(), dist.samples.end(),
                     [](const RuntimeSample& a, const RuntimeSample& b) {
                         return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.duration < b.duration;
                     });
    return dist;
}

// CSV exports

inline void write_counts_csv(std::ostream& os, const RegularSeries& counts) {
    csv::Writer w(os);
    w.row({"slot_start", "count"});
    for (std::size_t i = 0; i < counts.size(); ++i) {
        w.row({format_iso8601(counts.time_at(i)), csv::format_optional(counts[i])});
    }
}

inline void write_ranking_csv(std::ostream& os, const AppRanking& ranking) {
    csv::Writer w(os);
    w.row({"app_id", "count", "share"});
    for (const auto& a : ranking.apps) {
        w.row({a.app_id, std::to_string(a.request_count), csv::format_number(a.share)});
    }
}

inline void write_projection_csv(std::ostream& os, const MemoryProjection& projection) {
    csv::Writer w(os);
    w.row({"day", "timestamp", "cumulative_mb"});
    for (const auto& d : projection.days) {
        const std::string day = format_iso8601(d.day).substr(0, 10);
        for (const auto& p : d.points) {
            w.row({day, format_iso8601(p.timestamp), csv::format_number(p.cumulative_mb)});
        }
    }
}

inline void write_runtimes_csv(std::ostream& os, const RuntimeDistribution& dist) {
    csv::Writer w(os);
    w.row({"timestamp", "duration_us"});
    for (const auto& s : dist.samples) {
        w.row({format_iso8601(s.timestamp), std::to_string(s.duration.count())});
    }
}

}  // namespace augury
