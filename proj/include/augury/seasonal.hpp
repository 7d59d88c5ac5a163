#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "augury/error.hpp"
#include "augury/ingestion.hpp"
#include "augury/series.hpp"
#include "augury/stats.hpp"
#include "augury/time.hpp"

namespace augury {

enum class PeriodKind { Hourly, Daily, Weekly };

inline Duration period_duration(PeriodKind kind) {
    switch (kind) {
        case PeriodKind::Hourly: return kHour;
        case PeriodKind::Daily: return kDay;
        case PeriodKind::Weekly: return kDay * 7;
    }
    return kDay;
}

inline std::string_view to_string(PeriodKind kind) {
    switch (kind) {
        case PeriodKind::Hourly: return "hourly";
        case PeriodKind::Daily: return "daily";
        case PeriodKind::Weekly: return "weekly";
    }
    return "daily";
}

// Weekly periods start on Monday 00:00 UTC; the epoch fell on a Thursday.
inline Timestamp period_origin(PeriodKind kind) {
    return kind == PeriodKind::Weekly ? Timestamp{kDay * 4} : Timestamp{};
}

/// A seasonal period and the number of profile bins it is split into.
struct Period {
    PeriodKind kind = PeriodKind::Daily;
    std::size_t bins_per_period = 24;

    /// One bin per series slot, e.g. daily over an hourly series gives 24 bins.
    static Period for_lag(PeriodKind kind, Duration lag) {
        detail::require(lag.count() > 0 && period_duration(kind) % lag == Duration::zero(),
                        ErrorKind::InvalidParameter, "period is not a whole number of lags");
        return {kind, static_cast<std::size_t>(period_duration(kind) / lag)};
    }
};

struct Decomposition {
    RegularSeries seasonal;
    RegularSeries trend;
    RegularSeries residual;
};

struct Outlier {
    Timestamp timestamp{};
    double value = 0.0;

    friend bool operator==(const Outlier&, const Outlier&) = default;
};

/// Boxplot statistics for one profile bin.
struct BinStats {
    std::size_t bin_index = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<Outlier> outliers;
    std::size_t n_entries = 0;
};

struct SeasonalProfile {
    std::vector<BinStats> bins;
};

namespace detail {

struct SeasonalGrid {
    std::size_t samples_per_period = 0;
    std::size_t phase = 0;  // position of index 0 within its period
    std::int64_t first_period = 0;
};

inline SeasonalGrid seasonal_grid(const RegularSeries& series, const Period& period) {
    const Duration span = period_duration(period.kind);
    require(span % series.lag() == Duration::zero(), ErrorKind::InvalidParameter,
            "period " + std::string(to_string(period.kind)) + " is not a whole number of series lags");
    SeasonalGrid g;
    g.samples_per_period = static_cast<std::size_t>(span / series.lag());
    require(g.samples_per_period >= 2, ErrorKind::InvalidParameter, "period must span at least 2 lags");
    require(period.bins_per_period >= 2 && g.samples_per_period % period.bins_per_period == 0,
            ErrorKind::InvalidParameter, "bins per period must be >= 2 and divide the period");
    const auto origin_slot = floor_div((series.start_time() - period_origin(period.kind)).count(), series.lag().count());
    const auto p = static_cast<std::int64_t>(g.samples_per_period);
    g.first_period = floor_div(origin_slot, p);
    g.phase = static_cast<std::size_t>(origin_slot - g.first_period * p);
    return g;
}

inline void require_two_periods(const RegularSeries& series, std::size_t p) {
    require(series.size() >= 2 * p && series.count_present() >= 2 * p, ErrorKind::InsufficientData,
            "decomposition needs at least 2 full periods (" + std::to_string(2 * p) + " values)");
}

}  // namespace detail

/**
 * Classical additive decomposition Y = S + T + E. The trend is a centered
 * uniform moving average over one period (2 x p filter for even p), the
 * seasonal term is the per-position mean of the detrended series re-centered
 * to zero mean, and the residual is what remains.
 */
inline Decomposition decompose(const RegularSeries& series, const Period& period) {
    const auto grid = detail::seasonal_grid(series, period);
    const std::size_t p = grid.samples_per_period;
    detail::require_two_periods(series, p);

    RegularSeries trend = moving_average(series, p, WeightScheme::uniform(), Alignment::Centered);

    std::vector<double> sums(p, 0.0);
    std::vector<std::size_t> counts(p, 0);
    for (std::size_t t = 0; t < series.size(); ++t) {
        if (series[t] && trend[t]) {
            const std::size_t pos = (grid.phase + t) % p;
            sums[pos] += *series[t] - *trend[t];
            ++counts[pos];
        }
    }
    std::vector<double> pattern(p);
    for (std::size_t k = 0; k < p; ++k) {
        detail::require(counts[k] > 0, ErrorKind::InsufficientData,
                        "no detrended value for seasonal position " + std::to_string(k));
        pattern[k] = sums[k] / static_cast<double>(counts[k]);
    }
    const double level = stats::mean(pattern);
    for (double& s : pattern) {
        s -= level;
    }

    RegularSeries seasonal = RegularSeries::missing_like(series);
    RegularSeries residual = RegularSeries::missing_like(series);
    for (std::size_t t = 0; t < series.size(); ++t) {
        seasonal[t] = pattern[(grid.phase + t) % p];
        if (series[t] && trend[t]) {
            residual[t] = *series[t] - *trend[t] - *seasonal[t];
        }
    }
    return {std::move(seasonal), std::move(trend), std::move(residual)};
}

/// Quartiles by linear interpolation; whiskers at the most extreme entries within 1.5 IQR.
inline BinStats box_stats(std::size_t bin_index, std::vector<Outlier> entries) {
    detail::require(!entries.empty(), ErrorKind::InsufficientData,
                    "profile bin " + std::to_string(bin_index) + " has no entries");
    std::vector<double> sorted;
    sorted.reserve(entries.size());
    for (const auto& e : entries) {
        sorted.push_back(e.value);
    }
    std::sort(sorted.begin(), sorted.end());

    BinStats b;
    b.bin_index = bin_index;
    b.n_entries = entries.size();
    b.q1 = stats::quantile_sorted(sorted, 0.25);
    b.median = stats::quantile_sorted(sorted, 0.5);
    b.q3 = stats::quantile_sorted(sorted, 0.75);
    const double iqr = b.q3 - b.q1;
    const double low_fence = b.q1 - 1.5 * iqr;
    const double high_fence = b.q3 + 1.5 * iqr;
    b.whisker_low = *std::find_if(sorted.begin(), sorted.end(), [&](double x) { return x >= low_fence; });
    b.whisker_high = *std::find_if(sorted.rbegin(), sorted.rend(), [&](double x) { return x <= high_fence; });

    std::stable_sort(entries.begin(), entries.end(),
                     [](const Outlier& a, const Outlier& c) { return a.timestamp < c.timestamp; });
    for (const auto& e : entries) {
        if (e.value < low_fence || e.value > high_fence) {
            b.outliers.push_back(e);
        }
    }
    return b;
}

/**
 * Boxplot statistics per bin position across all complete period instances.
 * Each entry is the sum of the series over one bin of one period; bins with
 * a missing slot in an instance contribute no entry for that instance.
 */
inline SeasonalProfile seasonal_profile(const RegularSeries& series, const Period& period, bool detrend) {
    const auto grid = detail::seasonal_grid(series, period);
    const std::size_t p = grid.samples_per_period;
    detail::require_two_periods(series, p);

    RegularSeries input = series;
    if (detrend) {
        const auto trend = moving_average(series, p, WeightScheme::uniform(), Alignment::Centered);
        for (std::size_t t = 0; t < input.size(); ++t) {
            input[t] = (series[t] && trend[t]) ? RegularSeries::Value{*series[t] - *trend[t]} : std::nullopt;
        }
    }

    const std::size_t width = p / period.bins_per_period;
    struct Slice {
        double sum = 0.0;
        std::size_t present = 0;
        Timestamp first{};
    };
    // Keyed by (period instance, bin) so iteration is chronological.
    std::map<std::pair<std::size_t, std::size_t>, Slice> slices;
    for (std::size_t t = 0; t < input.size(); ++t) {
        const std::size_t abs = grid.phase + t;
        const std::size_t instance = abs / p;
        const std::size_t bin = (abs % p) / width;
        auto& s = slices[{instance, bin}];
        if (s.present == 0 && (abs % p) % width == 0) {
            s.first = input.time_at(t);
        }
        if (input[t]) {
            s.sum += *input[t];
            ++s.present;
        }
    }

    std::vector<std::vector<Outlier>> entries(period.bins_per_period);
    for (const auto& [key, s] : slices) {
        if (s.present == width) {
            entries[key.second].push_back({s.first, s.sum});
        }
    }
    SeasonalProfile profile;
    for (std::size_t b = 0; b < entries.size(); ++b) {
        profile.bins.push_back(box_stats(b, std::move(entries[b])));
    }
    return profile;
}

/**
 * Minute-level profile inside one hour of the day: executions of `app_id`
 * are counted per `bin_width_minutes` window and grouped by position within
 * the hour, one entry per calendar day spanned by the app's records.
 */
inline SeasonalProfile zoom_profile(const std::vector<RequestRecord>& records, std::string_view app_id, int hour,
                                    int bin_width_minutes) {
    detail::require(hour >= 0 && hour <= 23, ErrorKind::InvalidParameter, "hour must be in 0..23");
    detail::require(bin_width_minutes >= 1 && 60 % bin_width_minutes == 0, ErrorKind::InvalidParameter,
                    "bin width must divide 60 minutes");
    std::vector<Timestamp> times;
    for (const auto& r : records) {
        if (r.app_id == app_id) {
            times.push_back(r.timestamp);
        }
    }
    detail::require(!times.empty(), ErrorKind::EmptySelection, "no records for app '" + std::string(app_id) + "'");
    const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
    const Timestamp first_day = day_start(*lo);
    const auto n_days = static_cast<std::size_t>((day_start(*hi) - first_day) / kDay) + 1;
    const auto n_bins = static_cast<std::size_t>(60 / bin_width_minutes);
    const Duration width = kMinute * bin_width_minutes;
    const Duration hour_start = kHour * hour;

    std::vector<std::vector<double>> counts(n_days, std::vector<double>(n_bins, 0.0));
    for (Timestamp t : times) {
        const Duration into_hour = time_of_day(t) - hour_start;
        if (into_hour < Duration::zero() || into_hour >= kHour) {
            continue;
        }
        const auto day = static_cast<std::size_t>((day_start(t) - first_day) / kDay);
        counts[day][static_cast<std::size_t>(into_hour / width)] += 1.0;
    }
    SeasonalProfile profile;
    for (std::size_t b = 0; b < n_bins; ++b) {
        std::vector<Outlier> entries;
        for (std::size_t d = 0; d < n_days; ++d) {
            entries.push_back({first_day + kDay * static_cast<std::int64_t>(d) + hour_start +
                                   width * static_cast<std::int64_t>(b),
                               counts[d][b]});
        }
        profile.bins.push_back(box_stats(b, std::move(entries)));
    }
    return profile;
}

}  // namespace augury
