#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "augury/seasonal.hpp"
#include "augury/workload_sim.hpp"

using namespace augury;

namespace {

// 2017-03-13T00:00:00Z, a Monday.
const Timestamp kMonday{std::chrono::seconds{1489363200}};

RegularSeries hourly_lag(std::vector<double> v, Duration lag = kMinute * 10, Timestamp start = kMonday) {
    return RegularSeries::from_values(start, lag, v);
}

// Brute-force type 7 quantile.
double brute_quantile(std::vector<double> x, double q) {
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

}  // namespace

TEST(Decompose, ConstantSeries) {
    const auto parts = decompose(hourly_lag(std::vector<double>(24, 7.0)), {PeriodKind::Hourly, 6});
    for (std::size_t t = 0; t < 24; ++t) {
        EXPECT_NEAR(*parts.seasonal[t], 0.0, 1e-12);
        if (parts.trend[t]) {
            EXPECT_NEAR(*parts.trend[t], 7.0, 1e-12);
            EXPECT_NEAR(*parts.residual[t], 0.0, 1e-12);
        }
    }
}

TEST(Decompose, RecoversSquareWave) {
    std::vector<double> y(60);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = (t % 6) < 3 ? 2.0 : -2.0;
    }
    const auto parts = decompose(hourly_lag(y), {PeriodKind::Hourly, 6});
    for (std::size_t t = 0; t < y.size(); ++t) {
        EXPECT_NEAR(*parts.seasonal[t], y[t], 1e-12);
        if (parts.residual[t]) {
            EXPECT_LT(std::abs(*parts.residual[t]), 1e-9);
        }
    }
}

TEST(Decompose, RecoversRampTrend) {
    const double a = 0.75;
    std::vector<double> y(72);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = a * static_cast<double>(t) + ((t % 6) < 3 ? 2.0 : -2.0);
    }
    const auto parts = decompose(hourly_lag(y), {PeriodKind::Hourly, 6});
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (parts.trend[t]) {
            EXPECT_LE(std::abs(*parts.trend[t] - a * static_cast<double>(t)), a * 6 / 2.0);
            EXPECT_LT(std::abs(*parts.residual[t]), 1e-9);
        }
    }
}

TEST(Decompose, EdgesMissingForEvenAndOddPeriods) {
    for (auto lag : {kMinute * 10, kMinute * 12}) {  // p = 6 and p = 5
        const auto series = hourly_lag(std::vector<double>(40, 1.0), lag);
        const auto p = static_cast<std::size_t>(kHour / lag);
        const auto parts = decompose(series, Period::for_lag(PeriodKind::Hourly, lag));
        for (std::size_t t = 0; t < 40; ++t) {
            const bool edge = t < p / 2 || t >= 40 - p / 2;
            EXPECT_EQ(parts.trend[t].has_value(), !edge) << "t=" << t;
            EXPECT_EQ(parts.residual[t].has_value(), !edge) << "t=" << t;
            EXPECT_TRUE(parts.seasonal[t]);
        }
    }
}

TEST(Decompose, PhaseFollowsWallClock) {
    // Same hourly pattern started 20 minutes apart gives the same seasonal value per clock position.
    std::vector<double> base(36);
    for (std::size_t t = 0; t < base.size(); ++t) {
        base[t] = static_cast<double>((t % 6) * (t % 6));
    }
    std::vector<double> shifted(base.begin() + 2, base.end());
    const auto a = decompose(hourly_lag(base), {PeriodKind::Hourly, 6});
    const auto b = decompose(hourly_lag(shifted, kMinute * 10, kMonday + kMinute * 20), {PeriodKind::Hourly, 6});
    for (std::size_t t = 0; t < shifted.size(); ++t) {
        EXPECT_NEAR(*b.seasonal[t], *a.seasonal[t + 2], 1e-12);
    }
}

TEST(Decompose, ConstantShiftMovesOnlyTrend) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> y(48), y2(48);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = z(rng) + static_cast<double>(t % 6);
        y2[t] = y[t] + 1000.0;
    }
    const auto a = decompose(hourly_lag(y), {PeriodKind::Hourly, 6});
    const auto b = decompose(hourly_lag(y2), {PeriodKind::Hourly, 6});
    for (std::size_t t = 0; t < y.size(); ++t) {
        EXPECT_NEAR(*a.seasonal[t], *b.seasonal[t], 1e-9);
        if (a.trend[t]) {
            EXPECT_NEAR(*b.trend[t] - *a.trend[t], 1000.0, 1e-9);
            EXPECT_NEAR(*a.residual[t], *b.residual[t], 1e-9);
        }
    }
}

TEST(Decompose, Errors) {
    try {
        decompose(hourly_lag(std::vector<double>(11, 1.0)), {PeriodKind::Hourly, 6});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
    }
    try {
        decompose(hourly_lag(std::vector<double>(100, 1.0), kMinute * 7), {PeriodKind::Hourly, 6});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
    }
}

TEST(BoxStats, HandExample) {
    std::vector<Outlier> entries;
    const std::vector<double> values{1, 2, 3, 4, 100};
    for (std::size_t i = 0; i < values.size(); ++i) {
        entries.push_back({kMonday + kDay * static_cast<int>(i), values[i]});
    }
    const auto b = box_stats(0, entries);
    EXPECT_DOUBLE_EQ(b.q1, 2.0);
    EXPECT_DOUBLE_EQ(b.median, 3.0);
    EXPECT_DOUBLE_EQ(b.q3, 4.0);
    EXPECT_DOUBLE_EQ(b.whisker_low, 1.0);
    EXPECT_DOUBLE_EQ(b.whisker_high, 4.0);
    ASSERT_EQ(b.outliers.size(), 1u);
    EXPECT_EQ(b.outliers[0].value, 100.0);
    EXPECT_EQ(b.n_entries, 5u);
}

TEST(BoxStats, EqualEntries) {
    const auto b = box_stats(3, {{kMonday, 5.0}, {kMonday + kDay, 5.0}, {kMonday + kDay * 2, 5.0}});
    EXPECT_EQ(b.median, 5.0);
    EXPECT_EQ(b.q1, 5.0);
    EXPECT_EQ(b.q3, 5.0);
    EXPECT_EQ(b.whisker_low, 5.0);
    EXPECT_EQ(b.whisker_high, 5.0);
    EXPECT_TRUE(b.outliers.empty());
}

TEST(BoxStats, RandomBinsMatchBruteForce) {
    std::mt19937_64 rng(6);
    std::student_t_distribution<double> t(2.0);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
        std::vector<Outlier> entries;
        std::vector<double> values;
        for (std::size_t i = 0; i < n; ++i) {
            values.push_back(t(rng));
            entries.push_back({kMonday + kHour * static_cast<int>(n - i), values.back()});
        }
        const auto b = box_stats(0, entries);
        const double q1 = brute_quantile(values, 0.25);
        const double q3 = brute_quantile(values, 0.75);
        EXPECT_NEAR(b.q1, q1, 1e-12);
        EXPECT_NEAR(b.median, brute_quantile(values, 0.5), 1e-12);
        EXPECT_NEAR(b.q3, q3, 1e-12);
        EXPECT_LE(b.q1, b.median);
        EXPECT_LE(b.median, b.q3);
        const double lo = q1 - 1.5 * (q3 - q1);
        const double hi = q3 + 1.5 * (q3 - q1);
        double wl = 1e300, wh = -1e300;
        std::size_t outside = 0;
        for (double v : values) {
            if (v >= lo) wl = std::min(wl, v);
            if (v <= hi) wh = std::max(wh, v);
            outside += (v < lo || v > hi) ? 1 : 0;
        }
        EXPECT_EQ(b.whisker_low, wl);
        EXPECT_EQ(b.whisker_high, wh);
        EXPECT_EQ(b.outliers.size(), outside);
        EXPECT_TRUE(std::is_sorted(b.outliers.begin(), b.outliers.end(),
                                   [](const Outlier& x, const Outlier& y) { return x.timestamp < y.timestamp; }));
    }
}

TEST(SeasonalProfile, DailyBinsOverHourlySeries) {
    std::vector<double> y(24 * 7);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = static_cast<double>(t % 24);
    }
    const auto prof = seasonal_profile(hourly_lag(y, kHour), Period::for_lag(PeriodKind::Daily, kHour), false);
    ASSERT_EQ(prof.bins.size(), 24u);
    for (std::size_t b = 0; b < 24; ++b) {
        EXPECT_EQ(prof.bins[b].n_entries, 7u);
        EXPECT_EQ(prof.bins[b].median, static_cast<double>(b));
    }
}

TEST(SeasonalProfile, WideBinsSumSlices) {
    // Daily period over hourly data with 4 bins of 6 hours.
    std::vector<double> y(24 * 3, 1.0);
    const auto prof = seasonal_profile(hourly_lag(y, kHour), {PeriodKind::Daily, 4}, false);
    ASSERT_EQ(prof.bins.size(), 4u);
    for (const auto& b : prof.bins) {
        EXPECT_EQ(b.median, 6.0);
        EXPECT_EQ(b.n_entries, 3u);
    }
}

TEST(SeasonalProfile, DetrendRemovesLevel) {
    std::vector<double> y(24 * 4);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = 100.0 + (t % 24 == 5 ? 24.0 : 0.0);
    }
    const auto prof = seasonal_profile(hourly_lag(y, kHour), Period::for_lag(PeriodKind::Daily, kHour), true);
    EXPECT_NEAR(prof.bins[5].median, 23.0, 1e-9);
    EXPECT_NEAR(prof.bins[0].median, -1.0, 1e-9);
}

TEST(ZoomProfile, CountsPerMinuteAcrossDays) {
    std::vector<RequestRecord> records;
    for (int d = 0; d < 7; ++d) {
        for (int k = 0; k < 3; ++k) {
            RequestRecord r;
            r.timestamp = kMonday + kDay * d + kHour * 22 + kMinute * 4 + kSecond * (10 * k);
            r.app_id = "/app5";
            records.push_back(r);
        }
    }
    RequestRecord other;
    other.timestamp = kMonday + kHour * 22;
    other.app_id = "/other";
    records.push_back(other);

    const auto prof = zoom_profile(records, "/app5", 22, 1);
    ASSERT_EQ(prof.bins.size(), 60u);
    for (std::size_t b = 0; b < 60; ++b) {
        EXPECT_EQ(prof.bins[b].n_entries, 7u);
        EXPECT_EQ(prof.bins[b].median, b == 4 ? 3.0 : 0.0);
    }
    const auto quiet = zoom_profile(records, "/app5", 3, 5);
    ASSERT_EQ(quiet.bins.size(), 12u);
    for (const auto& b : quiet.bins) {
        EXPECT_EQ(b.median, 0.0);
    }
    try {
        zoom_profile(records, "/nobody", 22, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptySelection);
    }
}

TEST(Period, WeeklyOriginIsMonday) {
    std::vector<double> y(2 * 7 * 4);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = (t % 28) < 4 ? 10.0 : 0.0;  // Mondays, in 6 h slots
    }
    const auto parts = decompose(hourly_lag(y, kHour * 6), Period::for_lag(PeriodKind::Weekly, kHour * 6));
    EXPECT_GT(*parts.seasonal[0], 0.0);
    EXPECT_LT(*parts.seasonal[4], 0.0);
}
