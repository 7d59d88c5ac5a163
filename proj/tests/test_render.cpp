#include <cmath>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "augury/augury.hpp"

using namespace augury;

namespace {

const Timestamp kMonday{std::chrono::seconds{1489363200}};

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

// Minimal well-formedness check: every start tag is closed in order.
bool tags_balanced(const std::string& svg) {
    std::vector<std::string> stack;
    std::size_t pos = 0;
    while ((pos = svg.find('<', pos)) != std::string::npos) {
        const auto end = svg.find('>', pos);
        if (end == std::string::npos) {
            return false;
        }
        const std::string tag = svg.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (tag.empty() || tag[0] == '?' || tag[0] == '!') {
            continue;
        }
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) {
                return false;
            }
            stack.pop_back();
        } else if (tag.back() != '/') {
            stack.push_back(tag.substr(0, tag.find_first_of(" \n")));
        }
    }
    return stack.empty();
}

SeasonalProfile hourly_profile_with_outliers() {
    std::vector<double> y(24 * 14, 10.0);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] += static_cast<double>((t * 7) % 5);
    }
    y[24 * 3 + 5] = 500.0;
    y[24 * 9 + 5] = 400.0;
    y[24 * 2 + 17] = -300.0;
    const auto s = RegularSeries::from_values(kMonday, kHour, y);
    return seasonal_profile(s, Period::for_lag(PeriodKind::Daily, kHour), false);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        rows.push_back(csv::split_line(line));
    }
    return rows;
}

std::vector<double> attr_values(const std::string& svg, const std::string& pattern) {
    std::vector<double> out;
    const std::regex re(pattern);
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
        out.push_back(std::stod((*it)[1].str()));
    }
    return out;
}

}  // namespace

TEST(RenderSvg, BoxplotHasOneGlyphPerBinAndStarsPerOutlier) {
    const auto profile = hourly_profile_with_outliers();
    std::size_t outliers = 0;
    for (const auto& b : profile.bins) {
        outliers += b.outliers.size();
    }
    EXPECT_GE(outliers, 3u);
    const auto svg = render_svg({SnapshotKind::SeasonalBoxplot, "Daily profile", profile});
    EXPECT_EQ(count_of(svg, "<g class=\"box\""), 24u);
    EXPECT_EQ(count_of(svg, "class=\"outlier\""), outliers);
    EXPECT_EQ(count_of(svg, "class=\"median\""), 24u);
    EXPECT_TRUE(tags_balanced(svg));
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
}

TEST(RenderSvg, BoxQuartilesAreOrderedOnScreen) {
    const auto profile = hourly_profile_with_outliers();
    const auto svg = render_svg({SnapshotKind::SeasonalBoxplot, "t", profile});
    const auto tops = attr_values(svg, "class=\"quartiles\" x=\"[-0-9.]+\" y=\"([-0-9.]+)\"");
    const auto heights = attr_values(svg, "class=\"quartiles\"[^>]*height=\"([-0-9.]+)\"");
    const auto medians = attr_values(svg, "<line class=\"median\" x1=\"[-0-9.]+\" y1=\"([-0-9.]+)\"");
    ASSERT_EQ(tops.size(), 24u);
    ASSERT_EQ(heights.size(), 24u);
    ASSERT_EQ(medians.size(), 24u);
    for (std::size_t b = 0; b < 24; ++b) {
        // Screen y grows downwards: q3 at the top, q1 at the bottom.
        EXPECT_GE(heights[b], 0.0);
        EXPECT_LE(tops[b], medians[b] + 0.01);
        EXPECT_LE(medians[b], tops[b] + heights[b] + 0.01);
    }
}

TEST(RenderSvg, SinglePointTrend) {
    const auto s = RegularSeries::from_values(kMonday, kHour, std::vector<double>{3.0});
    const auto svg = render_svg({SnapshotKind::Trend, "one", std::vector<TrendLine>{{"/a", s}}});
    EXPECT_TRUE(tags_balanced(svg));
    EXPECT_EQ(svg.find("nan"), std::string::npos);
    EXPECT_EQ(svg.find("inf"), std::string::npos);
}

TEST(RenderSvg, PanelsInputAboveResidual) {
    std::vector<double> y(48);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = static_cast<double>(t % 6) + 0.1 * static_cast<double>(t);
    }
    const auto s = RegularSeries::from_values(kMonday, kMinute * 10, y);
    const auto parts = decompose(s, Period::for_lag(PeriodKind::Hourly, kMinute * 10));
    const auto svg = render_svg({SnapshotKind::DecompositionPanels, "panels", DecompositionPanels{s, parts}});
    const auto input = svg.find("id=\"panel-input\"");
    const auto residual = svg.find("id=\"panel-residual\"");
    ASSERT_NE(input, std::string::npos);
    ASSERT_NE(residual, std::string::npos);
    EXPECT_LT(input, residual);
    EXPECT_TRUE(tags_balanced(svg));
}

TEST(RenderSvg, EveryKindIsWellFormedAndDeterministic) {
    sim::RequestSchedule sched;
    sched.apps = {{"/a&b", 2}, {"/c<d>", 1}};
    sched.total_span = kHour * 3;
    sched.jitter_sigma = kSecond * 5;
    const auto records = sim::generate_request_records(sched);
    const auto counts = count_executions(records, "/a&b", 10);
    const auto y = RegularSeries::from_values(kMonday, kHour, std::vector<double>{1, 3, 2, 5, 4, 6, 5, 8});
    const std::vector<Snapshot> snaps{
        {SnapshotKind::Trend, "a \"quoted\" & <title>", std::vector<TrendLine>{{"/a&b", counts}}},
        {SnapshotKind::ZoomBoxplot, "zoom", zoom_profile(records, "/a&b", 0, 5)},
        {SnapshotKind::RuntimeScatter, "rt", runtime_distribution(records, "/c<d>")},
        {SnapshotKind::CumulativeMemory, "mem", accumulated_memory(records, "/a&b", {Duration::zero(), kDay}, 2.0)},
        {SnapshotKind::ForecastOverlay, "fc", ForecastOverlay{y, naive_forecast(y, 5), naive_forecast(y, 4)}},
    };
    for (const auto& snap : snaps) {
        const auto a = render_svg(snap, 640, 360);
        const auto b = render_svg(snap, 640, 360);
        EXPECT_EQ(a, b) << to_string(snap.kind);
        EXPECT_TRUE(tags_balanced(a)) << to_string(snap.kind);
        EXPECT_EQ(a.find("<title>\n"), std::string::npos);
        EXPECT_NE(a.find("width=\"640\""), std::string::npos);
    }
}

TEST(RenderSvg, Errors) {
    const Snapshot empty{SnapshotKind::Trend, "x", std::vector<TrendLine>{}};
    try {
        render_svg(empty);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
    }
    const Snapshot mismatch{SnapshotKind::RuntimeScatter, "x", MemoryProjection{}};
    try {
        render_svg(mismatch);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
    }
    const auto profile = hourly_profile_with_outliers();
    try {
        render_svg({SnapshotKind::SeasonalBoxplot, "x", profile}, 99, 480);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
    }
    EXPECT_THROW(render_csv(empty), Error);
}

TEST(RenderCsv, ProfileRoundTrip) {
    const auto profile = hourly_profile_with_outliers();
    const auto rows = parse_csv(render_csv({SnapshotKind::SeasonalBoxplot, "x", profile}));
    ASSERT_EQ(rows.size(), 25u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"bin", "median", "q1", "q3", "whisker_low", "whisker_high",
                                                 "n_outliers", "n_entries"}));
    for (std::size_t b = 0; b < 24; ++b) {
        const auto& r = rows[b + 1];
        const auto& bin = profile.bins[b];
        EXPECT_EQ(std::stoul(r[0]), b);
        EXPECT_NEAR(*csv::parse_number(r[1]), bin.median, 1e-12);
        EXPECT_NEAR(*csv::parse_number(r[2]), bin.q1, 1e-12);
        EXPECT_NEAR(*csv::parse_number(r[3]), bin.q3, 1e-12);
        EXPECT_NEAR(*csv::parse_number(r[4]), bin.whisker_low, 1e-12);
        EXPECT_NEAR(*csv::parse_number(r[5]), bin.whisker_high, 1e-12);
        EXPECT_EQ(std::stoul(r[6]), bin.outliers.size());
        EXPECT_EQ(std::stoul(r[7]), bin.n_entries);
    }
}

TEST(RenderCsv, DecompositionRoundTrip) {
    std::vector<double> y(36);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = std::sin(static_cast<double>(t)) * 3.0 + 0.01 * static_cast<double>(t * t);
    }
    const auto s = RegularSeries::from_values(kMonday, kMinute * 10, y);
    const auto parts = decompose(s, Period::for_lag(PeriodKind::Hourly, kMinute * 10));
    const auto rows = parse_csv(render_csv({SnapshotKind::DecompositionPanels, "x", DecompositionPanels{s, parts}}));
    ASSERT_EQ(rows.size(), 37u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"timestamp", "input", "seasonal", "trend", "residual"}));
    for (std::size_t t = 0; t < y.size(); ++t) {
        const auto& r = rows[t + 1];
        EXPECT_EQ(parse_iso8601(r[0]), s.time_at(t));
        EXPECT_NEAR(*csv::parse_number(r[1]), y[t], 1e-12);
        EXPECT_NEAR(*csv::parse_number(r[2]), *parts.seasonal[t], 1e-12);
        if (parts.trend[t]) {
            EXPECT_NEAR(*csv::parse_number(r[3]), *parts.trend[t], 1e-12);
            EXPECT_NEAR(*csv::parse_number(r[4]), *parts.residual[t], 1e-12);
        } else {
            EXPECT_TRUE(r[3].empty());
            EXPECT_TRUE(r[4].empty());
        }
    }
}

TEST(RenderCsv, ForecastRowsAtActualTimes) {
    const auto y = RegularSeries::from_values(kMonday, kHour, std::vector<double>{1, 2, 3, 4});
    const auto rows = parse_csv(
        render_csv({SnapshotKind::ForecastOverlay, "x", ForecastOverlay{y, naive_forecast(y, 3), naive_forecast(y, 2)}}));
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"timestamp", "actual", "forecast_arima", "forecast_naive"}));
    EXPECT_EQ(rows[3], (std::vector<std::string>{"2017-03-13T02:00:00Z", "3", "", "2"}));
    EXPECT_EQ(rows[4], (std::vector<std::string>{"2017-03-13T03:00:00Z", "4", "3", "3"}));
}

TEST(RenderCsv, TrendIsSlotMajor) {
    const auto a = RegularSeries::from_values(kMonday, kHour, std::vector<double>{1, 2});
    const auto b = RegularSeries::from_values(kMonday + kHour, kHour, std::vector<double>{5});
    const auto text = render_csv({SnapshotKind::Trend, "x", std::vector<TrendLine>{{"/a", a}, {"/b", b}}});
    EXPECT_EQ(text,
              "app_id,slot_start,count\n/a,2017-03-13T00:00:00Z,1\n/a,2017-03-13T01:00:00Z,2\n"
              "/b,2017-03-13T01:00:00Z,5\n");
}

TEST(RenderCsv, PatternsTable) {
    const auto s = RegularSeries::from_values(kMonday, kSecond * 2, std::vector<double>{20, 20, 50, 50, 20});
    const std::vector<SignalPattern> pats{{2, 4, s.time_at(2), s.time_at(4)}};
    const std::vector<ModelParams> params{{30, 30, kSecond * 4}};
    std::ostringstream os;
    write_patterns_csv(os, pats, params);
    EXPECT_EQ(os.str(), "start_time,end_time,beta,max_memory,run_time_s\n"
                        "2017-03-13T00:00:04Z,2017-03-13T00:00:08Z,30,30,4\n");
    EXPECT_THROW(write_patterns_csv(os, pats, {}), Error);
}
