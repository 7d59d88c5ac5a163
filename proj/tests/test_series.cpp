#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "augury/series.hpp"
#include "augury/stats.hpp"
#include "augury/time.hpp"

using namespace augury;

namespace {

const Timestamp kStart{std::chrono::seconds{1489276800}};

RegularSeries make(std::vector<double> v) { return RegularSeries::from_values(kStart, kSecond * 2, v); }

RegularSeries::Value none() { return std::nullopt; }

}  // namespace

TEST(RegularSeries, IndexMapsToTime) {
    const auto s = make({1, 2, 3});
    EXPECT_EQ(s.time_at(2), kStart + kSecond * 4);
    EXPECT_EQ(s.end_time(), kStart + kSecond * 4);
    EXPECT_EQ(s.size(), 3u);
}

TEST(RegularSeries, RejectsBadConstruction) {
    EXPECT_THROW(RegularSeries(kStart, Duration::zero(), {1.0}), Error);
    EXPECT_THROW(RegularSeries(kStart, kSecond, {}), Error);
}

TEST(RegularSeries, MissingIsDistinctFromZero) {
    RegularSeries s(kStart, kSecond, {0.0, none()});
    EXPECT_TRUE(s.present(0));
    EXPECT_FALSE(s.present(1));
    EXPECT_EQ(s.count_present(), 1u);
}

TEST(MovingAverage, ConstantSeriesIsInvariant) {
    const auto ma = moving_average(make({5, 5, 5, 5}), 2, WeightScheme::uniform());
    EXPECT_FALSE(ma[0]);
    for (std::size_t t = 1; t < 4; ++t) {
        EXPECT_EQ(*ma[t], 5.0);
    }
}

TEST(MovingAverage, HandEvaluation) {
    const auto ma = moving_average(make({1, 2, 3}), 2, WeightScheme::uniform());
    EXPECT_FALSE(ma[0]);
    EXPECT_DOUBLE_EQ(*ma[1], 1.5);
    EXPECT_DOUBLE_EQ(*ma[2], 2.5);
}

TEST(MovingAverage, SpikeAfterZerosGivesValueOverN) {
    for (std::size_t n = 2; n <= 40; ++n) {
        std::vector<double> v(n - 1, 0.0);
        v.push_back(12.0);
        const auto ma = moving_average(make(v), n, WeightScheme::uniform());
        EXPECT_EQ(*ma[n - 1], 12.0 / static_cast<double>(n)) << "N=" << n;
    }
}

TEST(MovingAverage, WholeSeriesWindowIsArithmeticMean) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(3.0, 2.0);
    std::vector<double> v(57);
    double sum = 0.0;
    for (auto& x : v) {
        x = z(rng);
        sum += x;
    }
    const auto ma = moving_average(make(v), v.size(), WeightScheme::uniform());
    EXPECT_NEAR(*ma[v.size() - 1], sum / static_cast<double>(v.size()), 1e-12);
}

TEST(MovingAverage, SlidingUpdateMatchesDirectSum) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0.0, 10.0);
    std::vector<double> v(500);
    for (auto& x : v) {
        x = z(rng);
    }
    const auto s = make(v);
    for (const auto& w : {WeightScheme::uniform(), WeightScheme::exponential(0.8), WeightScheme::exponential_for_span(9)}) {
        for (std::size_t n : {2u, 7u, 31u}) {
            const auto ma = moving_average(s, n, w);
            for (std::size_t t = n - 1; t < v.size(); ++t) {
                double num = 0.0;
                double den = 0.0;
                for (std::size_t a = 0; a < n; ++a) {
                    num += w.weight(a) * v[t - a];
                    den += w.weight(a);
                }
                ASSERT_NEAR(*ma[t], num / den, 1e-9);
            }
        }
    }
}

TEST(MovingAverage, MissingInputPoisonsWindows) {
    RegularSeries s(kStart, kSecond, {1.0, 2.0, none(), 4.0, 5.0, 6.0});
    const auto ma = moving_average(s, 2, WeightScheme::uniform());
    EXPECT_TRUE(ma[1]);
    EXPECT_FALSE(ma[2]);
    EXPECT_FALSE(ma[3]);
    EXPECT_DOUBLE_EQ(*ma[4], 4.5);
}

TEST(MovingAverage, CenteredHasMissingAtBothEnds) {
    const auto odd = moving_average(make({1, 2, 3, 4, 5}), 3, WeightScheme::uniform(), Alignment::Centered);
    EXPECT_FALSE(odd[0]);
    EXPECT_DOUBLE_EQ(*odd[1], 2.0);
    EXPECT_DOUBLE_EQ(*odd[3], 4.0);
    EXPECT_FALSE(odd[4]);

    // 2 x 4 filter: weights 1/8, 1/4, 1/4, 1/4, 1/8.
    const auto even = moving_average(make({8, 0, 0, 0, 8, 0}), 4, WeightScheme::uniform(), Alignment::Centered);
    EXPECT_FALSE(even[1]);
    EXPECT_DOUBLE_EQ(*even[2], 2.0);
    EXPECT_DOUBLE_EQ(*even[3], 2.0);
    EXPECT_FALSE(even[4]);
}

TEST(MovingAverage, RejectsBadWindow) {
    EXPECT_THROW(moving_average(make({1, 2, 3}), 1, WeightScheme::uniform()), Error);
    EXPECT_THROW(moving_average(make({1, 2, 3}), 4, WeightScheme::uniform()), Error);
    try {
        moving_average(make({1, 2, 3}), 4, WeightScheme::uniform());
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
    }
}

TEST(Ewma, HandEvaluation) {
    const auto e = ewma(make({0, 0, 0, 10}), 4, 0.1);
    EXPECT_NEAR(*e[3], 10.0 / (1 + 0.1 + 0.01 + 0.001), 1e-12);
}

TEST(Ewma, ConstantSeries) {
    const auto e = ewma(make({4, 4, 4, 4, 4, 4}), 3, 0.5);
    for (std::size_t t = 2; t < 6; ++t) {
        EXPECT_DOUBLE_EQ(*e[t], 4.0);
    }
}

TEST(Ewma, DefaultDecayMatchesSpan) {
    EXPECT_DOUBLE_EQ(WeightScheme::exponential_for_span(9).decay, 0.8);
    const auto a = ewma(make({1, 2, 3, 4, 5}), 3);
    const auto b = ewma(make({1, 2, 3, 4, 5}), 3, 0.5);
    EXPECT_EQ(a, b);
}

TEST(Ewma, GapResilienceAgainstUniform) {
    for (std::size_t k = 1; k <= 30; ++k) {
        std::vector<double> v(k, 0.0);
        v.push_back(6.0);
        const auto s = make(v);
        const double uni = *moving_average(s, k + 1, WeightScheme::uniform())[k];
        EXPECT_GE(*ewma(s, k + 1)[k], uni);
        double previous_gap = 1e300;
        for (double d : {0.95, 0.8, 0.5, 0.2, 0.05}) {
            const double gap = std::abs(*ewma(s, k + 1, d)[k] - 6.0);
            EXPECT_LE(gap, previous_gap + 1e-12);
            previous_gap = gap;
        }
    }
}

TEST(Ewma, RejectsDecayOutsideOpenInterval) {
    EXPECT_THROW(ewma(make({1, 2, 3}), 2, 0.0), Error);
    EXPECT_THROW(ewma(make({1, 2, 3}), 2, 1.0), Error);
}

TEST(Difference, Examples) {
    const auto d = difference(make({1, 1, 1}));
    EXPECT_FALSE(d[0]);
    EXPECT_EQ(*d[1], 0.0);
    EXPECT_EQ(*d[2], 0.0);

    const auto r = difference(make({0, 0, 8, 8, 8, 0}));
    const std::vector<double> expected{0, 8, 0, 0, -8};
    for (std::size_t t = 1; t < 6; ++t) {
        EXPECT_EQ(*r[t], expected[t - 1]);
    }
    EXPECT_THROW(difference(make({1})), Error);
}

TEST(Difference, CumulativeSumReconstructs) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> u(-50, 50);
    std::vector<double> v(200);
    for (auto& x : v) {
        x = u(rng);
    }
    const auto d = difference(make(v));
    double acc = v[0];
    for (std::size_t t = 1; t < v.size(); ++t) {
        acc += *d[t];
        EXPECT_EQ(acc, v[t]);
    }
}

TEST(SeriesSigma, Examples) {
    EXPECT_EQ(series_sigma(make({3, 3, 3})), 0.0);
    EXPECT_DOUBLE_EQ(series_sigma(make({0, 2})), std::sqrt(2.0));
    RegularSeries one(kStart, kSecond, {1.0, none()});
    try {
        series_sigma(one);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
    }
}

TEST(SeriesSigma, ChebyshevFraction) {
    std::mt19937_64 rng(4);
    std::lognormal_distribution<double> ln(0.0, 2.5);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v(300);
        for (auto& x : v) {
            x = ln(rng);
        }
        const double m = stats::mean(v);
        const double s = series_sigma(make(v));
        std::size_t inside = 0;
        for (double x : v) {
            inside += std::abs(x - m) <= 5.0 * s ? 1 : 0;
        }
        EXPECT_GE(static_cast<double>(inside) / 300.0, 0.96);
    }
}

TEST(ContiguousValues, TrimsEdgesAndRejectsInteriorGaps) {
    RegularSeries s(kStart, kSecond, {none(), 1.0, 2.0, none()});
    std::size_t first = 0;
    EXPECT_EQ(contiguous_values(s, &first), (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(first, 1u);
    RegularSeries holed(kStart, kSecond, {1.0, none(), 2.0});
    EXPECT_THROW(contiguous_values(holed), Error);
}

TEST(Stats, QuantileType7) {
    const std::vector<double> x{1, 2, 3, 4, 100};
    EXPECT_DOUBLE_EQ(stats::quantile(x, 0.25), 2.0);
    EXPECT_DOUBLE_EQ(stats::median(x), 3.0);
    EXPECT_DOUBLE_EQ(stats::quantile(x, 0.75), 4.0);
    EXPECT_DOUBLE_EQ(stats::quantile({1, 2}, 0.5), 1.5);
}

TEST(Time, IsoRoundTripAndOffsets) {
    const auto t = parse_iso8601("2017-03-12T22:04:01Z");
    ASSERT_TRUE(t);
    EXPECT_EQ(format_iso8601(*t), "2017-03-12T22:04:01Z");
    EXPECT_EQ(parse_iso8601("2017-03-12T23:04:01+01:00"), t);
    EXPECT_EQ(parse_iso8601("2017-03-12 22:04:01"), t);
    EXPECT_EQ(format_iso8601(*t + std::chrono::microseconds{250000}), "2017-03-12T22:04:01.250000Z");
    EXPECT_FALSE(parse_iso8601("2017-13-12T00:00:00Z"));
    EXPECT_FALSE(parse_iso8601("yesterday"));
}

TEST(Time, ApacheFormat) {
    const auto t = parse_apache_time("12/Mar/2017:22:04:01 +0000");
    ASSERT_TRUE(t);
    EXPECT_EQ(format_iso8601(*t), "2017-03-12T22:04:01Z");
    EXPECT_EQ(parse_apache_time("12/Mar/2017:23:04:01 +0100"), t);
    EXPECT_EQ(format_apache_time(*t), "12/Mar/2017:22:04:01 +0000");
    EXPECT_FALSE(parse_apache_time("12/Foo/2017:22:04:01 +0000"));
}
