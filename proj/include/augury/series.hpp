#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "augury/error.hpp"
#include "augury/stats.hpp"
#include "augury/time.hpp"

namespace augury {

/**
 * Equally spaced observations. Index i lives at start_time() + i * lag();
 * a missing observation is std::nullopt and never confused with 0.
 */
class RegularSeries {
public:
    using Value = std::optional<double>;

    RegularSeries(Timestamp start, Duration lag, std::vector<Value> values)
        : start_(start), lag_(lag), values_(std::move(values)) {
        detail::require(lag_.count() > 0, ErrorKind::InvalidParameter, "series lag must be positive");
        detail::require(!values_.empty(), ErrorKind::EmptyInput, "series must hold at least one slot");
    }

    static RegularSeries from_values(Timestamp start, Duration lag, std::span<const double> values) {
        return RegularSeries(start, lag, std::vector<Value>(values.begin(), values.end()));
    }

    /// Same indexing as `like`, every slot missing.
    static RegularSeries missing_like(const RegularSeries& like) {
        return RegularSeries(like.start_, like.lag_, std::vector<Value>(like.size()));
    }

    Timestamp start_time() const noexcept { return start_; }
    Duration lag() const noexcept { return lag_; }
    std::size_t size() const noexcept { return values_.size(); }
    Timestamp time_at(std::size_t i) const noexcept {
        return start_ + lag_ * static_cast<std::int64_t>(i);
    }
    Timestamp end_time() const noexcept { return time_at(size() - 1); }

    const Value& operator[](std::size_t i) const { return values_[i]; }
    Value& operator[](std::size_t i) { return values_[i]; }
    std::span<const Value> values() const noexcept { return values_; }

    bool present(std::size_t i) const { return values_[i].has_value(); }

    std::size_t count_present() const noexcept {
        std::size_t n = 0;
        for (const auto& v : values_) {
            n += v.has_value() ? 1 : 0;
        }
        return n;
    }

    std::vector<double> present_values() const {
        std::vector<double> out;
        out.reserve(values_.size());
        for (const auto& v : values_) {
            if (v) {
                out.push_back(*v);
            }
        }
        return out;
    }

    bool same_indexing(const RegularSeries& other) const noexcept {
        return start_ == other.start_ && lag_ == other.lag_ && size() == other.size();
    }

    friend bool operator==(const RegularSeries&, const RegularSeries&) = default;

private:
    Timestamp start_;
    Duration lag_;
    std::vector<Value> values_;
};

/// Observation weights for a moving average window.
struct WeightScheme {
    enum class Kind { Uniform, Exponential };

    Kind kind = Kind::Uniform;
    double decay = 1.0;

    static WeightScheme uniform() { return {Kind::Uniform, 1.0}; }
    static WeightScheme exponential(double decay) { return {Kind::Exponential, decay}; }
    /// Decay 1 - 2/(N+1): same effective span as a uniform N-window.
    static WeightScheme exponential_for_span(std::size_t n) {
        return exponential(1.0 - 2.0 / (static_cast<double>(n) + 1.0));
    }

    /// Weight of the observation `age` lags before the most recent one.
    double weight(std::size_t age) const {
        return kind == Kind::Uniform ? 1.0 : std::pow(decay, static_cast<double>(age));
    }

    friend bool operator==(const WeightScheme&, const WeightScheme&) = default;
};

enum class Alignment { Trailing, Centered };

namespace detail {

inline void check_window(const RegularSeries& series, std::size_t n, const WeightScheme& w) {
    require(n >= 2, ErrorKind::InvalidParameter, "moving average window must be >= 2");
    require(n <= series.size(), ErrorKind::InvalidParameter,
            "moving average window " + std::to_string(n) + " exceeds series length " +
                std::to_string(series.size()));
    if (w.kind == WeightScheme::Kind::Exponential) {
        require(w.decay > 0.0 && w.decay <= 1.0, ErrorKind::InvalidParameter,
                "exponential decay must lie in (0, 1]");
    }
}

// Trailing window sums are updated in O(1) per step and recomputed from
// scratch every n steps so rounding drift stays bounded.
inline RegularSeries trailing_average(const RegularSeries& series, std::size_t n, const WeightScheme& w) {
    RegularSeries out = RegularSeries::missing_like(series);
    const bool uniform = w.kind == WeightScheme::Kind::Uniform;
    const double decay = uniform ? 1.0 : w.decay;
    const double tail = uniform ? 1.0 : std::pow(decay, static_cast<double>(n));
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        weight_sum += w.weight(k);
    }

    std::int64_t last_missing = -1;
    bool have_sum = false;
    double sum = 0.0;
    const auto window = static_cast<std::int64_t>(n);
    for (std::size_t t = 0; t < series.size(); ++t) {
        const auto ti = static_cast<std::int64_t>(t);
        if (!series[t]) {
            last_missing = ti;
            have_sum = false;
            continue;
        }
        if (ti - last_missing < window) {
            continue;
        }
        if (!have_sum || t % n == 0) {
            sum = 0.0;
            for (std::size_t age = n; age-- > 0;) {
                sum += w.weight(age) * *series[t - age];
            }
            have_sum = true;
        } else if (uniform) {
            sum += *series[t] - *series[t - n];
        } else {
            sum = *series[t] + decay * sum - tail * *series[t - n];
        }
        out[t] = sum / weight_sum;
    }
    return out;
}

// Symmetric window; an even n uses the 2 x n filter (n + 1 taps, halved ends).
inline RegularSeries centered_average(const RegularSeries& series, std::size_t n, const WeightScheme& w) {
    RegularSeries out = RegularSeries::missing_like(series);
    const std::size_t half = n / 2;
    const bool even = n % 2 == 0;
    std::vector<double> taps(2 * half + 1);
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < taps.size(); ++k) {
        const std::size_t dist = k > half ? k - half : half - k;
        double wk = w.weight(dist);
        if (even && dist == half) {
            wk *= 0.5;
        }
        taps[k] = wk;
        weight_sum += wk;
    }
    if (series.size() < taps.size()) {
        return out;
    }
    for (std::size_t t = half; t + half < series.size(); ++t) {
        double sum = 0.0;
        bool complete = true;
        for (std::size_t k = 0; k < taps.size(); ++k) {
            const auto& v = series[t - half + k];
            if (!v) {
                complete = false;
                break;
            }
            sum += taps[k] * *v;
        }
        if (complete) {
            out[t] = sum / weight_sum;
        }
    }
    return out;
}

}  // namespace detail

/**
 * Weighted moving average over n lags. Trailing output at t uses t, t-1, ...,
 * t-(n-1) and is missing for t < n-1; centered output is missing at both ends.
 * Any window touching a missing input yields missing.
 */
inline RegularSeries moving_average(const RegularSeries& series, std::size_t n, const WeightScheme& weights,
                                    Alignment alignment = Alignment::Trailing) {
    detail::check_window(series, n, weights);
    return alignment == Alignment::Trailing ? detail::trailing_average(series, n, weights)
                                            : detail::centered_average(series, n, weights);
}

/// Trailing moving average with geometric weights decay^age.
inline RegularSeries ewma(const RegularSeries& series, std::size_t n, double decay) {
    detail::require(decay > 0.0 && decay < 1.0, ErrorKind::InvalidParameter, "ewma decay must lie in (0, 1)");
    return moving_average(series, n, WeightScheme::exponential(decay), Alignment::Trailing);
}

inline RegularSeries ewma(const RegularSeries& series, std::size_t n) {
    detail::require(n >= 2, ErrorKind::InvalidParameter, "moving average window must be >= 2");
    return ewma(series, n, WeightScheme::exponential_for_span(n).decay);
}

/// y'_t = y_t - y_{t-1}; index 0 is missing.
inline RegularSeries difference(const RegularSeries& series) {
    detail::require(series.size() >= 2, ErrorKind::InvalidParameter, "difference needs at least 2 values");
    RegularSeries out = RegularSeries::missing_like(series);
    for (std::size_t t = 1; t < series.size(); ++t) {
        if (series[t] && series[t - 1]) {
            out[t] = *series[t] - *series[t - 1];
        }
    }
    return out;
}

/// Sample standard deviation over the non-missing values.
inline double series_sigma(const RegularSeries& series) {
    const auto xs = series.present_values();
    detail::require(xs.size() >= 2, ErrorKind::InsufficientData,
                    "sigma needs at least 2 non-missing values");
    return stats::sample_std(xs);
}

/// Values with leading and trailing missing slots removed; interior gaps are an error.
inline std::vector<double> contiguous_values(const RegularSeries& series, std::size_t* first_index = nullptr) {
    std::size_t lo = 0;
    while (lo < series.size() && !series[lo]) {
        ++lo;
    }
    std::size_t hi = series.size();
    while (hi > lo && !series[hi - 1]) {
        --hi;
    }
    std::vector<double> out;
    out.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
        detail::require(series[i].has_value(), ErrorKind::InvalidParameter,
                        "series has an interior gap at index " + std::to_string(i));
        out.push_back(*series[i]);
    }
    if (first_index) {
        *first_index = lo;
    }
    return out;
}

}  // namespace augury
