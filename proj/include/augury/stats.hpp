#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "augury/error.hpp"

namespace augury::stats {

inline double mean(std::span<const double> xs) {
    detail::require(!xs.empty(), ErrorKind::EmptyInput, "mean of empty sample");
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    return sum / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator), two-pass.
inline double sample_std(std::span<const double> xs) {
    detail::require(xs.size() >= 2, ErrorKind::InsufficientData,
                    "standard deviation needs at least 2 values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Quantile of an already sorted sample by linear interpolation between order
/// statistics (h = (n - 1) q).
inline double quantile_sorted(std::span<const double> sorted, double q) {
    detail::require(!sorted.empty(), ErrorKind::EmptyInput, "quantile of empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, q);
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

inline double root_mean_square(std::span<const double> xs) {
    detail::require(!xs.empty(), ErrorKind::EmptyInput, "rms of empty sample");
    double ss = 0.0;
    for (double x : xs) {
        ss += x * x;
    }
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace augury::stats
