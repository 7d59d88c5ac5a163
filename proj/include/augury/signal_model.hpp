#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "augury/error.hpp"
#include "augury/series.hpp"
#include "augury/stats.hpp"

namespace augury {

/// Which dispersion scales the significance band around the moving average.
enum class SigmaMode {
    MovingAverage,  ///< sample std of the trailing MA series itself (default)
    Residual,       ///< sample std of y' - MA
};

/// Weighting used for each candidate window length.
struct WindowWeighting {
    enum class Kind { Uniform, Exponential };

    Kind kind = Kind::Exponential;
    std::optional<double> decay;  ///< unset: 1 - 2/(N+1), matched to the window

    static WindowWeighting uniform() { return {Kind::Uniform, std::nullopt}; }
    static WindowWeighting exponential() { return {Kind::Exponential, std::nullopt}; }

    WeightScheme for_window(std::size_t n) const {
        if (kind == Kind::Uniform) {
            return WeightScheme::uniform();
        }
        return decay ? WeightScheme::exponential(*decay) : WeightScheme::exponential_for_span(n);
    }
};

struct DetectionConfig {
    WindowWeighting weighting = WindowWeighting::exponential();
    SigmaMode sigma_mode = SigmaMode::MovingAverage;
    double k_sigma = 5.0;
    std::size_t isolation_lags = 3;
    std::size_t max_window = 256;
};

struct Deviation {
    enum class Kind { Maximum, Minimum };

    std::size_t index = 0;
    Kind kind = Kind::Maximum;
    double magnitude = 0.0;

    friend bool operator==(const Deviation&, const Deviation&) = default;
};

struct SignalPattern {
    std::size_t start_index = 0;  ///< backwards-isolated maximum (the rise)
    std::size_t end_index = 0;    ///< forwards-isolated minimum (the fall)
    Timestamp start_time{};
    Timestamp end_time{};

    friend bool operator==(const SignalPattern&, const SignalPattern&) = default;
};

/// Three-parameter memory model of one application execution.
struct ModelParams {
    double beta = 0.0;        ///< first significant rise, memory-percent units
    double max_memory = 0.0;  ///< peak above baseline, memory-percent units
    Duration run_time{};

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct CandidateScore {
    std::size_t window = 0;
    double sigma = 0.0;
    std::size_t n_deviations = 0;
    double discriminant = 0.0;
};

struct WindowChoice {
    std::size_t window = 0;
    std::vector<CandidateScore> candidates;
};

struct SummaryStat {
    double mean = 0.0;
    double std = 0.0;
    double median = 0.0;
};

struct ParamSummary {
    std::size_t count = 0;
    SummaryStat beta;
    SummaryStat max_memory;
    SummaryStat run_time_s;
};

namespace detail {

// Band half-width scale for a trailing MA; nullopt when fewer than 2 points define it.
inline std::optional<double> band_sigma(const RegularSeries& diff, const RegularSeries& ma, SigmaMode mode) {
    std::vector<double> xs;
    xs.reserve(ma.size());
    for (std::size_t t = 0; t < ma.size(); ++t) {
        if (!ma[t]) {
            continue;
        }
        if (mode == SigmaMode::MovingAverage) {
            xs.push_back(*ma[t]);
        } else if (diff[t]) {
            xs.push_back(*diff[t] - *ma[t]);
        }
    }
    if (xs.size() < 2) {
        return std::nullopt;
    }
    return stats::sample_std(xs);
}

template <class F>
void scan_band(const RegularSeries& diff, const RegularSeries& ma, double half_width, F&& on_hit) {
    for (std::size_t t = 0; t < diff.size(); ++t) {
        if (!diff[t] || !ma[t]) {
            continue;
        }
        if (*diff[t] > *ma[t] + half_width) {
            on_hit(Deviation{t, Deviation::Kind::Maximum, *diff[t]});
        } else if (*diff[t] < *ma[t] - half_width) {
            on_hit(Deviation{t, Deviation::Kind::Minimum, *diff[t]});
        }
    }
}

}  // namespace detail

/**
 * Picks the window N in 2..max_window minimizing d_N, the sum of the band
 * deviation count and sigma, each normalized by its maximum over candidates.
 * A zero maximum contributes 0. Ties go to the smallest N. Windows whose MA
 * has fewer than two defined points are not scored.
 */
inline WindowChoice optimize_window(const RegularSeries& diff, std::size_t max_window,
                                    const DetectionConfig& config = {}) {
    detail::require(max_window >= 2, ErrorKind::InvalidParameter, "candidate window range is empty");
    detail::require(diff.count_present() >= 3, ErrorKind::InsufficientData,
                    "window optimization needs at least 3 values");
    max_window = std::min(max_window, diff.size());

    WindowChoice choice;
    for (std::size_t n = 2; n <= max_window; ++n) {
        const auto ma = moving_average(diff, n, config.weighting.for_window(n), Alignment::Trailing);
        const auto sigma = detail::band_sigma(diff, ma, config.sigma_mode);
        if (!sigma) {
            continue;
        }
        std::size_t hits = 0;
        detail::scan_band(diff, ma, config.k_sigma * *sigma, [&](const Deviation&) { ++hits; });
        choice.candidates.push_back({n, *sigma, hits, 0.0});
    }
    detail::require(!choice.candidates.empty(), ErrorKind::InsufficientData, "no candidate window could be scored");

    double max_sigma = 0.0;
    std::size_t max_hits = 0;
    for (const auto& c : choice.candidates) {
        max_sigma = std::max(max_sigma, c.sigma);
        max_hits = std::max(max_hits, c.n_deviations);
    }
    double best = 0.0;
    for (auto& c : choice.candidates) {
        const double hits_term = max_hits == 0 ? 0.0 : static_cast<double>(c.n_deviations) / static_cast<double>(max_hits);
        const double sigma_term = max_sigma == 0.0 ? 0.0 : c.sigma / max_sigma;
        c.discriminant = hits_term + sigma_term;
        if (choice.window == 0 || c.discriminant < best) {
            best = c.discriminant;
            choice.window = c.window;
        }
    }
    return choice;
}

/// Points of `diff` outside MA_t +/- k sigma for the trailing MA of window n.
inline std::vector<Deviation> significant_deviations(const RegularSeries& diff, std::size_t n,
                                                     const DetectionConfig& config = {}) {
    const auto ma = moving_average(diff, n, config.weighting.for_window(n), Alignment::Trailing);
    std::vector<Deviation> out;
    const auto sigma = detail::band_sigma(diff, ma, config.sigma_mode);
    if (!sigma) {
        return out;
    }
    detail::scan_band(diff, ma, config.k_sigma * *sigma, [&](const Deviation& d) { out.push_back(d); });
    return out;
}

/**
 * Splits the window at forwards-isolated minima and pairs the first
 * backwards-isolated maximum of each interval with the minimum closing it.
 */
inline std::vector<SignalPattern> find_patterns(const RegularSeries& diff, std::span<const Deviation> deviations,
                                                std::size_t isolation_lags = 3) {
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
    for (const auto& d : deviations) {
        (d.kind == Deviation::Kind::Maximum ? maxima : minima).push_back(d.index);
    }
    std::sort(maxima.begin(), maxima.end());
    std::sort(minima.begin(), minima.end());

    std::vector<std::size_t> rises;
    for (std::size_t k = 0; k < maxima.size(); ++k) {
        if (k == 0 || maxima[k] - maxima[k - 1] > isolation_lags) {
            rises.push_back(maxima[k]);
        }
    }
    std::vector<std::size_t> falls;
    for (std::size_t k = 0; k < minima.size(); ++k) {
        if (k + 1 == minima.size() || minima[k + 1] - minima[k] > isolation_lags) {
            falls.push_back(minima[k]);
        }
    }

    std::vector<SignalPattern> out;
    auto rise = rises.begin();
    std::optional<std::size_t> interval_begin;
    for (std::size_t fall : falls) {
        while (rise != rises.end() && interval_begin && *rise <= *interval_begin) {
            ++rise;
        }
        if (rise != rises.end() && *rise < fall) {
            out.push_back({*rise, fall, diff.time_at(*rise), diff.time_at(fall)});
        }
        interval_begin = fall;
    }
    return out;
}

/// Memory value just before the rise.
inline double pattern_baseline(const RegularSeries& series, const SignalPattern& pattern) {
    detail::require(pattern.start_index >= 1 && pattern.start_index < series.size() && series[pattern.start_index - 1],
                    ErrorKind::InvalidParameter, "pattern has no baseline sample before its start");
    return *series[pattern.start_index - 1];
}

inline ModelParams extract_parameters(const SignalPattern& pattern, const RegularSeries& series,
                                      const RegularSeries& diff, double baseline) {
    detail::require(pattern.start_index < pattern.end_index && pattern.end_index < series.size() &&
                        pattern.end_index < diff.size(),
                    ErrorKind::InvalidParameter, "pattern indices out of bounds");
    detail::require(diff[pattern.start_index].has_value(), ErrorKind::InvalidParameter,
                    "difference missing at pattern start");
    std::optional<double> peak;
    for (std::size_t t = pattern.start_index; t <= pattern.end_index; ++t) {
        if (series[t]) {
            peak = peak ? std::max(*peak, *series[t]) : *series[t];
        }
    }
    detail::require(peak.has_value(), ErrorKind::InvalidParameter, "pattern covers no samples");
    return {*diff[pattern.start_index], *peak - baseline,
            series.lag() * static_cast<std::int64_t>(pattern.end_index - pattern.start_index)};
}

inline ParamSummary aggregate_params(std::span<const ModelParams> params) {
    detail::require(!params.empty(), ErrorKind::EmptyInput, "no model parameters to aggregate");
    std::vector<double> beta, peak, run;
    for (const auto& p : params) {
        beta.push_back(p.beta);
        peak.push_back(p.max_memory);
        run.push_back(to_seconds(p.run_time));
    }
    auto summarize = [](const std::vector<double>& xs) {
        return SummaryStat{stats::mean(xs), xs.size() > 1 ? stats::sample_std(xs) : 0.0, stats::median(xs)};
    };
    return {params.size(), summarize(beta), summarize(peak), summarize(run)};
}

/// 5 x the sample std of the CPU differences.
inline double default_trigger_threshold(const RegularSeries& cpu) {
    return 5.0 * series_sigma(difference(cpu));
}

/**
 * Naive one-lag prediction, except that a CPU jump above the threshold hands
 * over to the signal model: baseline + beta at the trigger, then baseline +
 * max_memory for run_time / lag further steps. A new trigger restarts the
 * takeover from its own pre-trigger baseline.
 */
inline RegularSeries predict_with_trigger(const RegularSeries& series, const RegularSeries& cpu,
                                          const ModelParams& params, double cpu_jump_threshold) {
    detail::require(series.same_indexing(cpu), ErrorKind::InvalidParameter,
                    "memory and CPU series must share indexing");
    detail::require(cpu_jump_threshold > 0.0, ErrorKind::InvalidParameter, "trigger threshold must be positive");
    const auto cpu_diff = difference(cpu);
    const auto steps = static_cast<std::size_t>(params.run_time / series.lag());

    RegularSeries out = RegularSeries::missing_like(series);
    std::optional<std::size_t> takeover;
    double baseline = 0.0;
    for (std::size_t t = 1; t < series.size(); ++t) {
        if (cpu_diff[t] && *cpu_diff[t] > cpu_jump_threshold && series[t - 1]) {
            takeover = t;
            baseline = *series[t - 1];
        }
        if (takeover && t - *takeover <= steps) {
            out[t] = baseline + (t == *takeover ? params.beta : params.max_memory);
        } else {
            takeover.reset();
            out[t] = series[t - 1];
        }
    }
    return out;
}

/// Everything the memory-model pipeline produces for one series.
struct MemoryAnalysis {
    RegularSeries diff;
    WindowChoice window;
    std::vector<Deviation> deviations;
    std::vector<SignalPattern> patterns;
    std::vector<ModelParams> params;
};

/// difference -> optimize window -> significant deviations -> patterns -> parameters.
inline MemoryAnalysis analyze_memory(const RegularSeries& series, const DetectionConfig& config = {}) {
    MemoryAnalysis a{difference(series), {}, {}, {}, {}};
    a.window = optimize_window(a.diff, std::min(config.max_window, series.size()), config);
    a.deviations = significant_deviations(a.diff, a.window.window, config);
    a.patterns = find_patterns(a.diff, a.deviations, config.isolation_lags);
    for (const auto& p : a.patterns) {
        if (p.start_index == 0 || !series[p.start_index - 1]) {
            continue;
        }
        a.params.push_back(extract_parameters(p, series, a.diff, pattern_baseline(series, p)));
    }
    return a;
}

}  // namespace augury
