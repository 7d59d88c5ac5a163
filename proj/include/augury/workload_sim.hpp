#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "augury/error.hpp"
#include "augury/ingestion.hpp"
#include "augury/signal_model.hpp"
#include "augury/time.hpp"

namespace augury::sim {

/// 2017-03-12T00:00:00Z, a Sunday.
inline constexpr Timestamp kDefaultStart{std::chrono::seconds{1489276800}};

/// Rectangular memory pulses on a fixed schedule. Baseline and height
/// defaults are arbitrary.
struct PulseSpec {
    double baseline_percent = 20.0;
    double height_percent = 30.0;
    Duration duration = std::chrono::seconds{60};
    Duration period = std::chrono::minutes{2};
    double noise_sigma = 0.5;
    Duration sample_lag = std::chrono::seconds{2};
    Duration total_span = std::chrono::hours{24 * 4};
    std::uint64_t rng_seed = 1;
    Timestamp start_time = kDefaultStart;
    double cpu_baseline_percent = 5.0;
    double cpu_jump_percent = 40.0;
};

struct PulseTruth {
    Timestamp start{};
    ModelParams params;
};

struct SimulatedMetrics {
    std::vector<MetricsSample> samples;
    std::vector<PulseTruth> truth;
};

/// One burst of `weight` requests per period for every app.
struct RequestSchedule {
    struct App {
        std::string app_id;
        std::size_t weight = 1;
    };

    Duration period = std::chrono::minutes{1};
    Duration jitter_sigma{0};
    std::vector<App> apps = {{"/app1", 1}};
    Duration total_span = std::chrono::hours{1};
    std::uint64_t rng_seed = 1;
    Timestamp start_time = kDefaultStart;
    Duration offset{0};  ///< burst position within each period
};

inline void validate(const PulseSpec& s) {
    using detail::require;
    const auto e = ErrorKind::InvalidParameter;
    require(s.sample_lag.count() > 0 && s.duration.count() > 0 && s.period.count() > 0, e,
            "pulse durations must be positive");
    require(s.duration < s.period, e, "pulse duration must be shorter than its period");
    require(s.baseline_percent >= 0.0 && s.height_percent > 0.0 && s.baseline_percent + s.height_percent <= 100.0, e,
            "baseline + height must stay within 0..100 percent");
    require(s.noise_sigma >= 0.0, e, "noise sigma must be non-negative");
    require(s.duration % s.sample_lag == Duration::zero() && s.period % s.sample_lag == Duration::zero(), e,
            "sample lag must divide pulse duration and period");
    require(s.total_span >= s.sample_lag, e, "total span shorter than one sample");
    require(s.cpu_jump_percent >= 20.0 && s.cpu_baseline_percent + s.cpu_jump_percent <= 100.0, e,
            "cpu jump must be >= 20 points and stay within 100 percent");
}

inline void validate(const RequestSchedule& s) {
    using detail::require;
    const auto e = ErrorKind::InvalidParameter;
    require(s.period.count() > 0, e, "request period must be positive");
    require(s.jitter_sigma.count() >= 0, e, "jitter sigma must be non-negative");
    require(!s.apps.empty(), e, "schedule needs at least one app");
    for (const auto& a : s.apps) {
        require(a.weight > 0 && !a.app_id.empty() && a.app_id.front() == '/', e,
                "apps need a positive weight and a path starting with '/'");
    }
    require(s.offset.count() >= 0 && s.offset < s.period, e, "offset must lie inside the period");
}

/**
 * Memory and CPU samples every sample_lag. Pulses sit in the middle of each
 * period; the CPU jumps by cpu_jump_percent for the same interval.
 */
inline SimulatedMetrics generate_metrics(const PulseSpec& spec) {
    validate(spec);
    SimulatedMetrics out;
    std::mt19937_64 rng(spec.rng_seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    const Duration lead = ((spec.period - spec.duration) / 2 / spec.sample_lag) * spec.sample_lag;
    const auto n = static_cast<std::size_t>(spec.total_span / spec.sample_lag);
    out.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Duration since = spec.sample_lag * static_cast<std::int64_t>(i);
        const Duration phase = since % spec.period;
        const bool on = phase >= lead && phase < lead + spec.duration;
        const double mem_noise = spec.noise_sigma * noise(rng);
        const double cpu_noise = spec.noise_sigma * noise(rng);
        MetricsSample s;
        s.timestamp = spec.start_time + since;
        s.mem_percent = std::clamp(spec.baseline_percent + (on ? spec.height_percent : 0.0) + mem_noise, 0.0, 100.0);
        s.cpu_percent = std::clamp(spec.cpu_baseline_percent + (on ? spec.cpu_jump_percent : 0.0) + cpu_noise, 0.0, 100.0);
        out.samples.push_back(std::move(s));
    }
    for (Duration start = lead; start + spec.duration <= spec.total_span - spec.sample_lag; start += spec.period) {
        out.truth.push_back({spec.start_time + start, {spec.height_percent, spec.height_percent, spec.duration}});
    }
    return out;
}

/// Renders one record as a Combined Log Format line with a trailing duration in microseconds.
inline std::string format_apache_line(const RequestRecord& r) {
    std::string line = r.client_ip + " - - [" + format_apache_time(r.timestamp) + "] \"GET " + r.app_id +
                       " HTTP/1.1\" " + std::to_string(r.status.value_or(200)) + " " +
                       (r.bytes ? std::to_string(*r.bytes) : std::string("-")) + " \"-\" \"augury-sim/1.0\"";
    if (r.duration) {
        line += " " + std::to_string(r.duration->count());
    }
    return line;
}

/// Scheduled requests, chronologically ordered. Apache timestamps keep whole seconds.
inline std::vector<RequestRecord> generate_request_records(const RequestSchedule& schedule) {
    validate(schedule);
    std::mt19937_64 rng(schedule.rng_seed);
    std::normal_distribution<double> jitter(0.0, 1.0);
    std::uniform_int_distribution<std::uint64_t> bytes(256, 4096);
    std::exponential_distribution<double> runtime(1.0 / 0.05);

    const double jitter_s = to_seconds(schedule.jitter_sigma);
    const double limit_s = to_seconds(schedule.period) / 2.0 - 1.0;
    std::vector<RequestRecord> out;
    const auto bursts = static_cast<std::size_t>(schedule.total_span / schedule.period);
    for (std::size_t k = 0; k < bursts; ++k) {
        const Timestamp burst = schedule.start_time + schedule.period * static_cast<std::int64_t>(k) + schedule.offset;
        for (std::size_t a = 0; a < schedule.apps.size(); ++a) {
            for (std::size_t w = 0; w < schedule.apps[a].weight; ++w) {
                double shift = jitter_s * jitter(rng);
                shift = std::clamp(shift, -std::max(limit_s, 0.0), std::max(limit_s, 0.0));
                RequestRecord r;
                r.timestamp = floor_to(burst + from_seconds(shift), kSecond);
                r.app_id = schedule.apps[a].app_id;
                r.client_ip = "192.168.1." + std::to_string(10 + a);
                r.status = 200;
                r.bytes = bytes(rng);
                r.duration = from_seconds(runtime(rng));
                out.push_back(std::move(r));
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RequestRecord& x, const RequestRecord& y) { return x.timestamp < y.timestamp; });
    return out;
}

inline std::vector<std::string> generate_requests(const RequestSchedule& schedule) {
    std::vector<std::string> lines;
    for (const auto& r : generate_request_records(schedule)) {
        lines.push_back(format_apache_line(r));
    }
    return lines;
}

}  // namespace augury::sim
