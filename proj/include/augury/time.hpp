#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace augury {

/// Microsecond resolution everywhere; all instants are UTC.
using Duration = std::chrono::microseconds;
using Timestamp = std::chrono::sys_time<Duration>;

inline constexpr Duration kSecond = std::chrono::seconds{1};
inline constexpr Duration kMinute = std::chrono::minutes{1};
inline constexpr Duration kHour = std::chrono::hours{1};
inline constexpr Duration kDay = std::chrono::hours{24};

inline double to_seconds(Duration d) noexcept {
    return static_cast<double>(d.count()) / 1e6;
}

inline Duration from_seconds(double s) {
    return Duration{static_cast<std::int64_t>(std::llround(s * 1e6))};
}

/// Floor division that rounds toward negative infinity.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

/// Largest multiple of `step` since the epoch that is <= t.
inline Timestamp floor_to(Timestamp t, Duration step) noexcept {
    return Timestamp{Duration{floor_div(t.time_since_epoch().count(), step.count()) * step.count()}};
}

inline Timestamp day_start(Timestamp t) noexcept { return floor_to(t, kDay); }

inline Duration time_of_day(Timestamp t) noexcept { return t - day_start(t); }

namespace detail {

inline bool parse_uint(std::string_view s, int& out) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline std::optional<Timestamp> make_timestamp(int y, int mo, int d, int h, int mi, int s,
                                               std::int64_t micros, int offset_minutes) {
    using namespace std::chrono;
    if (mo < 1 || mo > 12 || h > 23 || mi > 59 || s > 60) {
        return std::nullopt;
    }
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    Timestamp t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + Duration{micros};
    return t - minutes{offset_minutes};
}

// Parses "+HHMM", "+HH:MM", "-HHMM", "-HH:MM" into signed minutes.
inline std::optional<int> parse_offset(std::string_view z) {
    if (z.size() < 5 || (z[0] != '+' && z[0] != '-')) {
        return std::nullopt;
    }
    int sign = z[0] == '-' ? -1 : 1;
    std::string_view hh = z.substr(1, 2);
    std::string_view mm = z[3] == ':' ? z.substr(4) : z.substr(3);
    int h = 0;
    int m = 0;
    if (mm.size() != 2 || !parse_uint(hh, h) || !parse_uint(mm, m) || h > 23 || m > 59) {
        return std::nullopt;
    }
    return sign * (h * 60 + m);
}

}  // namespace detail

/// Parses `YYYY-MM-DD[T ]HH:MM:SS[.frac][Z|+HH:MM|+HHMM]`. A missing zone means UTC.
inline std::optional<Timestamp> parse_iso8601(std::string_view s) {
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':') {
        return std::nullopt;
    }
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (!detail::parse_uint(s.substr(0, 4), y) || !detail::parse_uint(s.substr(5, 2), mo) ||
        !detail::parse_uint(s.substr(8, 2), d) || !detail::parse_uint(s.substr(11, 2), h) ||
        !detail::parse_uint(s.substr(14, 2), mi) || !detail::parse_uint(s.substr(17, 2), sec)) {
        return std::nullopt;
    }
    std::string_view rest = s.substr(19);
    std::int64_t micros = 0;
    if (!rest.empty() && rest[0] == '.') {
        std::size_t n = 1;
        std::int64_t scale = 100000;
        while (n < rest.size() && rest[n] >= '0' && rest[n] <= '9') {
            micros += (rest[n] - '0') * scale;
            scale /= 10;
            ++n;
        }
        if (n == 1) {
            return std::nullopt;
        }
        rest = rest.substr(n);
    }
    int offset = 0;
    if (rest == "Z" || rest.empty()) {
        offset = 0;
    } else if (auto off = detail::parse_offset(rest)) {
        offset = *off;
    } else {
        return std::nullopt;
    }
    return detail::make_timestamp(y, mo, d, h, mi, sec, micros, offset);
}

/// Accepts ISO 8601 text or a plain (possibly fractional) count of epoch seconds.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    if (auto t = parse_iso8601(s)) {
        return t;
    }
    if (s.empty()) {
        return std::nullopt;
    }
    double secs = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), secs);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(secs)) {
        return std::nullopt;
    }
    return Timestamp{from_seconds(secs)};
}

/// `YYYY-MM-DDTHH:MM:SS[.ffffff]Z`; the fraction appears only when non-zero.
inline std::string format_iso8601(Timestamp t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{day};
    auto tod = t - day;
    auto h = duration_cast<hours>(tod);
    auto m = duration_cast<minutes>(tod - h);
    auto s = duration_cast<seconds>(tod - h - m);
    auto us = (tod - h - m - s).count();
    char buf[40];
    int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                          static_cast<int>(h.count()), static_cast<int>(m.count()),
                          static_cast<int>(s.count()));
    std::string out(buf, static_cast<std::size_t>(n));
    if (us != 0) {
        std::snprintf(buf, sizeof buf, ".%06lld", static_cast<long long>(us));
        out += buf;
    }
    out += 'Z';
    return out;
}

inline constexpr std::array<std::string_view, 12> kMonthAbbrev = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

/// Apache `%d/%b/%Y:%H:%M:%S %z`, e.g. `12/Mar/2017:22:04:01 +0000`.
inline std::optional<Timestamp> parse_apache_time(std::string_view s) {
    if (s.size() != 26 || s[2] != '/' || s[6] != '/' || s[11] != ':' || s[14] != ':' ||
        s[17] != ':' || s[20] != ' ') {
        return std::nullopt;
    }
    int d = 0, y = 0, h = 0, mi = 0, sec = 0;
    int mo = 0;
    for (std::size_t i = 0; i < kMonthAbbrev.size(); ++i) {
        if (s.substr(3, 3) == kMonthAbbrev[i]) {
            mo = static_cast<int>(i) + 1;
        }
    }
    if (mo == 0 || !detail::parse_uint(s.substr(0, 2), d) || !detail::parse_uint(s.substr(7, 4), y) ||
        !detail::parse_uint(s.substr(12, 2), h) || !detail::parse_uint(s.substr(15, 2), mi) ||
        !detail::parse_uint(s.substr(18, 2), sec)) {
        return std::nullopt;
    }
    auto offset = detail::parse_offset(s.substr(21));
    if (!offset) {
        return std::nullopt;
    }
    return detail::make_timestamp(y, mo, d, h, mi, sec, 0, *offset);
}

inline std::string format_apache_time(Timestamp t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{day};
    auto tod = duration_cast<seconds>(t - day);
    auto h = tod.count() / 3600;
    auto m = (tod.count() / 60) % 60;
    auto s = tod.count() % 60;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%02u/%s/%04d:%02lld:%02lld:%02lld +0000",
                  static_cast<unsigned>(ymd.day()),
                  kMonthAbbrev[static_cast<unsigned>(ymd.month()) - 1].data(),
                  static_cast<int>(ymd.year()), static_cast<long long>(h), static_cast<long long>(m),
                  static_cast<long long>(s));
    return buf;
}

}  // namespace augury
