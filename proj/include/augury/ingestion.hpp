#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "augury/csv.hpp"
#include "augury/error.hpp"
#include "augury/series.hpp"
#include "augury/time.hpp"

namespace augury {

/// One server request.
struct RequestRecord {
    Timestamp timestamp{};
    std::string app_id;
    std::string client_ip;
    std::optional<Duration> duration;
    std::optional<std::uint64_t> bytes;
    std::optional<int> status;

    friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

/// One monitoring sample; percentages are validated to [0, 100].
struct MetricsSample {
    Timestamp timestamp{};
    double mem_percent = 0.0;
    double cpu_percent = 0.0;
    std::map<std::string, double> extra;

    friend bool operator==(const MetricsSample&, const MetricsSample&) = default;
};

struct TimeInterval {
    Timestamp start{};
    Timestamp end{};

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_rejected = 0;
    std::vector<TimeInterval> gaps;
    std::vector<TimeInterval> overlaps;

    void merge(const IngestReport& other) {
        rows_read += other.rows_read;
        rows_rejected += other.rows_rejected;
        gaps.insert(gaps.end(), other.gaps.begin(), other.gaps.end());
        overlaps.insert(overlaps.end(), other.overlaps.begin(), other.overlaps.end());
    }
};

template <class T>
struct Parsed {
    std::vector<T> items;
    IngestReport report;
};

enum class FillPolicy { Missing, Previous, Zero };

/// Header names of the timestamp, memory and CPU columns in a metrics CSV.
struct ColumnMap {
    std::string timestamp = "timestamp";
    std::string memory = "mem_percent";
    std::string cpu = "cpu_percent";
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::string_view next_token(std::string_view& rest) {
    const auto end = rest.find(' ');
    std::string_view tok = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end + 1);
    return tok;
}

template <class Int>
std::optional<Int> parse_integer(std::string_view s) {
    Int v{};
    if (s.empty()) {
        return std::nullopt;
    }
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

// Reads a double-quoted field honoring backslash escapes; `rest` must start with '"'.
inline std::optional<std::string> take_quoted(std::string_view& rest) {
    if (rest.empty() || rest.front() != '"') {
        return std::nullopt;
    }
    std::string out;
    for (std::size_t i = 1; i < rest.size(); ++i) {
        if (rest[i] == '\\' && i + 1 < rest.size()) {
            out += rest[++i];
        } else if (rest[i] == '"') {
            rest = rest.substr(i + 1);
            return out;
        } else {
            out += rest[i];
        }
    }
    return std::nullopt;
}

/// Path component of a request target, query string and fragment removed.
inline std::string normalize_app_id(std::string_view target) {
    if (auto scheme = target.find("://"); scheme != std::string_view::npos) {
        const auto path = target.find('/', scheme + 3);
        target = path == std::string_view::npos ? std::string_view{"/"} : target.substr(path);
    }
    return std::string(target.substr(0, target.find_first_of("?#")));
}

inline std::string read_all(std::istream& in) {
    require(static_cast<bool>(in), ErrorKind::Io, "input stream is not readable");
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    require(!in.bad(), ErrorKind::Io, "read failed");
    return text;
}

template <class F>
void for_each_line(std::istream& in, F&& f) {
    require(static_cast<bool>(in), ErrorKind::Io, "input stream is not readable");
    std::string line;
    while (std::getline(in, line)) {
        f(std::string_view(line));
    }
    require(!in.bad(), ErrorKind::Io, "read failed");
}

inline bool valid_percent(double x) { return x >= 0.0 && x <= 100.0; }

}  // namespace detail

/**
 * Parses one Common or Combined Log Format line, optionally followed by an
 * integer request duration in microseconds. Returns nullopt for anything
 * that does not match the grammar.
 */
inline std::optional<RequestRecord> parse_apache_line(std::string_view line) {
    using detail::next_token;
    line = detail::trim(line);
    if (line.empty()) {
        return std::nullopt;
    }
    RequestRecord rec;
    std::string_view rest = line;
    const auto host = next_token(rest);
    const auto ident = next_token(rest);
    const auto user = next_token(rest);
    if (host.empty() || ident.empty() || user.empty() || rest.size() < 28 || rest.front() != '[') {
        return std::nullopt;
    }
    const auto close = rest.find(']');
    if (close == std::string_view::npos) {
        return std::nullopt;
    }
    auto ts = parse_apache_time(rest.substr(1, close - 1));
    if (!ts) {
        return std::nullopt;
    }
    rest = rest.substr(close + 1);
    if (rest.empty() || rest.front() != ' ') {
        return std::nullopt;
    }
    rest.remove_prefix(1);
    auto request = detail::take_quoted(rest);
    if (!request || rest.empty() || rest.front() != ' ') {
        return std::nullopt;
    }
    rest.remove_prefix(1);

    std::string_view req = *request;
    const auto method = next_token(req);
    const auto target = next_token(req);
    const auto protocol = next_token(req);
    if (method.empty() || target.empty() || !req.empty() ||
        (!protocol.empty() && protocol.substr(0, 5) != "HTTP/")) {
        return std::nullopt;
    }
    rec.app_id = detail::normalize_app_id(target);
    if (rec.app_id.empty()) {
        return std::nullopt;
    }

    auto status = detail::parse_integer<int>(next_token(rest));
    if (!status || *status < 100 || *status > 999) {
        return std::nullopt;
    }
    const auto bytes_tok = next_token(rest);
    if (bytes_tok != "-") {
        auto bytes = detail::parse_integer<std::uint64_t>(bytes_tok);
        if (!bytes) {
            return std::nullopt;
        }
        rec.bytes = *bytes;
    }
    if (!rest.empty() && rest.front() == '"') {
        if (!detail::take_quoted(rest) || rest.empty() || rest.front() != ' ') {
            return std::nullopt;
        }
        rest.remove_prefix(1);
        if (!detail::take_quoted(rest)) {
            return std::nullopt;
        }
        if (!rest.empty()) {
            if (rest.front() != ' ') {
                return std::nullopt;
            }
            rest.remove_prefix(1);
        }
    }
    if (!rest.empty()) {
        auto micros = detail::parse_integer<std::int64_t>(next_token(rest));
        if (!micros || *micros < 0 || !rest.empty()) {
            return std::nullopt;
        }
        rec.duration = Duration{*micros};
    }
    rec.timestamp = *ts;
    rec.client_ip = std::string(host);
    rec.status = *status;
    return rec;
}

/// Apache access log. Bad lines are counted and skipped, never fatal.
inline Parsed<RequestRecord> parse_apache_log(std::istream& in) {
    Parsed<RequestRecord> out;
    detail::for_each_line(in, [&](std::string_view line) {
        ++out.report.rows_read;
        if (auto rec = parse_apache_line(line)) {
            out.items.push_back(std::move(*rec));
        } else {
            ++out.report.rows_rejected;
        }
    });
    detail::require(!out.items.empty(), ErrorKind::EmptyInput, "no parseable apache log lines");
    return out;
}

/// Metrics CSV with a header row; result is stably sorted by timestamp.
inline Parsed<MetricsSample> read_metrics_csv(std::istream& in, const ColumnMap& columns = {}) {
    Parsed<MetricsSample> out;
    std::string header_line;
    detail::require(static_cast<bool>(in), ErrorKind::Io, "input stream is not readable");
    detail::require(static_cast<bool>(std::getline(in, header_line)), ErrorKind::EmptyInput,
                    "metrics CSV has no header");
    const auto header = csv::split_line(header_line);
    auto locate = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (detail::trim(header[i]) == name) {
                return i;
            }
        }
        detail::fail(ErrorKind::Schema, "missing column '" + name + "'");
    };
    const std::size_t ts_col = locate(columns.timestamp);
    const std::size_t mem_col = locate(columns.memory);
    const std::size_t cpu_col = locate(columns.cpu);

    detail::for_each_line(in, [&](std::string_view line) {
        ++out.report.rows_read;
        const auto fields = csv::split_line(line);
        if (fields.size() != header.size()) {
            ++out.report.rows_rejected;
            return;
        }
        auto ts = parse_timestamp(detail::trim(fields[ts_col]));
        auto mem = csv::parse_number(fields[mem_col]);
        auto cpu = csv::parse_number(fields[cpu_col]);
        if (!ts || !mem || !cpu || !detail::valid_percent(*mem) || !detail::valid_percent(*cpu)) {
            ++out.report.rows_rejected;
            return;
        }
        MetricsSample s{*ts, *mem, *cpu, {}};
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i == ts_col || i == mem_col || i == cpu_col) {
                continue;
            }
            if (auto v = csv::parse_number(fields[i])) {
                s.extra.emplace(std::string(detail::trim(header[i])), *v);
            }
        }
        out.items.push_back(std::move(s));
    });
    std::stable_sort(out.items.begin(), out.items.end(),
                     [](const MetricsSample& a, const MetricsSample& b) { return a.timestamp < b.timestamp; });
    return out;
}

namespace detail {

inline std::optional<RequestRecord> record_from_json(const nlohmann::json& obj) {
    if (!obj.is_object()) {
        return std::nullopt;
    }
    RequestRecord rec;
    const auto ts = obj.find("timestamp");
    const auto app = obj.find("app");
    const auto ip = obj.find("ip");
    if (ts == obj.end() || app == obj.end() || ip == obj.end() || !app->is_string() || !ip->is_string()) {
        return std::nullopt;
    }
    std::optional<Timestamp> when;
    if (ts->is_string()) {
        when = parse_iso8601(ts->get_ref<const std::string&>());
    } else if (ts->is_number()) {
        when = Timestamp{from_seconds(ts->get<double>())};
    }
    if (!when) {
        return std::nullopt;
    }
    rec.timestamp = *when;
    rec.app_id = normalize_app_id(app->get_ref<const std::string&>());
    rec.client_ip = ip->get<std::string>();
    if (rec.app_id.empty()) {
        return std::nullopt;
    }
    if (auto d = obj.find("duration_ms"); d != obj.end() && !d->is_null()) {
        if (!d->is_number() || d->get<double>() < 0.0) {
            return std::nullopt;
        }
        rec.duration = from_seconds(d->get<double>() / 1000.0);
    }
    if (auto b = obj.find("bytes"); b != obj.end() && !b->is_null()) {
        if (!b->is_number_integer() || b->get<std::int64_t>() < 0) {
            return std::nullopt;
        }
        rec.bytes = b->get<std::uint64_t>();
    }
    if (auto s = obj.find("status"); s != obj.end() && !s->is_null()) {
        if (!s->is_number_integer()) {
            return std::nullopt;
        }
        rec.status = s->get<int>();
    }
    return rec;
}

}  // namespace detail

/// A top-level JSON array of objects, or newline-delimited objects.
inline Parsed<RequestRecord> read_records_json(std::istream& in) {
    const std::string text = detail::read_all(in);
    const std::string_view body = detail::trim(text);
    Parsed<RequestRecord> out;
    detail::require(!body.empty(), ErrorKind::EmptyInput, "JSON input is empty");

    auto take = [&](const nlohmann::json& obj) {
        ++out.report.rows_read;
        if (auto rec = detail::record_from_json(obj)) {
            out.items.push_back(std::move(*rec));
        } else {
            ++out.report.rows_rejected;
        }
    };

    if (body.front() == '[') {
        nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
        detail::require(!doc.is_discarded() && doc.is_array(), ErrorKind::Format, "malformed JSON array");
        for (const auto& obj : doc) {
            take(obj);
        }
    } else if (body.front() == '{') {
        std::istringstream lines{std::string(body)};
        std::string line;
        while (std::getline(lines, line)) {
            const auto trimmed = detail::trim(line);
            if (trimmed.empty()) {
                continue;
            }
            nlohmann::json obj = nlohmann::json::parse(trimmed, nullptr, false);
            if (obj.is_discarded()) {
                ++out.report.rows_read;
                ++out.report.rows_rejected;
            } else {
                take(obj);
            }
        }
    } else {
        detail::fail(ErrorKind::Format, "expected a JSON array or newline-delimited objects");
    }
    detail::require(!out.items.empty(), ErrorKind::EmptyInput, "no valid JSON records");
    return out;
}

/// Value of `metric` in a sample: "mem_percent", "cpu_percent" or an extra column.
inline std::optional<double> metric_value(const MetricsSample& s, std::string_view metric) {
    if (metric == "mem_percent") {
        return s.mem_percent;
    }
    if (metric == "cpu_percent") {
        return s.cpu_percent;
    }
    if (auto it = s.extra.find(std::string(metric)); it != s.extra.end()) {
        return it->second;
    }
    return std::nullopt;
}

/**
 * Resamples onto a grid starting at the first timestamp floored to `lag`.
 * Each slot keeps the last sample that falls inside it; when several samples
 * share a timestamp the one read later wins and the slot is reported as an
 * overlap. Runs of empty slots are reported as gaps and filled per `fill`.
 */
inline std::pair<RegularSeries, IngestReport> to_regular_series(std::vector<MetricsSample> samples,
                                                                std::string_view metric, Duration lag,
                                                                FillPolicy fill = FillPolicy::Missing) {
    detail::require(!samples.empty(), ErrorKind::EmptyInput, "no samples to regularize");
    detail::require(lag.count() > 0, ErrorKind::InvalidParameter, "lag must be positive");
    std::stable_sort(samples.begin(), samples.end(),
                     [](const MetricsSample& a, const MetricsSample& b) { return a.timestamp < b.timestamp; });

    IngestReport report;
    report.rows_read = samples.size();
    const Timestamp origin = floor_to(samples.front().timestamp, lag);
    const auto slots = static_cast<std::size_t>((samples.back().timestamp - origin) / lag) + 1;
    std::vector<RegularSeries::Value> values(slots);

    auto add_interval = [](std::vector<TimeInterval>& list, TimeInterval iv) {
        if (!list.empty() && list.back().end >= iv.start) {
            list.back().end = std::max(list.back().end, iv.end);
        } else {
            list.push_back(iv);
        }
    };

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        auto v = metric_value(s, metric);
        if (!v) {
            ++report.rows_rejected;
            continue;
        }
        const auto slot = static_cast<std::size_t>((s.timestamp - origin) / lag);
        values[slot] = *v;
        if (i > 0 && samples[i - 1].timestamp == s.timestamp) {
            const Timestamp slot_start = origin + lag * static_cast<std::int64_t>(slot);
            add_interval(report.overlaps, {slot_start, slot_start + lag});
        }
    }

    std::optional<double> previous;
    for (std::size_t i = 0; i < slots; ++i) {
        if (values[i]) {
            previous = values[i];
            continue;
        }
        const Timestamp slot_start = origin + lag * static_cast<std::int64_t>(i);
        add_interval(report.gaps, {slot_start, slot_start + lag});
        switch (fill) {
            case FillPolicy::Missing: break;
            case FillPolicy::Previous: values[i] = previous; break;
            case FillPolicy::Zero: values[i] = 0.0; break;
        }
    }
    return {RegularSeries(origin, lag, std::move(values)), std::move(report)};
}

/// Canonical record CSV: `timestamp,app_id,client_ip,duration_us,bytes,status`.
inline void write_records_csv(std::ostream& os, const std::vector<RequestRecord>& records) {
    csv::Writer w(os);
    w.row({"timestamp", "app_id", "client_ip", "duration_us", "bytes", "status"});
    for (const auto& r : records) {
        w.row({format_iso8601(r.timestamp), r.app_id, r.client_ip,
               r.duration ? std::to_string(r.duration->count()) : std::string{},
               r.bytes ? std::to_string(*r.bytes) : std::string{},
               r.status ? std::to_string(*r.status) : std::string{}});
    }
}

inline Parsed<RequestRecord> read_records_csv(std::istream& in) {
    Parsed<RequestRecord> out;
    std::string header_line;
    detail::require(static_cast<bool>(in), ErrorKind::Io, "input stream is not readable");
    detail::require(static_cast<bool>(std::getline(in, header_line)), ErrorKind::EmptyInput,
                    "record CSV has no header");
    const auto header = csv::split_line(header_line);
    const std::vector<std::string> expected = {"timestamp", "app_id", "client_ip", "duration_us", "bytes", "status"};
    detail::require(header == expected, ErrorKind::Schema,
                    "record CSV header must be timestamp,app_id,client_ip,duration_us,bytes,status");
    detail::for_each_line(in, [&](std::string_view line) {
        ++out.report.rows_read;
        const auto f = csv::split_line(line);
        std::optional<Timestamp> ts;
        if (f.size() == 6) {
            ts = parse_iso8601(f[0]);
        }
        if (!ts || f[1].empty()) {
            ++out.report.rows_rejected;
            return;
        }
        RequestRecord r{*ts, f[1], f[2], std::nullopt, std::nullopt, std::nullopt};
        bool ok = true;
        if (!f[3].empty()) {
            auto d = detail::parse_integer<std::int64_t>(f[3]);
            ok = ok && d && *d >= 0;
            if (d) {
                r.duration = Duration{*d};
            }
        }
        if (!f[4].empty()) {
            auto b = detail::parse_integer<std::uint64_t>(f[4]);
            ok = ok && b;
            r.bytes = b;
        }
        if (!f[5].empty()) {
            auto s = detail::parse_integer<int>(f[5]);
            ok = ok && s;
            r.status = s;
        }
        if (ok) {
            out.items.push_back(std::move(r));
        } else {
            ++out.report.rows_rejected;
        }
    });
    return out;
}

/// Canonical metrics CSV: `timestamp,mem_percent,cpu_percent`.
inline void write_metrics_csv(std::ostream& os, const std::vector<MetricsSample>& samples) {
    csv::Writer w(os);
    w.row({"timestamp", "mem_percent", "cpu_percent"});
    for (const auto& s : samples) {
        w.row({format_iso8601(s.timestamp), csv::format_number(s.mem_percent), csv::format_number(s.cpu_percent)});
    }
}

}  // namespace augury
