#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace augury::csv {

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string format_optional(const std::optional<double>& x) {
    return x ? format_number(*x) : std::string{};
}

inline std::optional<double> parse_number(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double x = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(x)) {
        return std::nullopt;
    }
    return x;
}

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

inline std::string escape_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

/// Writes comma-separated rows terminated by LF.
class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}

    Writer& row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) {
                os_ << ',';
            }
            os_ << escape_field(fields[i]);
        }
        os_ << '\n';
        return *this;
    }

private:
    std::ostream& os_;
};

}  // namespace augury::csv
