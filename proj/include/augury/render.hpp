#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "augury/aggregation.hpp"
#include "augury/csv.hpp"
#include "augury/error.hpp"
#include "augury/seasonal.hpp"
#include "augury/series.hpp"
#include "augury/signal_model.hpp"
#include "augury/time.hpp"

namespace augury {

enum class SnapshotKind {
    Trend,
    SeasonalBoxplot,
    ZoomBoxplot,
    RuntimeScatter,
    CumulativeMemory,
    ForecastOverlay,
    DecompositionPanels
};

inline std::string_view to_string(SnapshotKind kind) {
    switch (kind) {
        case SnapshotKind::Trend: return "trend";
        case SnapshotKind::SeasonalBoxplot: return "seasonal_boxplot";
        case SnapshotKind::ZoomBoxplot: return "zoom_boxplot";
        case SnapshotKind::RuntimeScatter: return "runtime_scatter";
        case SnapshotKind::CumulativeMemory: return "cumulative_memory";
        case SnapshotKind::ForecastOverlay: return "forecast_overlay";
        case SnapshotKind::DecompositionPanels: return "decomposition_panels";
    }
    return "trend";
}

struct TrendLine {
    std::string label;
    RegularSeries series;
};

struct ForecastOverlay {
    RegularSeries actual;
    RegularSeries arima;
    RegularSeries naive;
};

struct DecompositionPanels {
    RegularSeries input;
    Decomposition parts;
};

using SnapshotPayload = std::variant<std::vector<TrendLine>, SeasonalProfile, RuntimeDistribution, MemoryProjection,
                                     ForecastOverlay, DecompositionPanels>;

/// A static view of one analysis output.
struct Snapshot {
    SnapshotKind kind = SnapshotKind::Trend;
    std::string title;
    SnapshotPayload payload;
};

namespace detail {

inline void check_payload(const Snapshot& s) {
    bool ok = false;
    bool empty = false;
    switch (s.kind) {
        case SnapshotKind::Trend:
            if (auto* p = std::get_if<std::vector<TrendLine>>(&s.payload)) {
                ok = true;
                empty = p->empty();
            }
            break;
        case SnapshotKind::SeasonalBoxplot:
        case SnapshotKind::ZoomBoxplot:
            if (auto* p = std::get_if<SeasonalProfile>(&s.payload)) {
                ok = true;
                empty = p->bins.empty();
            }
            break;
        case SnapshotKind::RuntimeScatter:
            if (auto* p = std::get_if<RuntimeDistribution>(&s.payload)) {
                ok = true;
                empty = p->samples.empty();
            }
            break;
        case SnapshotKind::CumulativeMemory:
            if (auto* p = std::get_if<MemoryProjection>(&s.payload)) {
                ok = true;
                empty = p->days.empty();
            }
            break;
        case SnapshotKind::ForecastOverlay: ok = std::holds_alternative<ForecastOverlay>(s.payload); break;
        case SnapshotKind::DecompositionPanels: ok = std::holds_alternative<DecompositionPanels>(s.payload); break;
    }
    require(ok, ErrorKind::InvalidParameter,
            "snapshot payload does not match kind " + std::string(to_string(s.kind)));
    require(!empty, ErrorKind::EmptyInput, "snapshot payload is empty");
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Fixed two-decimal coordinate text; stable across platforms.
inline std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string label_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    // Empty and zero-width ranges widen so every value maps to a finite pixel.
    Range padded() const {
        Range r = *this;
        if (!std::isfinite(r.lo)) {
            r.lo = 0.0;
            r.hi = 1.0;
        }
        if (r.hi - r.lo <= 0.0) {
            const double pad = std::max(std::abs(r.lo) * 0.05, 0.5);
            r.lo -= pad;
            r.hi += pad;
        }
        return r;
    }
};

/// Plot area with an inverted screen y axis.
struct Frame {
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;
    Range x;
    Range y;

    double px(double v) const { return left + (v - x.lo) / (x.hi - x.lo) * width; }
    double py(double v) const { return top + height - (v - y.lo) / (y.hi - y.lo) * height; }
};

class SvgBuilder {
public:
    SvgBuilder(int width, int height, std::string_view title) {
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
             << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\""
             << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
             << "<title>" << xml_escape(title) << "</title>\n"
             << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
             << "<text x=\"" << coord(width / 2.0) << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             << "font-size=\"14\">" << xml_escape(title) << "</text>\n";
    }

    SvgBuilder& raw(std::string_view s) {
        out_ << s;
        return *this;
    }

    void axes(const Frame& f, std::string_view x_lo, std::string_view x_hi) {
        out_ << "<g class=\"axes\" font-family=\"sans-serif\" font-size=\"10\">\n"
             << "<rect x=\"" << coord(f.left) << "\" y=\"" << coord(f.top) << "\" width=\"" << coord(f.width)
             << "\" height=\"" << coord(f.height) << "\" fill=\"none\" stroke=\"#444\"/>\n";
        text(f.left - 4, f.top + f.height, "end", label_number(f.y.lo));
        text(f.left - 4, f.top + 10, "end", label_number(f.y.hi));
        text(f.left, f.top + f.height + 14, "start", x_lo);
        text(f.left + f.width, f.top + f.height + 14, "end", x_hi);
        out_ << "</g>\n";
    }

    void text(double x, double y, std::string_view anchor, std::string_view s) {
        out_ << "<text x=\"" << coord(x) << "\" y=\"" << coord(y) << "\" text-anchor=\"" << anchor << "\">"
             << xml_escape(s) << "</text>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view cls, std::string_view color) {
        out_ << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
             << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            out_ << (i ? " " : "") << coord(pts[i].first) << ',' << coord(pts[i].second);
        }
        out_ << "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, std::string_view color, std::string_view cls = "") {
        out_ << "<line";
        if (!cls.empty()) {
            out_ << " class=\"" << cls << "\"";
        }
        out_ << " x1=\"" << coord(x1) << "\" y1=\"" << coord(y1) << "\" x2=\"" << coord(x2) << "\" y2=\""
             << coord(y2) << "\" stroke=\"" << color << "\"/>\n";
    }

    /// Five-pointed star centered at (cx, cy).
    void star(double cx, double cy, double r) {
        out_ << "<polygon class=\"outlier\" fill=\"none\" stroke=\"black\" stroke-width=\"0.8\" points=\"";
        for (int k = 0; k < 10; ++k) {
            const double radius = (k % 2 == 0) ? r : r * 0.4;
            const double angle = -std::numbers::pi / 2.0 + k * std::numbers::pi / 5.0;
            out_ << (k ? " " : "") << coord(cx + radius * std::cos(angle)) << ','
                 << coord(cy + radius * std::sin(angle));
        }
        out_ << "\"/>\n";
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    std::ostringstream out_;
};

inline constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

inline Frame plot_frame(int width, double top_offset, double panel_height) {
    Frame f;
    f.left = 60.0;
    f.top = top_offset + 10.0;
    f.width = width - 80.0;
    f.height = panel_height - 30.0;
    return f;
}

// Series broken into polylines at missing values.
inline void draw_series(SvgBuilder& svg, const Frame& f, const RegularSeries& s, std::string_view cls,
                        std::string_view color) {
    std::vector<std::pair<double, double>> run;
    auto flush = [&] {
        if (!run.empty()) {
            svg.polyline(run, cls, color);
            run.clear();
        }
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s[i]) {
            flush();
            continue;
        }
        run.emplace_back(f.px(to_seconds(s.time_at(i).time_since_epoch())), f.py(*s[i]));
    }
    flush();
}

inline Range time_range(const RegularSeries& s) {
    Range r;
    r.include(to_seconds(s.start_time().time_since_epoch()));
    r.include(to_seconds(s.end_time().time_since_epoch()));
    return r;
}

inline Range value_range(const RegularSeries& s) {
    Range r;
    for (const auto& v : s.values()) {
        if (v) {
            r.include(*v);
        }
    }
    return r;
}

inline std::string render_trend(SvgBuilder& svg, const std::vector<TrendLine>& lines, int w, int h) {
    Frame f = plot_frame(w, 20.0, h - 20.0);
    Range xr, yr;
    for (const auto& l : lines) {
        const auto t = time_range(l.series);
        xr.include(t.lo);
        xr.include(t.hi);
        const auto v = value_range(l.series);
        yr.include(v.lo);
        yr.include(v.hi);
    }
    f.x = xr.padded();
    f.y = yr.padded();
    svg.axes(f, format_iso8601(from_seconds(f.x.lo) + Timestamp{}), format_iso8601(from_seconds(f.x.hi) + Timestamp{}));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        draw_series(svg, f, lines[i].series, "trend", color);
        svg.raw("<text class=\"legend\" font-family=\"sans-serif\" font-size=\"10\" fill=\"")
            .raw(color)
            .raw("\" x=\"" + coord(f.left + 6) + "\" y=\"" + coord(f.top + 12 + 12.0 * static_cast<double>(i)) + "\">")
            .raw(xml_escape(lines[i].label))
            .raw("</text>\n");
    }
    return svg.finish();
}

inline std::string render_boxplot(SvgBuilder& svg, const SeasonalProfile& profile, int w, int h) {
    Frame f = plot_frame(w, 20.0, h - 20.0);
    Range yr;
    for (const auto& b : profile.bins) {
        yr.include(b.whisker_low);
        yr.include(b.whisker_high);
        yr.include(b.q1);
        yr.include(b.q3);
        for (const auto& o : b.outliers) {
            yr.include(o.value);
        }
    }
    f.x = {-0.5, static_cast<double>(profile.bins.size()) - 0.5};
    f.y = yr.padded();
    svg.axes(f, "0", std::to_string(profile.bins.size() - 1));
    const double slot = f.width / static_cast<double>(profile.bins.size());
    const double half = std::max(slot * 0.3, 0.5);
    for (const auto& b : profile.bins) {
        const double cx = f.px(static_cast<double>(b.bin_index));
        svg.raw("<g class=\"box\" data-bin=\"" + std::to_string(b.bin_index) + "\">\n");
        svg.line(cx, f.py(b.whisker_low), cx, f.py(b.q1), "black", "whisker");
        svg.line(cx, f.py(b.q3), cx, f.py(b.whisker_high), "black", "whisker");
        svg.line(cx - half / 2, f.py(b.whisker_low), cx + half / 2, f.py(b.whisker_low), "black");
        svg.line(cx - half / 2, f.py(b.whisker_high), cx + half / 2, f.py(b.whisker_high), "black");
        svg.raw("<rect class=\"quartiles\" x=\"" + coord(cx - half) + "\" y=\"" + coord(f.py(b.q3)) + "\" width=\"" +
                coord(2 * half) + "\" height=\"" + coord(f.py(b.q1) - f.py(b.q3)) +
                "\" fill=\"#dfe8f5\" stroke=\"black\"/>\n");
        svg.line(cx - half, f.py(b.median), cx + half, f.py(b.median), "red", "median");
        for (const auto& o : b.outliers) {
            svg.star(cx, f.py(o.value), std::max(2.0, std::min(half, 5.0)));
        }
        svg.raw("</g>\n");
    }
    return svg.finish();
}

inline std::string render_runtimes(SvgBuilder& svg, const RuntimeDistribution& dist, int w, int h) {
    Frame f = plot_frame(w, 20.0, h - 20.0);
    Range xr, yr;
    for (const auto& s : dist.samples) {
        xr.include(to_seconds(s.timestamp.time_since_epoch()));
        yr.include(to_seconds(s.duration));
    }
    f.x = xr.padded();
    f.y = yr.padded();
    svg.axes(f, format_iso8601(dist.samples.front().timestamp), format_iso8601(dist.samples.back().timestamp));
    for (const auto& s : dist.samples) {
        svg.raw("<circle class=\"point\" cx=\"" + coord(f.px(to_seconds(s.timestamp.time_since_epoch()))) +
                "\" cy=\"" + coord(f.py(to_seconds(s.duration))) + "\" r=\"1.5\" fill=\"#1f77b4\"/>\n");
    }
    return svg.finish();
}

inline std::string render_projection(SvgBuilder& svg, const MemoryProjection& proj, int w, int h) {
    Frame f = plot_frame(w, 20.0, h - 20.0);
    Range xr, yr;
    yr.include(0.0);
    for (const auto& d : proj.days) {
        for (const auto& p : d.points) {
            xr.include(to_seconds(time_of_day(p.timestamp)));
            yr.include(p.cumulative_mb);
        }
    }
    f.x = xr.padded();
    f.y = yr.padded();
    svg.axes(f, format_iso8601(Timestamp{} + from_seconds(f.x.lo)).substr(11, 8),
             format_iso8601(Timestamp{} + from_seconds(f.x.hi)).substr(11, 8));
    for (std::size_t i = 0; i < proj.days.size(); ++i) {
        std::vector<std::pair<double, double>> pts;
        double prev = 0.0;
        for (const auto& p : proj.days[i].points) {
            const double x = f.px(to_seconds(time_of_day(p.timestamp)));
            pts.emplace_back(x, f.py(prev));
            pts.emplace_back(x, f.py(p.cumulative_mb));
            prev = p.cumulative_mb;
        }
        svg.polyline(pts, "day", kPalette[i % std::size(kPalette)]);
    }
    return svg.finish();
}

inline std::string render_forecast(SvgBuilder& svg, const ForecastOverlay& fc, int w, int h) {
    Frame f = plot_frame(w, 20.0, h - 20.0);
    Range xr = time_range(fc.actual);
    Range yr = value_range(fc.actual);
    for (const auto* s : {&fc.arima, &fc.naive}) {
        const auto t = time_range(*s);
        xr.include(t.lo);
        xr.include(t.hi);
        const auto v = value_range(*s);
        yr.include(v.lo);
        yr.include(v.hi);
    }
    f.x = xr.padded();
    f.y = yr.padded();
    svg.axes(f, format_iso8601(Timestamp{} + from_seconds(f.x.lo)), format_iso8601(Timestamp{} + from_seconds(f.x.hi)));
    draw_series(svg, f, fc.actual, "actual", "black");
    draw_series(svg, f, fc.arima, "forecast_arima", "#1f77b4");
    draw_series(svg, f, fc.naive, "forecast_naive", "#ff7f0e");
    return svg.finish();
}

inline std::string render_panels(SvgBuilder& svg, const DecompositionPanels& dp, int w, int h) {
    const double panel_h = (h - 20.0) / 2.0;
    const char* ids[] = {"input", "residual"};
    const RegularSeries* series[] = {&dp.input, &dp.parts.residual};
    for (int k = 0; k < 2; ++k) {
        Frame f = plot_frame(w, 20.0 + panel_h * k, panel_h);
        f.x = time_range(*series[k]).padded();
        f.y = value_range(*series[k]).padded();
        svg.raw(std::string("<g class=\"panel\" id=\"panel-") + ids[k] + "\">\n");
        svg.axes(f, format_iso8601(series[k]->start_time()), format_iso8601(series[k]->end_time()));
        draw_series(svg, f, *series[k], ids[k], k == 0 ? "black" : "#d62728");
        svg.raw("</g>\n");
    }
    return svg.finish();
}

inline std::string optional_at(const RegularSeries& s, Timestamp t) {
    if (t < s.start_time() || t > s.end_time() || (t - s.start_time()) % s.lag() != Duration::zero()) {
        return {};
    }
    return csv::format_optional(s[static_cast<std::size_t>((t - s.start_time()) / s.lag())]);
}

}  // namespace detail

/// Standalone SVG 1.1 document; byte-identical for identical inputs.
inline std::string render_svg(const Snapshot& snapshot, int width_px = 800, int height_px = 480) {
    detail::require(width_px >= 100 && height_px >= 100, ErrorKind::InvalidParameter,
                    "snapshot dimensions must be at least 100 px");
    detail::check_payload(snapshot);
    detail::SvgBuilder svg(width_px, height_px, snapshot.title);
    return std::visit(
        [&](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::vector<TrendLine>>) {
                return detail::render_trend(svg, p, width_px, height_px);
            } else if constexpr (std::is_same_v<T, SeasonalProfile>) {
                return detail::render_boxplot(svg, p, width_px, height_px);
            } else if constexpr (std::is_same_v<T, RuntimeDistribution>) {
                return detail::render_runtimes(svg, p, width_px, height_px);
            } else if constexpr (std::is_same_v<T, MemoryProjection>) {
                return detail::render_projection(svg, p, width_px, height_px);
            } else if constexpr (std::is_same_v<T, ForecastOverlay>) {
                return detail::render_forecast(svg, p, width_px, height_px);
            } else {
                return detail::render_panels(svg, p, width_px, height_px);
            }
        },
        snapshot.payload);
}

inline void write_profile_csv(std::ostream& os, const SeasonalProfile& profile) {
    csv::Writer w(os);
    w.row({"bin", "median", "q1", "q3", "whisker_low", "whisker_high", "n_outliers", "n_entries"});
    for (const auto& b : profile.bins) {
        w.row({std::to_string(b.bin_index), csv::format_number(b.median), csv::format_number(b.q1),
               csv::format_number(b.q3), csv::format_number(b.whisker_low), csv::format_number(b.whisker_high),
               std::to_string(b.outliers.size()), std::to_string(b.n_entries)});
    }
}

inline void write_decomposition_csv(std::ostream& os, const RegularSeries& input, const Decomposition& d) {
    csv::Writer w(os);
    w.row({"timestamp", "input", "seasonal", "trend", "residual"});
    for (std::size_t i = 0; i < input.size(); ++i) {
        w.row({format_iso8601(input.time_at(i)), csv::format_optional(input[i]), csv::format_optional(d.seasonal[i]),
               csv::format_optional(d.trend[i]), csv::format_optional(d.residual[i])});
    }
}

/// Rows at the actual series' instants; forecast columns are blank where no forecast exists.
inline void write_forecast_csv(std::ostream& os, const ForecastOverlay& fc) {
    csv::Writer w(os);
    w.row({"timestamp", "actual", "forecast_arima", "forecast_naive"});
    for (std::size_t i = 0; i < fc.actual.size(); ++i) {
        const Timestamp t = fc.actual.time_at(i);
        w.row({format_iso8601(t), csv::format_optional(fc.actual[i]), detail::optional_at(fc.arima, t),
               detail::optional_at(fc.naive, t)});
    }
}

/// Slot-major rows; within a slot, lines keep their given order.
inline void write_trend_csv(std::ostream& os, const std::vector<TrendLine>& lines) {
    std::map<Timestamp, std::vector<std::pair<std::size_t, std::string>>> rows;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto& s = lines[k].series;
        for (std::size_t i = 0; i < s.size(); ++i) {
            rows[s.time_at(i)].emplace_back(k, csv::format_optional(s[i]));
        }
    }
    csv::Writer w(os);
    w.row({"app_id", "slot_start", "count"});
    for (const auto& [t, entries] : rows) {
        for (const auto& [k, value] : entries) {
            w.row({lines[k].label, format_iso8601(t), value});
        }
    }
}

inline void write_patterns_csv(std::ostream& os, const std::vector<SignalPattern>& patterns,
                               const std::vector<ModelParams>& params) {
    detail::require(patterns.size() == params.size(), ErrorKind::InvalidParameter,
                    "one parameter set per pattern is required");
    csv::Writer w(os);
    w.row({"start_time", "end_time", "beta", "max_memory", "run_time_s"});
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        w.row({format_iso8601(patterns[i].start_time), format_iso8601(patterns[i].end_time),
               csv::format_number(params[i].beta), csv::format_number(params[i].max_memory),
               csv::format_number(to_seconds(params[i].run_time))});
    }
}

/// The CSV table matching the snapshot's kind.
inline std::string render_csv(const Snapshot& snapshot) {
    detail::check_payload(snapshot);
    std::ostringstream os;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::vector<TrendLine>>) {
                write_trend_csv(os, p);
            } else if constexpr (std::is_same_v<T, SeasonalProfile>) {
                write_profile_csv(os, p);
            } else if constexpr (std::is_same_v<T, RuntimeDistribution>) {
                write_runtimes_csv(os, p);
            } else if constexpr (std::is_same_v<T, MemoryProjection>) {
                write_projection_csv(os, p);
            } else if constexpr (std::is_same_v<T, ForecastOverlay>) {
                write_forecast_csv(os, p);
            } else {
                write_decomposition_csv(os, p.input, p.parts);
            }
        },
        snapshot.payload);
    return os.str();
}

}  // namespace augury
