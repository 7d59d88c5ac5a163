#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "augury/augury.hpp"

namespace augury::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Bad flag combinations found after parsing; reported like parse errors.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    bool color = false;
};

struct OutputOptions {
    std::string format = "csv";
    std::string out_dir;
};

struct InputOptions {
    std::string path;
    bool from_stdin = false;
};

namespace detail {

inline void note(const Streams& io, const std::string& msg) { io.err << msg << '\n'; }

inline void report_error(const Streams& io, const std::string& label, const std::string& msg) {
    if (io.color) {
        io.err << "\033[31m" << label << "\033[0m: " << msg << '\n';
    } else {
        io.err << label << ": " << msg << '\n';
    }
}

inline std::string read_input(const Streams& io, const InputOptions& opt) {
    if (opt.from_stdin == !opt.path.empty()) {
        throw UsageError("exactly one of --input or --stdin is required");
    }
    if (opt.from_stdin) {
        std::ostringstream buf;
        buf << io.in.rdbuf();
        return buf.str();
    }
    std::ifstream f(opt.path, std::ios::binary);
    augury::detail::require(static_cast<bool>(f), ErrorKind::Io, "cannot open '" + opt.path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

inline std::string first_line(const std::string& text) {
    std::string line = text.substr(0, text.find('\n'));
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

/// Apache log, JSON/NDJSON or canonical record CSV, recognised by content.
inline Parsed<RequestRecord> load_records(const std::string& text) {
    std::istringstream in(text);
    const auto pos = text.find_first_not_of(" \t\r\n");
    if (pos != std::string::npos && (text[pos] == '[' || text[pos] == '{')) {
        return read_records_json(in);
    }
    if (first_line(text).rfind("timestamp,app_id", 0) == 0) {
        return read_records_csv(in);
    }
    return parse_apache_log(in);
}

inline std::string top_app(const std::vector<RequestRecord>& records) {
    return rank_applications(records, 1).apps.front().app_id;
}

inline void print_report(const Streams& io, const IngestReport& r) {
    note(io, "rows_read=" + std::to_string(r.rows_read) + " rows_rejected=" + std::to_string(r.rows_rejected) +
                 " gaps=" + std::to_string(r.gaps.size()) + " overlaps=" + std::to_string(r.overlaps.size()));
}

inline PeriodKind parse_period(const std::string& s) {
    if (s == "hourly") return PeriodKind::Hourly;
    if (s == "daily") return PeriodKind::Daily;
    if (s == "weekly") return PeriodKind::Weekly;
    throw UsageError("unknown period '" + s + "'");
}

inline Duration parse_clock(const std::string& s) {
    int h = 0, m = 0, sec = 0;
    char tail = 0;
    const int n = std::sscanf(s.c_str(), "%d:%d:%d%c", &h, &m, &sec, &tail);
    if ((n != 2 && n != 3) || h < 0 || h > 24 || m < 0 || m > 59 || sec < 0 || sec > 59 ||
        (h == 24 && (m != 0 || sec != 0))) {
        throw UsageError("clock time '" + s + "' must be HH:MM or HH:MM:SS");
    }
    return kHour * h + kMinute * m + kSecond * sec;
}

/// Writes the CSV and/or SVG form of one output, to files under --out or to stdout.
inline void emit(const Streams& io, const OutputOptions& opt, const std::string& name,
                 const std::function<std::string()>& make_csv, const std::function<std::string()>& make_svg) {
    const bool want_csv = opt.format != "svg";
    const bool want_svg = opt.format != "csv";
    if (opt.out_dir.empty()) {
        if (want_csv && want_svg) {
            throw UsageError("--format both needs --out DIR");
        }
        io.out << (want_csv ? make_csv() : make_svg());
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    augury::detail::require(!ec, ErrorKind::Io, "cannot create directory '" + opt.out_dir + "'");
    auto write = [&](const std::string& ext, const std::string& body) {
        const auto path = std::filesystem::path(opt.out_dir) / (name + ext);
        std::ofstream f(path, std::ios::binary);
        f << body;
        augury::detail::require(static_cast<bool>(f), ErrorKind::Io, "cannot write '" + path.string() + "'");
        note(io, "wrote " + path.string());
    };
    if (want_csv) {
        write(".csv", make_csv());
    }
    if (want_svg) {
        write(".svg", make_svg());
    }
}

inline std::string series_csv(const RegularSeries& s, const std::string& column) {
    std::ostringstream os;
    csv::Writer w(os);
    w.row({"timestamp", column});
    for (std::size_t i = 0; i < s.size(); ++i) {
        w.row({format_iso8601(s.time_at(i)), csv::format_optional(s[i])});
    }
    return os.str();
}

inline std::string summary_line(const std::string& name, const SummaryStat& s) {
    return name + ": mean=" + csv::format_number(s.mean) + " std=" + csv::format_number(s.std) +
           " median=" + csv::format_number(s.median);
}

/// Reads `timestamp,<column>` pairs from a CSV with a header; the lag is the first spacing.
inline RegularSeries read_series_csv(const std::string& text, const std::string& column) {
    std::istringstream in(text);
    std::string line;
    augury::detail::require(static_cast<bool>(std::getline(in, line)), ErrorKind::EmptyInput, "series CSV is empty");
    const auto header = csv::split_line(line);
    const auto ts_col = std::find(header.begin(), header.end(), "timestamp") - header.begin();
    const auto v_col = std::find(header.begin(), header.end(), column) - header.begin();
    augury::detail::require(ts_col < static_cast<std::ptrdiff_t>(header.size()), ErrorKind::Schema,
                            "series CSV lacks a timestamp column");
    augury::detail::require(v_col < static_cast<std::ptrdiff_t>(header.size()), ErrorKind::Schema,
                            "series CSV lacks column '" + column + "'");
    std::vector<Timestamp> times;
    std::vector<RegularSeries::Value> values;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = csv::split_line(line);
        const auto need = static_cast<std::size_t>(std::max(ts_col, v_col));
        augury::detail::require(f.size() > need, ErrorKind::Format, "short row in series CSV");
        const auto ts = parse_timestamp(f[static_cast<std::size_t>(ts_col)]);
        augury::detail::require(ts.has_value(), ErrorKind::Format, "bad timestamp '" + f[0] + "'");
        times.push_back(*ts);
        const auto& cell = f[static_cast<std::size_t>(v_col)];
        if (cell.empty()) {
            values.emplace_back();
        } else {
            const auto v = csv::parse_number(cell);
            augury::detail::require(v.has_value(), ErrorKind::Format, "bad number '" + cell + "'");
            values.emplace_back(*v);
        }
    }
    augury::detail::require(times.size() >= 2, ErrorKind::InsufficientData, "series CSV needs at least 2 rows");
    const Duration lag = times[1] - times[0];
    augury::detail::require(lag.count() > 0, ErrorKind::Format, "series timestamps must increase");
    for (std::size_t i = 1; i < times.size(); ++i) {
        augury::detail::require(times[i] - times[i - 1] == lag, ErrorKind::Format,
                                "series CSV is not equally spaced at row " + std::to_string(i + 1));
    }
    return RegularSeries(times.front(), lag, std::move(values));
}

}  // namespace detail

/**
 * Parses `args` (without the program name) and runs one subcommand.
 * Returns 0 on success, 1 on usage errors and 2 on data errors.
 */
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
               bool color = false) {
    Streams io{in, out, err, color};
    CLI::App app{"Server monitoring analytics: memory-usage patterns, traffic seasonality and forecasting", "augury"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file; flags take precedence");
    app.set_version_flag("--version", "augury 1.0.0");

    OutputOptions output;
    InputOptions input;
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--format", output.format, "Output format")
            ->check(CLI::IsMember({"csv", "svg", "both"}))
            ->capture_default_str();
        sub->add_option("--out", output.out_dir, "Directory for output files (default: standard output)");
    };
    auto add_input = [&](CLI::App* sub) {
        sub->add_option("--input,-i", input.path, "Input file")->check(CLI::ExistingFile);
        sub->add_flag("--stdin", input.from_stdin, "Read input from standard input");
    };

    std::function<void()> action;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse a log or metrics file into canonical CSV");
    std::string ingest_type = "auto";
    double ingest_lag = 2.0;
    add_input(ingest);
    add_output(ingest);
    ingest->add_option("--type", ingest_type, "Input kind")
        ->check(CLI::IsMember({"auto", "requests", "metrics"}))
        ->capture_default_str();
    ingest->add_option("--lag", ingest_lag, "Metrics sampling lag in seconds for gap detection")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    ingest->callback([&] {
        action = [&] {
            const std::string text = detail::read_input(io, input);
            std::string type = ingest_type;
            if (type == "auto") {
                const auto header = detail::first_line(text);
                type = (header.find("mem_percent") != std::string::npos && header.find("timestamp") != std::string::npos)
                           ? "metrics"
                           : "requests";
            }
            if (type == "metrics") {
                std::istringstream is(text);
                auto parsed = read_metrics_csv(is);
                augury::detail::require(!parsed.items.empty(), ErrorKind::EmptyInput, "no valid metrics rows");
                auto [series, report] = to_regular_series(parsed.items, "mem_percent", from_seconds(ingest_lag));
                parsed.report.merge(report);
                detail::print_report(io, parsed.report);
                detail::emit(
                    io, output, "metrics",
                    [&] {
                        std::ostringstream os;
                        write_metrics_csv(os, parsed.items);
                        return os.str();
                    },
                    [&] {
                        return render_svg({SnapshotKind::Trend, "Memory usage", std::vector<TrendLine>{{"mem_percent", series}}});
                    });
            } else {
                const auto parsed = detail::load_records(text);
                detail::print_report(io, parsed.report);
                detail::emit(
                    io, output, "records",
                    [&] {
                        std::ostringstream os;
                        write_records_csv(os, parsed.items);
                        return os.str();
                    },
                    [&] {
                        const auto ranking = rank_applications(parsed.items, 5);
                        std::vector<TrendLine> lines;
                        for (const auto& a : ranking.apps) {
                            lines.push_back({a.app_id, count_executions(parsed.items, a.app_id, 60)});
                        }
                        return render_svg({SnapshotKind::Trend, "Requests per hour", std::move(lines)});
                    });
            }
        };
    });

    // patterns
    auto* patterns = app.add_subcommand("patterns", "Detect memory-usage impulses and fit the three-parameter model");
    DetectionConfig detect;
    std::string metric = "mem_percent";
    std::string weights = "exponential";
    std::string sigma_mode = "ma";
    double lag_s = 2.0;
    add_input(patterns);
    add_output(patterns);
    patterns->add_option("--metric", metric, "Metrics column to analyse")->capture_default_str();
    patterns->add_option("--lag", lag_s, "Sampling lag in seconds")->check(CLI::PositiveNumber)->capture_default_str();
    patterns->add_option("--max-window", detect.max_window, "Largest MA window considered")
        ->check(CLI::Range(2, 1 << 20))
        ->capture_default_str();
    patterns->add_option("--weights", weights, "MA weighting")
        ->check(CLI::IsMember({"exponential", "uniform"}))
        ->capture_default_str();
    patterns->add_option("--sigma", sigma_mode, "Band scale: MA spread or residual spread")
        ->check(CLI::IsMember({"ma", "residual"}))
        ->capture_default_str();
    patterns->add_option("--k-sigma", detect.k_sigma, "Band half-width in sigmas")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    patterns->add_option("--isolation", detect.isolation_lags, "Isolation distance in lags")->capture_default_str();
    patterns->callback([&] {
        action = [&] {
            detect.weighting = weights == "uniform" ? WindowWeighting::uniform() : WindowWeighting::exponential();
            detect.sigma_mode = sigma_mode == "residual" ? SigmaMode::Residual : SigmaMode::MovingAverage;
            std::istringstream is(detail::read_input(io, input));
            auto parsed = read_metrics_csv(is);
            augury::detail::require(!parsed.items.empty(), ErrorKind::EmptyInput, "no valid metrics rows");
            auto [series, report] = to_regular_series(parsed.items, metric, from_seconds(lag_s));
            parsed.report.merge(report);
            detail::print_report(io, parsed.report);
            const auto analysis = analyze_memory(series, detect);
            detail::note(io, "window=" + std::to_string(analysis.window.window) +
                                 " deviations=" + std::to_string(analysis.deviations.size()) +
                                 " patterns=" + std::to_string(analysis.patterns.size()));
            if (!analysis.params.empty()) {
                const auto summary = aggregate_params(analysis.params);
                detail::note(io, detail::summary_line("beta", summary.beta));
                detail::note(io, detail::summary_line("max_memory", summary.max_memory));
                detail::note(io, detail::summary_line("run_time_s", summary.run_time_s));
            }
            std::vector<SignalPattern> kept;
            for (const auto& p : analysis.patterns) {
                if (p.start_index >= 1 && series[p.start_index - 1]) {
                    kept.push_back(p);
                }
            }
            detail::emit(
                io, output, "patterns",
                [&] {
                    std::ostringstream os;
                    write_patterns_csv(os, kept, analysis.params);
                    return os.str();
                },
                [&] {
                    return render_svg({SnapshotKind::Trend, "Memory usage (" + metric + ")",
                                       std::vector<TrendLine>{{metric, series}}});
                });
        };
    });

    // shared traffic options
    std::string app_id;
    int window_minutes = 60;
    int slot_seconds = 0;
    std::string period_name = "daily";
    auto add_traffic = [&](CLI::App* sub, bool with_period) {
        add_input(sub);
        add_output(sub);
        sub->add_option("--app", app_id, "Application id (default: most requested)");
        sub->add_option("--window", window_minutes, "Counting window in minutes")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        if (with_period) {
            sub->add_option("--slot-seconds", slot_seconds, "Counting window in seconds; overrides --window")
                ->check(CLI::PositiveNumber);
            sub->add_option("--period", period_name, "Seasonal period")
                ->check(CLI::IsMember({"hourly", "daily", "weekly"}))
                ->capture_default_str();
        }
    };
    auto load = [&] {
        auto parsed = detail::load_records(detail::read_input(io, input));
        detail::print_report(io, parsed.report);
        if (app_id.empty()) {
            app_id = detail::top_app(parsed.items);
            detail::note(io, "app=" + app_id);
        }
        return parsed.items;
    };
    auto counts_for = [&](const std::vector<RequestRecord>& records) {
        return slot_seconds > 0 ? count_in_slots(records, app_id, kSecond * slot_seconds)
                                : count_executions(records, app_id, window_minutes);
    };

    // decompose
    auto* decomp = app.add_subcommand("decompose", "Seasonal adjustment of an application's request counts");
    add_traffic(decomp, true);
    decomp->callback([&] {
        action = [&] {
            const auto records = load();
            const auto counts = counts_for(records);
            const auto parts = decompose(counts, Period::for_lag(detail::parse_period(period_name), counts.lag()));
            const auto residual = parts.residual.present_values();
            if (!residual.empty()) {
                detail::note(io, "residual_rms=" + csv::format_number(stats::root_mean_square(residual)));
            }
            DecompositionPanels panels{counts, parts};
            detail::emit(
                io, output, "decomposition",
                [&] { return render_csv({SnapshotKind::DecompositionPanels, "", panels}); },
                [&] {
                    return render_svg({SnapshotKind::DecompositionPanels, "Seasonal adjustment: " + app_id, panels});
                });
        };
    });

    // profile
    auto* profile = app.add_subcommand("profile", "Seasonal boxplot profile of an application's traffic");
    add_traffic(profile, true);
    bool detrend = false;
    int zoom_hour = -1;
    int bin_width = 1;
    profile->add_flag("--detrend", detrend, "Subtract the centered MA trend first");
    profile->add_option("--zoom", zoom_hour, "Minute-level profile inside this hour of the day")
        ->check(CLI::Range(0, 23));
    profile->add_option("--bin-width", bin_width, "Zoom bin width in minutes")->capture_default_str();
    profile->callback([&] {
        action = [&] {
            const auto records = load();
            SeasonalProfile prof;
            SnapshotKind kind = SnapshotKind::SeasonalBoxplot;
            std::string title;
            if (zoom_hour >= 0) {
                prof = zoom_profile(records, app_id, zoom_hour, bin_width);
                kind = SnapshotKind::ZoomBoxplot;
                title = app_id + " executions per " + std::to_string(bin_width) + " min, hour " +
                        std::to_string(zoom_hour);
            } else {
                const auto counts = counts_for(records);
                prof = seasonal_profile(counts, Period::for_lag(detail::parse_period(period_name), counts.lag()),
                                        detrend);
                title = app_id + " " + period_name + " profile";
            }
            detail::emit(
                io, output, "profile", [&] { return render_csv({kind, title, prof}); },
                [&] { return render_svg({kind, title, prof}); });
        };
    });

    // trend
    auto* trend = app.add_subcommand("trend", "Request counts of the most used applications");
    std::size_t top_k = 5;
    add_traffic(trend, false);
    trend->add_option("--top", top_k, "Number of applications")->check(CLI::PositiveNumber)->capture_default_str();
    trend->callback([&] {
        action = [&] {
            auto parsed = detail::load_records(detail::read_input(io, input));
            detail::print_report(io, parsed.report);
            const auto ranking = rank_applications(parsed.items, top_k);
            std::vector<TrendLine> lines;
            for (const auto& a : ranking.apps) {
                detail::note(io, a.app_id + " count=" + std::to_string(a.request_count) +
                                     " share=" + csv::format_number(a.share));
                lines.push_back({a.app_id, count_executions(parsed.items, a.app_id, window_minutes)});
            }
            detail::emit(
                io, output, "trend", [&] { return render_csv({SnapshotKind::Trend, "", lines}); },
                [&] { return render_svg({SnapshotKind::Trend, "Executions per window", lines}); });
        };
    });

    // project-memory
    auto* project = app.add_subcommand("project-memory", "Worst-case accumulated memory inside a clock window");
    std::string from_clock = "00:00";
    std::string to_clock = "00:01";
    std::optional<double> per_exec_mb;
    std::string patterns_csv;
    double total_memory_mb = 0.0;
    add_traffic(project, false);
    project->add_option("--from", from_clock, "Window start HH:MM[:SS] UTC")->capture_default_str();
    project->add_option("--to", to_clock, "Window end HH:MM[:SS] UTC")->capture_default_str();
    project->add_option("--per-execution-mb", per_exec_mb, "Memory held by one execution in MB");
    project->add_option("--patterns", patterns_csv, "Pattern CSV whose mean max_memory sets the per-execution memory")
        ->check(CLI::ExistingFile);
    project->add_option("--total-memory-mb", total_memory_mb, "Machine memory in MB, converts percent to MB");
    project->callback([&] {
        action = [&] {
            double mb = 0.0;
            if (per_exec_mb) {
                mb = *per_exec_mb;
            } else if (!patterns_csv.empty()) {
                if (total_memory_mb <= 0.0) {
                    throw UsageError("--patterns needs --total-memory-mb");
                }
                std::ifstream f(patterns_csv);
                std::ostringstream buf;
                buf << f.rdbuf();
                std::istringstream is(buf.str());
                std::string line;
                std::getline(is, line);
                std::vector<double> peaks;
                while (std::getline(is, line)) {
                    const auto fields = csv::split_line(line);
                    if (fields.size() == 5) {
                        if (auto v = csv::parse_number(fields[3])) {
                            peaks.push_back(*v);
                        }
                    }
                }
                augury::detail::require(!peaks.empty(), ErrorKind::EmptyInput, "pattern CSV has no rows");
                mb = stats::mean(peaks) / 100.0 * total_memory_mb;
                detail::note(io, "per_execution_mb=" + csv::format_number(mb));
            } else {
                throw UsageError("one of --per-execution-mb or --patterns is required");
            }
            const auto records = load();
            const auto proj = accumulated_memory(records, app_id,
                                                 {detail::parse_clock(from_clock), detail::parse_clock(to_clock)}, mb);
            detail::emit(
                io, output, "memory_projection",
                [&] { return render_csv({SnapshotKind::CumulativeMemory, "", proj}); },
                [&] {
                    return render_svg({SnapshotKind::CumulativeMemory,
                                       "Accumulated memory " + from_clock + "-" + to_clock + ": " + app_id, proj});
                });
        };
    });

    // runtimes
    auto* runtimes = app.add_subcommand("runtimes", "Run-time distribution of one application");
    add_traffic(runtimes, false);
    runtimes->callback([&] {
        action = [&] {
            const auto records = load();
            const auto dist = runtime_distribution(records, app_id);
            detail::note(io, "samples=" + std::to_string(dist.samples.size()) +
                                 " skipped=" + std::to_string(dist.skipped));
            detail::emit(
                io, output, "runtimes", [&] { return render_csv({SnapshotKind::RuntimeScatter, "", dist}); },
                [&] { return render_svg({SnapshotKind::RuntimeScatter, "Run time: " + app_id, dist}); });
        };
    });

    // forecast
    auto* forecast = app.add_subcommand("forecast", "ADF test and iterative ARIMA forecast against the naive benchmark");
    std::string column = "residual";
    std::vector<std::size_t> order{1, 1, 1};
    double split_fraction = 0.8;
    std::string regression = "c";
    std::optional<std::size_t> adf_max_lag;
    add_input(forecast);
    add_output(forecast);
    forecast->add_option("--column", column, "Value column of the input CSV")->capture_default_str();
    forecast->add_option("--order", order, "ARIMA p,d,q")->delimiter(',')->expected(3)->capture_default_str();
    forecast->add_option("--split", split_fraction, "In-sample fraction")
        ->check(CLI::Range(0.05, 0.95))
        ->capture_default_str();
    forecast->add_option("--adf-regression", regression, "ADF deterministic terms")
        ->check(CLI::IsMember({"n", "c", "ct"}))
        ->capture_default_str();
    forecast->add_option("--adf-max-lag", adf_max_lag, "Largest ADF lag (default from sample size)");
    forecast->callback([&] {
        action = [&] {
            const auto full = detail::read_series_csv(detail::read_input(io, input), column);
            std::size_t first = 0;
            const auto values = contiguous_values(full, &first);
            const auto series = RegularSeries::from_values(full.time_at(first), full.lag(), values);
            const auto kind = regression == "n"   ? AdfRegression::None
                              : regression == "c" ? AdfRegression::Constant
                                                  : AdfRegression::ConstantAndTrend;
            const auto adf = adf_test(values, adf_max_lag, kind);
            detail::note(io, "adf_statistic=" + csv::format_number(adf.statistic) +
                                 " lags=" + std::to_string(adf.lags_used) +
                                 " critical_5pct=" + csv::format_number(adf.critical_values[1]) +
                                 (adf.reject_unit_root ? " stationary" : " unit_root_not_rejected"));
            const auto split = static_cast<std::size_t>(split_fraction * static_cast<double>(series.size()));
            const ArimaOrder ord{order[0], order[1], order[2]};
            const auto fit = iterative_forecast(series, split, ord);
            const auto naive = naive_forecast(series, split);
            const double rmse_arima = forecast_rmse(series, fit.forecast);
            const double rmse_naive = forecast_rmse(series, naive);
            detail::note(io, "rmse_arima=" + csv::format_number(rmse_arima) +
                                 " rmse_naive=" + csv::format_number(rmse_naive) +
                                 " ratio=" + csv::format_number(rmse_arima / rmse_naive));
            ForecastOverlay overlay{series, fit.forecast, naive};
            detail::emit(
                io, output, "forecast", [&] { return render_csv({SnapshotKind::ForecastOverlay, "", overlay}); },
                [&] {
                    return render_svg({SnapshotKind::ForecastOverlay,
                                       "ARIMA(" + std::to_string(ord.p) + "," + std::to_string(ord.d) + "," +
                                           std::to_string(ord.q) + ") vs naive",
                                       overlay});
                });
        };
    });

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate synthetic workloads");
    simulate->require_subcommand(1);
    auto* sim_metrics = simulate->add_subcommand("metrics", "Rectangular memory pulses sampled like a monitor export");
    sim::PulseSpec pulse;
    double days = 4.0;
    double p_duration = 60, p_period = 120, p_lag = 2;
    add_output(sim_metrics);
    sim_metrics->add_option("--days", days, "Span in days")->check(CLI::PositiveNumber)->capture_default_str();
    sim_metrics->add_option("--seed", pulse.rng_seed, "RNG seed")->capture_default_str();
    sim_metrics->add_option("--noise", pulse.noise_sigma, "Gaussian noise sigma (percent)")->capture_default_str();
    sim_metrics->add_option("--baseline", pulse.baseline_percent, "Baseline memory percent")->capture_default_str();
    sim_metrics->add_option("--height", pulse.height_percent, "Pulse height percent")->capture_default_str();
    sim_metrics->add_option("--duration", p_duration, "Pulse duration in seconds")->capture_default_str();
    sim_metrics->add_option("--period", p_period, "Pulse period in seconds")->capture_default_str();
    sim_metrics->add_option("--lag", p_lag, "Sampling lag in seconds")->capture_default_str();
    sim_metrics->callback([&] {
        action = [&] {
            pulse.duration = from_seconds(p_duration);
            pulse.period = from_seconds(p_period);
            pulse.sample_lag = from_seconds(p_lag);
            pulse.total_span = from_seconds(days * 86400.0);
            const auto sim = sim::generate_metrics(pulse);
            detail::note(io, "samples=" + std::to_string(sim.samples.size()) +
                                 " pulses=" + std::to_string(sim.truth.size()));
            detail::emit(
                io, output, "metrics",
                [&] {
                    std::ostringstream os;
                    write_metrics_csv(os, sim.samples);
                    return os.str();
                },
                [&] {
                    auto series = to_regular_series(sim.samples, "mem_percent", pulse.sample_lag).first;
                    return render_svg({SnapshotKind::Trend, "Simulated memory usage",
                                       std::vector<TrendLine>{{"mem_percent", std::move(series)}}});
                });
        };
    });

    auto* sim_requests = simulate->add_subcommand("requests", "Scheduled requests as an Apache access log");
    sim::RequestSchedule schedule;
    double r_days = 2.0, r_period = 60, r_jitter = 0, r_offset = 0;
    std::vector<std::string> app_specs;
    bool apache = false;
    add_output(sim_requests);
    sim_requests->add_option("--days", r_days, "Span in days")->check(CLI::PositiveNumber)->capture_default_str();
    sim_requests->add_option("--seed", schedule.rng_seed, "RNG seed")->capture_default_str();
    sim_requests->add_option("--period", r_period, "Burst period in seconds")->capture_default_str();
    sim_requests->add_option("--jitter", r_jitter, "Gaussian jitter sigma in seconds")->capture_default_str();
    sim_requests->add_option("--offset", r_offset, "Burst position inside each period in seconds")
        ->capture_default_str();
    sim_requests->add_option("--app", app_specs, "Application as PATH[:WEIGHT], repeatable");
    sim_requests->add_flag("--apache", apache, "Write Apache log lines instead of the record CSV");
    sim_requests->callback([&] {
        action = [&] {
            schedule.period = from_seconds(r_period);
            schedule.jitter_sigma = from_seconds(r_jitter);
            schedule.offset = from_seconds(r_offset);
            schedule.total_span = from_seconds(r_days * 86400.0);
            if (!app_specs.empty()) {
                schedule.apps.clear();
                for (const auto& spec : app_specs) {
                    const auto colon = spec.rfind(':');
                    sim::RequestSchedule::App a{spec.substr(0, colon), 1};
                    if (colon != std::string::npos) {
                        const auto w = csv::parse_number(spec.substr(colon + 1));
                        if (!w || *w < 1 || *w != std::floor(*w)) {
                            throw UsageError("bad app weight in '" + spec + "'");
                        }
                        a.weight = static_cast<std::size_t>(*w);
                    }
                    schedule.apps.push_back(std::move(a));
                }
            }
            const auto records = sim::generate_request_records(schedule);
            detail::note(io, "requests=" + std::to_string(records.size()));
            detail::emit(
                io, output, "requests",
                [&] {
                    std::ostringstream os;
                    if (apache) {
                        for (const auto& r : records) {
                            os << sim::format_apache_line(r) << '\n';
                        }
                    } else {
                        write_records_csv(os, records);
                    }
                    return os.str();
                },
                [&] {
                    std::vector<TrendLine> lines;
                    for (const auto& a : schedule.apps) {
                        lines.push_back({a.app_id, count_executions(records, a.app_id, 60)});
                    }
                    return render_svg({SnapshotKind::Trend, "Simulated requests per hour", std::move(lines)});
                });
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        detail::report_error(io, "usage error", e.what());
        err << app.help();
        return kExitUsage;
    }

    try {
        if (action) {
            action();
        }
    } catch (const UsageError& e) {
        detail::report_error(io, "usage error", e.what());
        return kExitUsage;
    } catch (const augury::Error& e) {
        detail::report_error(io, "error", e.what());
        return kExitData;
    }
    return kExitOk;
}

}  // namespace augury::cli
