#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "augury/error.hpp"
#include "augury/series.hpp"
#include "augury/stats.hpp"

namespace augury {

// ---------------------------------------------------------------------------
// Least squares

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd stderr_;
    double rss = 0.0;
    std::size_t n_obs = 0;
};

/// Ordinary least squares through a column-pivoted QR. Rank deficiency is an error.
inline OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const auto n = x.rows();
    const auto k = x.cols();
    detail::require(n > k, ErrorKind::InsufficientData, "regression needs more rows than regressors");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    detail::require(qr.rank() == k, ErrorKind::Degenerate, "regression design matrix is rank deficient");

    OlsFit fit;
    fit.coef = qr.solve(y);
    fit.rss = (y - x * fit.coef).squaredNorm();
    fit.n_obs = static_cast<std::size_t>(n);

    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
    const Eigen::MatrixXd cov = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();
    const double sigma2 = fit.rss / static_cast<double>(n - k);
    fit.stderr_ = (sigma2 * cov.diagonal()).cwiseSqrt();
    return fit;
}

// ---------------------------------------------------------------------------
// Augmented Dickey-Fuller

enum class AdfRegression { None, Constant, ConstantAndTrend };

struct AdfCoefficients {
    double alpha = 0.0;  ///< constant (0 when excluded)
    double trend = 0.0;  ///< time-trend slope (0 when excluded)
    double gamma = 0.0;  ///< coefficient on y_{t-1}
    std::vector<double> deltas;  ///< coefficients on the lagged differences
};

struct AdfResult {
    double statistic = 0.0;
    std::size_t lags_used = 0;
    AdfRegression regression = AdfRegression::Constant;
    bool reject_unit_root = false;
    AdfCoefficients coefficients;
    std::array<double, 3> critical_values{};  ///< 1%, 5%, 10%
    std::size_t n_obs = 0;
};

/// MacKinnon large-sample critical values at 1%, 5% and 10%.
inline std::array<double, 3> adf_critical_values(AdfRegression kind) {
    switch (kind) {
        case AdfRegression::None: return {-2.58, -1.95, -1.62};
        case AdfRegression::Constant: return {-3.43, -2.86, -2.57};
        case AdfRegression::ConstantAndTrend: return {-3.96, -3.41, -3.12};
    }
    return {-3.43, -2.86, -2.57};
}

/// floor(12 (n/100)^(1/4))
inline std::size_t schwert_max_lag(std::size_t n) {
    return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

namespace detail {

// Rows t = first..n-1 of  y'_t = a + b t + g y_{t-1} + sum d_i y'_{t-i}.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> adf_design(std::span<const double> y, std::size_t lags,
                                                              std::size_t first, AdfRegression kind) {
    const std::size_t det = kind == AdfRegression::None ? 0 : (kind == AdfRegression::Constant ? 1 : 2);
    const std::size_t rows = y.size() - first;
    Eigen::MatrixXd x(rows, det + 1 + lags);
    Eigen::VectorXd dy(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = first + r;
        std::size_t c = 0;
        if (det >= 1) {
            x(r, c++) = 1.0;
        }
        if (det >= 2) {
            x(r, c++) = static_cast<double>(t);
        }
        x(r, c++) = y[t - 1];
        for (std::size_t i = 1; i <= lags; ++i) {
            x(r, c++) = y[t - i] - y[t - i - 1];
        }
        dy(r) = y[t] - y[t - 1];
    }
    return {std::move(x), std::move(dy)};
}

}  // namespace detail

/**
 * ADF unit-root test. The lag order is chosen by AIC over 0..max_lag on a
 * common sample, then the chosen regression is refit on all usable rows.
 * The null (gamma = 0) is rejected when the t-ratio falls below the 5%
 * critical value.
 */
inline AdfResult adf_test(std::span<const double> y, std::optional<std::size_t> max_lag_opt,
                          AdfRegression kind = AdfRegression::Constant) {
    const std::size_t max_lag = max_lag_opt.value_or(schwert_max_lag(y.size()));
    detail::require(y.size() >= max_lag + 10, ErrorKind::InsufficientData,
                    "ADF test needs at least max_lag + 10 observations");
    const std::size_t det = kind == AdfRegression::None ? 0 : (kind == AdfRegression::Constant ? 1 : 2);

    std::optional<std::size_t> best_lag;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        auto [x, dy] = detail::adf_design(y, lag, max_lag + 1, kind);
        if (x.rows() <= x.cols()) {
            continue;
        }
        try {
            const auto fit = ols(x, dy);
            const double n = static_cast<double>(fit.n_obs);
            const double aic = n * std::log(std::max(fit.rss, std::numeric_limits<double>::min()) / n) +
                               2.0 * static_cast<double>(x.cols());
            if (!best_lag || aic < best_aic) {
                best_aic = aic;
                best_lag = lag;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Degenerate) {
                throw;
            }
        }
    }
    detail::require(best_lag.has_value(), ErrorKind::Degenerate, "every ADF regression is rank deficient");

    auto [x, dy] = detail::adf_design(y, *best_lag, *best_lag + 1, kind);
    const auto fit = ols(x, dy);
    AdfResult res;
    res.lags_used = *best_lag;
    res.regression = kind;
    res.n_obs = fit.n_obs;
    res.critical_values = adf_critical_values(kind);
    std::size_t c = 0;
    if (det >= 1) {
        res.coefficients.alpha = fit.coef(c++);
    }
    if (det >= 2) {
        res.coefficients.trend = fit.coef(c++);
    }
    const std::size_t gamma_col = c++;
    res.coefficients.gamma = fit.coef(gamma_col);
    for (; c < static_cast<std::size_t>(fit.coef.size()); ++c) {
        res.coefficients.deltas.push_back(fit.coef(c));
    }
    // An exact fit carries no evidence against the unit root.
    const double scale = std::max(1.0, dy.squaredNorm());
    const bool exact = fit.rss <= 1e-24 * scale;
    res.statistic = exact ? 0.0 : fit.coef(gamma_col) / fit.stderr_(gamma_col);
    res.reject_unit_root = res.statistic < res.critical_values[1];
    return res;
}

inline AdfResult adf_test(const RegularSeries& series, std::optional<std::size_t> max_lag,
                          AdfRegression kind = AdfRegression::Constant) {
    return adf_test(contiguous_values(series), max_lag, kind);
}

// ---------------------------------------------------------------------------
// ARIMA by conditional sum of squares

struct ArimaOrder {
    std::size_t p = 1;
    std::size_t d = 1;
    std::size_t q = 1;

    friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

struct ArimaModel {
    ArimaOrder order;
    std::vector<double> ar_coeffs;
    std::vector<double> ma_coeffs;
    double intercept = 0.0;  ///< constant c of the differenced model (d = 0 only)
    double mean = 0.0;       ///< implied process mean of the differenced series
    double residual_variance = 0.0;
    bool stationary = true;
    bool invertible = true;
    std::size_t iterations = 0;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, ArimaModel last)
        : Error(ErrorKind::Convergence, what), last_(std::move(last)) {}

    const ArimaModel& last_iterate() const noexcept { return last_; }

private:
    ArimaModel last_;
};

/// The fit stops once the relative CSS decrease drops below `tolerance` or the step becomes negligible.
struct ArimaFitOptions {
    std::size_t max_iterations = 200;
    double tolerance = 1e-10;
};

inline void validate(const ArimaOrder& o) {
    detail::require(o.p <= 5 && o.q <= 5, ErrorKind::InvalidParameter, "ARIMA p and q must be <= 5");
    detail::require(o.p + o.q >= 1 || o.d >= 1, ErrorKind::InvalidParameter, "ARIMA order has no terms");
}

/// Applies (1 - B)^d.
inline std::vector<double> difference_n(std::span<const double> y, std::size_t d) {
    std::vector<double> w(y.begin(), y.end());
    for (std::size_t k = 0; k < d; ++k) {
        detail::require(w.size() >= 2, ErrorKind::InsufficientData, "series too short to difference");
        for (std::size_t t = w.size() - 1; t > 0; --t) {
            w[t] -= w[t - 1];
        }
        w.erase(w.begin());
    }
    return w;
}

/// True when all roots of 1 - c_1 z - ... - c_k z^k lie outside the unit circle
/// (Schur-Cohn step-down on the reflection coefficients).
inline bool roots_outside_unit_circle(std::vector<double> c) {
    while (!c.empty()) {
        const double k = c.back();
        if (std::abs(k) >= 1.0) {
            return false;
        }
        const std::size_t m = c.size() - 1;
        std::vector<double> next(m);
        for (std::size_t i = 0; i < m; ++i) {
            next[i] = (c[i] + k * c[m - 1 - i]) / (1.0 - k * k);
        }
        c = std::move(next);
    }
    return true;
}

namespace detail {

struct CssState {
    std::vector<double> e;
    double sse = 0.0;
};

// Innovations e_t for t >= start; e_t = 0 before. With a Jacobian when `jac` is non-null.
inline CssState css_residuals(std::span<const double> w, std::size_t p, std::size_t q, bool with_mean,
                              const Eigen::VectorXd& theta, Eigen::MatrixXd* jac) {
    const std::size_t n = w.size();
    const std::size_t start = std::max(p, q);
    const auto k = static_cast<std::size_t>(theta.size());
    const double mu = with_mean ? theta(static_cast<Eigen::Index>(p + q)) : 0.0;
    CssState s;
    s.e.assign(n, 0.0);
    if (jac) {
        jac->setZero(static_cast<Eigen::Index>(n - start), static_cast<Eigen::Index>(k));
    }
    std::vector<double> de(jac ? n * k : 0, 0.0);
    double phi_sum = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        phi_sum += theta(static_cast<Eigen::Index>(i));
    }
    for (std::size_t t = start; t < n; ++t) {
        double et = w[t] - mu;
        for (std::size_t i = 1; i <= p; ++i) {
            et -= theta(static_cast<Eigen::Index>(i - 1)) * (w[t - i] - mu);
        }
        for (std::size_t j = 1; j <= q; ++j) {
            et -= theta(static_cast<Eigen::Index>(p + j - 1)) * s.e[t - j];
        }
        s.e[t] = et;
        s.sse += et * et;
        if (!jac) {
            continue;
        }
        double* row = &de[t * k];
        for (std::size_t i = 1; i <= p; ++i) {
            row[i - 1] = -(w[t - i] - mu);
        }
        for (std::size_t j = 1; j <= q; ++j) {
            row[p + j - 1] = -s.e[t - j];
        }
        if (with_mean) {
            row[p + q] = -1.0 + phi_sum;
        }
        for (std::size_t j = 1; j <= q; ++j) {
            const double th = theta(static_cast<Eigen::Index>(p + j - 1));
            const double* prev = &de[(t - j) * k];
            for (std::size_t c = 0; c < k; ++c) {
                row[c] -= th * prev[c];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            (*jac)(static_cast<Eigen::Index>(t - start), static_cast<Eigen::Index>(c)) = row[c];
        }
    }
    return s;
}

inline ArimaModel make_model(const ArimaOrder& order, const Eigen::VectorXd& theta, bool with_mean, double sse,
                             std::size_t n_eff, std::size_t iterations) {
    ArimaModel m;
    m.order = order;
    for (std::size_t i = 0; i < order.p; ++i) {
        m.ar_coeffs.push_back(theta(static_cast<Eigen::Index>(i)));
    }
    for (std::size_t j = 0; j < order.q; ++j) {
        m.ma_coeffs.push_back(theta(static_cast<Eigen::Index>(order.p + j)));
    }
    if (with_mean) {
        m.mean = theta(static_cast<Eigen::Index>(order.p + order.q));
        double phi_sum = 0.0;
        for (double a : m.ar_coeffs) {
            phi_sum += a;
        }
        m.intercept = m.mean * (1.0 - phi_sum);
    }
    m.residual_variance = n_eff > 0 ? sse / static_cast<double>(n_eff) : 0.0;
    m.stationary = roots_outside_unit_circle(m.ar_coeffs);
    std::vector<double> neg_ma;
    for (double b : m.ma_coeffs) {
        neg_ma.push_back(-b);
    }
    m.invertible = roots_outside_unit_circle(neg_ma);
    m.iterations = iterations;
    return m;
}

}  // namespace detail

/**
 * Fits ARIMA(p, d, q) to y by minimizing the conditional sum of squared
 * one-step innovations of the d-times differenced series, with innovations
 * before max(p, q) set to zero. Levenberg-Marquardt from zero AR/MA
 * coefficients; a mean term is estimated only when d = 0.
 */
inline ArimaModel fit_arima(std::span<const double> y, const ArimaOrder& order, const ArimaFitOptions& opts = {}) {
    validate(order);
    const std::vector<double> w = difference_n(y, order.d);
    const std::size_t p = order.p;
    const std::size_t q = order.q;
    const bool with_mean = order.d == 0;
    const std::size_t k = p + q + (with_mean ? 1 : 0);
    detail::require(w.size() >= 10 * (p + q + 1), ErrorKind::InsufficientData,
                    "ARIMA fit needs at least 10 (p + q + 1) values after differencing");
    const std::size_t n_eff = w.size() - std::max(p, q);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    if (with_mean) {
        theta(static_cast<Eigen::Index>(p + q)) = stats::mean(w);
    }
    if (k == 0) {
        const auto s = detail::css_residuals(w, 0, 0, false, theta, nullptr);
        return detail::make_model(order, theta, false, s.sse, n_eff, 0);
    }

    Eigen::MatrixXd jac;
    auto state = detail::css_residuals(w, p, q, with_mean, theta, &jac);
    double lambda = 1e-3;
    const std::size_t start = std::max(p, q);
    for (std::size_t iter = 1; iter <= opts.max_iterations; ++iter) {
        const Eigen::Map<const Eigen::VectorXd> e(state.e.data() + start, static_cast<Eigen::Index>(n_eff));
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * e;
        bool improved = false;
        while (lambda < 1e12) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
            const Eigen::VectorXd step = damped.ldlt().solve(-grad);
            const Eigen::VectorXd trial = theta + step;
            auto trial_state = detail::css_residuals(w, p, q, with_mean, trial, nullptr);
            if (std::isfinite(trial_state.sse) && trial_state.sse < state.sse) {
                const double rel = (state.sse - trial_state.sse) / std::max(state.sse, 1e-300);
                theta = trial;
                state = detail::css_residuals(w, p, q, with_mean, theta, &jac);
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                if (rel < opts.tolerance || step.norm() < 1e-8 * (1.0 + theta.norm())) {
                    return detail::make_model(order, theta, with_mean, state.sse, n_eff, iter);
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) {
            // No descent direction left: a stationary point of the CSS.
            return detail::make_model(order, theta, with_mean, state.sse, n_eff, iter);
        }
    }
    throw ConvergenceError("ARIMA fit did not converge within " + std::to_string(opts.max_iterations) + " iterations",
                           detail::make_model(order, theta, with_mean, state.sse, n_eff, opts.max_iterations));
}

inline ArimaModel fit_arima(const RegularSeries& series, const ArimaOrder& order, const ArimaFitOptions& opts = {}) {
    return fit_arima(contiguous_values(series), order, opts);
}

/// One-step-ahead forecast of the value following y.
inline double forecast_next(const ArimaModel& model, std::span<const double> y) {
    const auto& o = model.order;
    const std::vector<double> w = difference_n(y, o.d);
    Eigen::VectorXd theta(static_cast<Eigen::Index>(o.p + o.q + (o.d == 0 ? 1 : 0)));
    for (std::size_t i = 0; i < o.p; ++i) {
        theta(static_cast<Eigen::Index>(i)) = model.ar_coeffs[i];
    }
    for (std::size_t j = 0; j < o.q; ++j) {
        theta(static_cast<Eigen::Index>(o.p + j)) = model.ma_coeffs[j];
    }
    if (o.d == 0) {
        theta(static_cast<Eigen::Index>(o.p + o.q)) = model.mean;
    }
    const auto s = detail::css_residuals(w, o.p, o.q, o.d == 0, theta, nullptr);
    const std::size_t n = w.size();
    const double mu = o.d == 0 ? model.mean : 0.0;
    double next_w = mu;
    for (std::size_t i = 1; i <= o.p; ++i) {
        if (n >= i) {
            next_w += model.ar_coeffs[i - 1] * (w[n - i] - mu);
        }
    }
    for (std::size_t j = 1; j <= o.q; ++j) {
        if (n >= j) {
            next_w += model.ma_coeffs[j - 1] * s.e[n - j];
        }
    }
    // Undo (1 - B)^d: y_n = w_n - sum_k C(d,k) (-1)^k y_{n-k}.
    double out = next_w;
    double binom = 1.0;
    for (std::size_t kk = 1; kk <= o.d; ++kk) {
        binom = binom * static_cast<double>(o.d - kk + 1) / static_cast<double>(kk);
        const double sign = (kk % 2 == 1) ? 1.0 : -1.0;
        out += sign * binom * y[y.size() - kk];
    }
    return out;
}

struct IterativeForecast {
    RegularSeries forecast;
    std::vector<ArimaModel> models;
};

/**
 * For each off-sample index t >= split: refit on all values before t, forecast
 * t, then append the true value at t.
 */
inline IterativeForecast iterative_forecast(const RegularSeries& series, std::size_t split, const ArimaOrder& order,
                                            const ArimaFitOptions& opts = {}) {
    validate(order);
    detail::require(split >= 1 && split < series.size(), ErrorKind::InvalidParameter,
                    "split must leave data on both sides");
    std::vector<double> y;
    y.reserve(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        detail::require(series[t].has_value(), ErrorKind::InvalidParameter,
                        "forecast input has a missing value at index " + std::to_string(t));
        y.push_back(*series[t]);
    }
    IterativeForecast out{RegularSeries(series.time_at(split), series.lag(),
                                        std::vector<RegularSeries::Value>(series.size() - split)),
                          {}};
    for (std::size_t t = split; t < y.size(); ++t) {
        const std::span<const double> history(y.data(), t);
        try {
            auto model = fit_arima(history, order, opts);
            out.forecast[t - split] = forecast_next(model, history);
            out.models.push_back(std::move(model));
        } catch (const Error& e) {
            throw Error(e.kind(), "step " + std::to_string(t) + ": " + e.message());
        }
    }
    return out;
}

/// y_hat_t = y_{t-1} for every t >= split.
inline RegularSeries naive_forecast(const RegularSeries& series, std::size_t split) {
    detail::require(split >= 1 && split < series.size(), ErrorKind::InvalidParameter,
                    "split must leave data on both sides");
    std::vector<RegularSeries::Value> values;
    for (std::size_t t = split; t < series.size(); ++t) {
        values.push_back(series[t - 1]);
    }
    return RegularSeries(series.time_at(split), series.lag(), std::move(values));
}

/// Root mean squared error over the instants both series cover with values.
inline double forecast_rmse(const RegularSeries& truth, const RegularSeries& forecast) {
    detail::require(truth.lag() == forecast.lag(), ErrorKind::InvalidParameter, "series lags differ");
    const Duration offset = forecast.start_time() - truth.start_time();
    detail::require(offset % truth.lag() == Duration::zero(), ErrorKind::InvalidParameter, "series grids are not aligned");
    const std::int64_t shift = offset / truth.lag();
    double ss = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        const std::int64_t t = shift + static_cast<std::int64_t>(i);
        if (t < 0 || t >= static_cast<std::int64_t>(truth.size())) {
            continue;
        }
        const auto& a = truth[static_cast<std::size_t>(t)];
        const auto& f = forecast[i];
        if (a && f) {
            ss += (*a - *f) * (*a - *f);
            ++n;
        }
    }
    detail::require(n > 0, ErrorKind::EmptyInput, "forecast and truth do not overlap");
    return std::sqrt(ss / static_cast<double>(n));
}

}  // namespace augury
