#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "spade4/errors.hpp"
#include "spade4/random.hpp"
#include "spade4/spade4.hpp"
#include "spade4/timeseries.hpp"

namespace spade4 {

// Signed forecast errors from backtests on growing training prefixes.
// Row j holds lead-time-(j+1) errors, one column per backtest.
struct BacktestResiduals {
    Eigen::MatrixXd V;  // T x (m2 - m1 - T)
    int m1 = 0;
    int m2 = 0;
    int horizon = 0;
};

inline BacktestResiduals backtest_residuals(const TimeSeries& data, int m1, int m2, int T,
                                            const EmbeddingConfig& cfg, const RfmConfig& rfm) {
    data.check();
    if (T < 1) throw ValidationError("backtest_residuals: horizon must be >= 1");
    if (!(m1 < m2 - T))
        throw ValidationError("backtest_residuals requires m1 < m2 - T");
    if (m1 < 1) throw ValidationError("backtest_residuals: m1 must be >= 1");
    if (static_cast<long>(data.size()) < m2)
        throw InsufficientDataError("backtest_residuals: series shorter than m2");

    const int cols = m2 - m1 - T;
    BacktestResiduals bt{Eigen::MatrixXd(T, cols), m1, m2, T};
    for (int i = 1; i <= cols; ++i) {
        const TimeSeries prefix = head(data, static_cast<std::size_t>(m1 + i - 1));
        RfmConfig per_run = rfm;
        per_run.seed = derive_seed(rfm.seed, {0x6261636bULL, static_cast<std::uint64_t>(i)});
        const ForecastResult fc = forecast(prefix, cfg, per_run, T);
        for (int j = 0; j < T; ++j)
            bt.V(j, i - 1) = fc.values[static_cast<std::size_t>(j)] -
                             data.values[static_cast<std::size_t>(m1 + i - 1 + j)];
    }
    return bt;
}

struct IntervalResult {
    ForecastResult point;
    std::vector<double> sigma;  // per-lead-time RMS of backtest errors
    std::vector<double> lo;     // point - 1.96 sigma, clamped at 0
    std::vector<double> hi;     // point + 1.96 sigma
};

// 95% prediction band: sigma_j is the RMS over backtests of the lead-time-j
// errors; the final forecast comes from the full length-m2 prefix.
inline IntervalResult interval_forecast(const TimeSeries& data, int m1, int m2, int T,
                                        const EmbeddingConfig& cfg, const RfmConfig& rfm) {
    const BacktestResiduals bt = backtest_residuals(data, m1, m2, T, cfg, rfm);
    const double cols = static_cast<double>(bt.V.cols());

    IntervalResult out;
    out.point = forecast(head(data, static_cast<std::size_t>(m2)), cfg, rfm, T);
    out.sigma.resize(static_cast<std::size_t>(T));
    out.lo.resize(static_cast<std::size_t>(T));
    out.hi.resize(static_cast<std::size_t>(T));
    for (int j = 0; j < T; ++j) {
        const double s = std::sqrt(bt.V.row(j).squaredNorm() / cols);
        const double point = out.point.values[static_cast<std::size_t>(j)];
        out.sigma[static_cast<std::size_t>(j)] = s;
        out.lo[static_cast<std::size_t>(j)] = std::max(0.0, point - 1.96 * s);
        out.hi[static_cast<std::size_t>(j)] = point + 1.96 * s;
    }
    return out;
}

}  // namespace spade4
