#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "spade4/errors.hpp"
#include "spade4/timeseries.hpp"

namespace spade4 {

enum class SmoothWindow {
    shifted,   // window [k+2-s, k+1] with zero padding, as in the training recipe
    centered,  // symmetric window of the same width, no forward shift
};

struct EmbeddingConfig {
    int p = 9;         // embedding dimension, 2d+1 for the d = 4 compartment models
    int tau = 1;       // delay in samples
    int smooth_s = 1;  // derivative smoothing strength; 1 = no smoothing
    SmoothWindow smooth_window = SmoothWindow::shifted;

    void check() const {
        if (p < 1) throw ValidationError("embedding dimension p must be >= 1");
        if (tau < 1) throw ValidationError("delay tau must be >= 1");
        if (smooth_s < 1) throw ValidationError("smoothing strength must be >= 1");
    }
};

// Finite-difference slope estimates: forward at the first sample, central in
// the interior, backward at the last. Central differences are exact on
// quadratics, which keeps the interior second-order accurate.
inline std::vector<double> estimate_derivative(const TimeSeries& s) {
    s.check();
    const auto& y = s.values;
    const std::size_t m = y.size();
    if (m < 2) throw InsufficientDataError("estimate_derivative needs at least two samples");
    std::vector<double> d(m);
    d[0] = (y[1] - y[0]) / s.dt;
    for (std::size_t k = 1; k + 1 < m; ++k) d[k] = (y[k + 1] - y[k - 1]) / (2.0 * s.dt);
    d[m - 1] = (y[m - 1] - y[m - 2]) / s.dt;
    return d;
}

// Width-s averaging filter with zero padding outside the data range. The
// shifted variant reaches one sample forward, exactly as the training recipe
// states it; the centered variant is the unshifted alternative.
inline std::vector<double> smooth_derivative(std::span<const double> d, int s,
                                             SmoothWindow window = SmoothWindow::shifted) {
    if (s < 1) throw ValidationError("smoothing strength must be >= 1");
    const long m = static_cast<long>(d.size());
    std::vector<double> out(d.size(), 0.0);
    auto at = [&](long n) { return (n >= 0 && n < m) ? d[static_cast<std::size_t>(n)] : 0.0; };
    for (long k = 0; k < m; ++k) {
        long lo, hi;
        if (window == SmoothWindow::shifted) {
            lo = k + 2 - s;
            hi = k + 1;
        } else {
            lo = k - (s - 1) / 2;
            hi = lo + s - 1;
        }
        double acc = 0.0;
        for (long n = lo; n <= hi; ++n) acc += at(n);
        out[static_cast<std::size_t>(k)] = acc / static_cast<double>(s);
    }
    return out;
}

// Paired (delay vector, derivative target) training set.
struct DelayDataset {
    Eigen::MatrixXd inputs;   // one delay vector per row, newest sample first
    Eigen::VectorXd targets;
    int first_k = 0;          // 1-based index of the first pair (p for tau = 1)

    long rows() const { return inputs.rows(); }
};

inline DelayDataset build_delay_dataset(const TimeSeries& s, const EmbeddingConfig& cfg,
                                        std::span<const double> targets) {
    s.check();
    cfg.check();
    const long m = static_cast<long>(s.size());
    if (static_cast<long>(targets.size()) != m)
        throw ValidationError("build_delay_dataset: targets length must equal the series length");
    if (m < static_cast<long>(cfg.p) * cfg.tau)
        throw InsufficientDataError("series too short for the requested embedding");

    const long reach = static_cast<long>(cfg.p - 1) * cfg.tau;  // samples looked back from k
    const long rows = m - reach;
    DelayDataset ds;
    ds.inputs.resize(rows, cfg.p);
    ds.targets.resize(rows);
    ds.first_k = static_cast<int>(reach) + 1;
    for (long r = 0; r < rows; ++r) {
        const long k = reach + r;
        for (long j = 0; j < cfg.p; ++j)
            ds.inputs(r, j) = s.values[static_cast<std::size_t>(k - j * cfg.tau)];
        ds.targets(r) = targets[static_cast<std::size_t>(k)];
    }
    return ds;
}

}  // namespace spade4
