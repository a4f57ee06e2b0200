#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "spade4/embedding.hpp"
#include "spade4/errors.hpp"
#include "spade4/rfm.hpp"
#include "spade4/timeseries.hpp"

namespace spade4 {

struct RfmConfig {
    int features_per_sample = 50;  // N = features_per_sample * m unless fixed_features is set
    int fixed_features = 0;        // > 0 overrides the per-sample rule
    long max_features = 0;         // > 0 caps N (memory guard, off by default)
    std::uint64_t seed = 0;
    std::vector<double> lambda_grid = default_lambda_grid();
    // The overparameterized feature matrix (N >> rows, near-collinear ReLU
    // columns) leaves the l1 problem with almost-flat directions, so the
    // pipeline bounds the sweep budget the way stock solver packages do.
    // Forecasts are insensitive to further sweeps; the fit keeps its
    // non-convergence flag.
    LassoOptions lasso{.tol = 1e-7, .max_iter = 200};

    int resolve_feature_count(long m) const {
        long n = fixed_features > 0 ? fixed_features
                                    : static_cast<long>(features_per_sample) * m;
        if (max_features > 0) n = std::min(n, max_features);
        if (n < 1) throw ValidationError("rfm config yields no features");
        return static_cast<int>(n);
    }
};

// Fitted forecaster: frozen random basis, sparse coefficients, and the tail
// of observations needed to seed the rollout.
struct Spade4Model {
    RandomFeatureBasis basis;
    SparseCoefficients coeffs;
    EmbeddingConfig cfg;
    std::vector<double> train_tail;  // most recent (p-1)*tau + 1 samples, oldest first
    double dt = 1.0;
    double last_train_day = 0.0;
};

struct ForecastResult {
    std::vector<double> values;
    double first_day = 0.0;  // day of values.front()
    double dt = 1.0;

    int horizon() const { return static_cast<int>(values.size()); }
};

// Learns d/dt of the observable as a sparse random-feature function of the
// delay vector: derivative targets, optional smoothing, delay dataset, frozen
// basis, then an l1 fit with BIC-selected regularization.
inline Spade4Model fit(const TimeSeries& train, const EmbeddingConfig& cfg,
                       const RfmConfig& rfm) {
    train.check();
    cfg.check();
    const long m = static_cast<long>(train.size());
    if (m < static_cast<long>(cfg.p) + 1)
        throw InsufficientDataError("spade4 fit needs at least p + 1 samples");

    std::vector<double> targets = estimate_derivative(train);
    if (cfg.smooth_s > 1)
        targets = smooth_derivative(targets, cfg.smooth_s, cfg.smooth_window);

    const DelayDataset ds = build_delay_dataset(train, cfg, targets);
    RandomFeatureBasis basis = sample_basis(cfg.p, rfm.resolve_feature_count(m), rfm.seed);
    const Eigen::MatrixXd a = feature_matrix(basis, ds.inputs);
    SparseCoefficients coeffs = select_lambda(a, ds.targets, rfm.lambda_grid, rfm.lasso);

    Spade4Model model;
    model.basis = std::move(basis);
    model.coeffs = std::move(coeffs);
    model.cfg = cfg;
    model.dt = train.dt;
    model.last_train_day = train.last_day();
    const long tail = static_cast<long>(cfg.p - 1) * cfg.tau + 1;
    model.train_tail.assign(train.values.end() - tail, train.values.end());
    return model;
}

// Closed-loop Euler rollout: each step evaluates the learned slope on the
// most recent delay vector (observed tail mixed with prior forecasts) and
// advances by dt. Forecasts are clamped at 0; proportions cannot go negative.
inline ForecastResult predict(const Spade4Model& model, int horizon) {
    if (horizon < 1) throw ValidationError("predict: horizon must be >= 1");
    const int p = model.cfg.p;
    const int tau = model.cfg.tau;
    const std::size_t window_len = static_cast<std::size_t>(p - 1) * tau + 1;
    if (model.train_tail.size() != window_len)
        throw ValidationError("predict: model tail does not match its embedding config");

    std::vector<double> window = model.train_tail;
    std::vector<double> h(static_cast<std::size_t>(p));
    ForecastResult out;
    out.dt = model.dt;
    out.first_day = model.last_train_day + model.dt;
    out.values.reserve(static_cast<std::size_t>(horizon));
    for (int i = 0; i < horizon; ++i) {
        for (int j = 0; j < p; ++j)
            h[static_cast<std::size_t>(j)] = window[window.size() - 1 - static_cast<std::size_t>(j) * tau];
        const double slope = evaluate_features_dot(model.basis, h, model.coeffs.c);
        double next = window.back() + model.dt * slope;
        if (!std::isfinite(next))
            throw DivergenceError("forecast diverged", out.first_day + i * model.dt);
        next = std::max(0.0, next);
        out.values.push_back(next);
        window.erase(window.begin());
        window.push_back(next);
    }
    return out;
}

inline ForecastResult forecast(const TimeSeries& train, const EmbeddingConfig& cfg,
                               const RfmConfig& rfm, int horizon) {
    return predict(fit(train, cfg, rfm), horizon);
}

}  // namespace spade4
